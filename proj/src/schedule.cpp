#include "satsched/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "satsched/linear_model.hpp"

namespace satsched {

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

double csv_number(const std::string& text, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("schedule line " + std::to_string(line) + ": bad number '" + text +
                             "'");
  }
  return v;
}

}  // namespace

Schedule make_schedule(const SchedulingInstance& instance, std::vector<Assignment> assignments) {
  std::stable_sort(assignments.begin(), assignments.end(),
                   [](const Assignment& a, const Assignment& b) { return a.mission < b.mission; });
  Schedule out;
  for (const auto& a : assignments) {
    if (a.mission >= instance.mission_count()) continue;
    ++out.objective_count;
    out.objective_weight += instance.missions()[a.mission].weight;
  }
  out.assignments = std::move(assignments);
  return out;
}

Schedule shifted(const Schedule& schedule, Seconds shift) {
  Schedule out = schedule;
  for (auto& a : out.assignments) {
    a.window_begin += shift;
    a.window_end += shift;
    a.start += shift;
  }
  return out;
}

std::string write_schedule_csv(const SchedulingInstance& instance, const Schedule& schedule,
                               Seconds shift) {
  std::string out = "mission,resource,window_begin,window_end,start,duration\n";
  for (const auto& a : schedule.assignments) {
    const auto& m = instance.missions().at(a.mission);
    const auto& r = instance.resources().at(a.resource);
    out += csv_field(m.id) + "," + csv_field(r.id) + "," + format_number(a.window_begin + shift) +
           "," + format_number(a.window_end + shift) + "," + format_number(a.start + shift) + "," +
           format_number(m.duration) + "\n";
  }
  return out;
}

Schedule read_schedule_csv(const SchedulingInstance& instance, std::string_view text,
                           Seconds shift) {
  std::vector<Assignment> assignments;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (header) {
      header = false;
      if (fields.size() >= 5 && fields[0] == "mission") continue;
    }
    if (fields.size() < 5) {
      throw std::runtime_error("schedule line " + std::to_string(line_no) +
                               ": expected at least 5 fields");
    }
    Assignment a;
    a.mission = instance.find_mission(fields[0]).value_or(kUnknownIndex);
    a.resource = instance.find_resource(fields[1]).value_or(kUnknownIndex);
    a.window_begin = csv_number(fields[2], line_no) - shift;
    a.window_end = csv_number(fields[3], line_no) - shift;
    a.start = csv_number(fields[4], line_no) - shift;
    assignments.push_back(a);
  }
  return make_schedule(instance, std::move(assignments));
}

}  // namespace satsched
