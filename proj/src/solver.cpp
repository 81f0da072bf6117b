#include "satsched/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <omp.h>

namespace satsched {

namespace {

constexpr Seconds kNever = -std::numeric_limits<Seconds>::infinity();

// Depth-first search over orders of one group with earliest-start placement.
class OrderSearch {
 public:
  OrderSearch(std::span<const Job> jobs, std::vector<std::size_t> members, Seconds setup)
      : jobs_(jobs), members_(std::move(members)), setup_(setup),
        placed_(members_.size(), false), start_(members_.size(), 0.0) {
    // Latest-start-first candidate order finds feasible orders early.
    std::sort(members_.begin(), members_.end(), [&](std::size_t a, std::size_t b) {
      return latest(a) < latest(b) || (latest(a) == latest(b) && a < b);
    });
  }

  bool run() { return dfs(0, kNever); }
  Seconds start_of(std::size_t pos) const { return start_[pos]; }
  std::size_t member(std::size_t pos) const { return members_[pos]; }
  std::size_t size() const { return members_.size(); }

 private:
  Seconds latest(std::size_t job) const { return jobs_[job].end - jobs_[job].duration; }

  std::string key() const {
    std::string k((placed_.size() + 7) / 8, '\0');
    for (std::size_t i = 0; i < placed_.size(); ++i) {
      if (placed_[i]) k[i / 8] = static_cast<char>(k[i / 8] | (1 << (i % 8)));
    }
    return k;
  }

  // `ready`: earliest start of the next observation.
  bool dfs(std::size_t count, Seconds ready) {
    if (count == members_.size()) return true;
    auto [it, fresh] = memo_.try_emplace(key(), ready);
    if (!fresh) {
      if (it->second <= ready) return false;
      it->second = ready;
    }
    for (std::size_t p = 0; p < members_.size(); ++p) {
      if (placed_[p]) continue;
      const auto& job = jobs_[members_[p]];
      const Seconds s = std::max(ready, job.begin);
      if (s + job.duration > job.end + kTimeEps) continue;
      const Seconds next = s + job.duration + setup_;
      bool dooms = false;
      for (std::size_t q = 0; q < members_.size() && !dooms; ++q) {
        dooms = q != p && !placed_[q] && latest(members_[q]) + kTimeEps < next;
      }
      if (dooms) continue;
      placed_[p] = true;
      start_[p] = s;
      if (dfs(count + 1, next)) return true;
      placed_[p] = false;
    }
    return false;
  }

  std::span<const Job> jobs_;
  std::vector<std::size_t> members_;
  Seconds setup_;
  std::vector<bool> placed_;
  std::vector<Seconds> start_;
  std::unordered_map<std::string, Seconds> memo_;
};

// ---- search state ----------------------------------------------------------

struct Group {
  std::vector<bool> candidate;          // per reduced window
  int capacity = 0;
  std::vector<std::size_t> confined;    // missions, by profit descending
};

struct Node {
  std::vector<std::vector<std::size_t>> on_resource;  // committed windows
  std::vector<Seconds> used;
  std::vector<std::size_t> chosen;  // per mission, kUnknownIndex if none
  std::vector<int> load;            // committed missions per group
  long value = 0;
  std::size_t depth = 0;
  double bound = std::numeric_limits<double>::infinity();
};

class Search {
 public:
  Search(const SchedulingInstance& instance, const PreprocessResult& prep, ObjectiveKind kind,
         const SolveLimits& limits)
      : instance_(instance), prep_(prep), r_(prep.reduced), kind_(kind), limits_(limits),
        started_(std::chrono::steady_clock::now()) {
    const auto& windows = r_.windows();
    for (std::size_t j = 0; j < r_.resource_count(); ++j) {
      setup_.push_back(setup_time_bound(r_.resources()[j]));
    }
    profit_.resize(r_.mission_count());
    for (std::size_t i = 0; i < r_.mission_count(); ++i) profit_[i] = mission_profit(r_.missions()[i], kind);

    // Branching order: decreasing conflict, then lower index.
    std::vector<long> conflict(r_.mission_count(), 0);
    for (std::size_t a = 0; a < windows.size(); ++a) {
      for (std::size_t b = 0; b < windows.size(); ++b) {
        if (windows[a].resource == windows[b].resource && windows[a].mission != windows[b].mission &&
            overlaps(windows[a].begin, windows[a].end, windows[b].begin, windows[b].end)) {
          ++conflict[windows[a].mission];
        }
      }
    }
    choices_.resize(r_.mission_count());
    for (std::size_t i = 0; i < r_.mission_count(); ++i) {
      choices_[i] = r_.windows_of_mission(i);
      std::stable_sort(choices_[i].begin(), choices_[i].end(),
                       [&](std::size_t a, std::size_t b) { return windows[a].begin < windows[b].begin; });
      if (!choices_[i].empty()) order_.push_back(i);
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return conflict[a] > conflict[b]; });
    position_.assign(r_.mission_count(), kUnknownIndex);
    for (std::size_t d = 0; d < order_.size(); ++d) position_[order_[d]] = d;

    build_groups();
  }

  Node root() const {
    Node n;
    n.on_resource.resize(r_.resource_count());
    n.used.assign(r_.resource_count(), 0.0);
    n.chosen.assign(r_.mission_count(), kUnknownIndex);
    n.load.assign(groups_.size(), 0);
    n.bound = bound(n);
    return n;
  }

  long pre_value() const {
    long v = 0;
    for (const auto& p : prep_.preassigned) v += mission_profit(instance_.missions()[p.mission], kind_);
    return v;
  }

  double bound(const Node& n) const {
    double b = static_cast<double>(n.value) + free_suffix_[n.depth];
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      int room = groups_[g].capacity - n.load[g];
      for (auto m : groups_[g].confined) {
        if (room <= 0) break;
        if (position_[m] < n.depth) continue;
        b += static_cast<double>(profit_[m]);
        --room;
      }
    }
    return b;
  }

  // Children of `n` in branching order: each feasible window, then skip.
  template <class Visit>
  void expand(Node& n, Visit&& visit) const {
    const auto m = order_[n.depth];
    const Seconds d = r_.missions()[m].duration;
    for (auto w : choices_[m]) {
      const auto j = r_.windows()[w].resource;
      if (n.used[j] + d > r_.resources()[j].max_usage + kTimeEps) continue;
      n.on_resource[j].push_back(w);
      if (!sequence_of(n.on_resource[j], j)) {
        n.on_resource[j].pop_back();
        continue;
      }
      n.used[j] += d;
      n.chosen[m] = w;
      n.value += profit_[m];
      for (auto g : groups_of_window_[w]) ++n.load[g];
      ++n.depth;
      visit(n);
      --n.depth;
      for (auto g : groups_of_window_[w]) --n.load[g];
      n.value -= profit_[m];
      n.chosen[m] = kUnknownIndex;
      n.used[j] -= d;
      n.on_resource[j].pop_back();
    }
    ++n.depth;
    visit(n);
    --n.depth;
  }

  bool leaf(const Node& n) const { return n.depth == order_.size(); }

  std::optional<std::vector<Seconds>> sequence_of(const std::vector<std::size_t>& ws,
                                                  std::size_t j) const {
    std::vector<Job> jobs;
    jobs.reserve(ws.size());
    for (auto w : ws) {
      const auto& win = r_.windows()[w];
      jobs.push_back({win.begin, win.end, r_.missions()[win.mission].duration});
    }
    return sequence_feasible(jobs, setup_[j]);
  }

  std::vector<Assignment> assignments(const Node& n) const {
    auto out = preassigned_assignments(instance_, prep_);
    for (std::size_t j = 0; j < r_.resource_count(); ++j) {
      const auto& ws = n.on_resource[j];
      auto starts = sequence_of(ws, j);
      for (std::size_t k = 0; k < ws.size(); ++k) {
        const auto& win = r_.windows()[ws[k]];
        out.push_back({win.mission, j, win.begin, win.end, (*starts)[k]});
      }
    }
    return out;
  }

  // ---- shared search bookkeeping ----

  bool should_stop() {
    if (stop_.load(std::memory_order_relaxed)) return true;
    const auto count = nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
    if (count > limits_.node_limit) {
      stop_ = true;
    } else if ((count & 255) == 0 && elapsed() > limits_.time_limit) {
      stop_ = true;
    }
    return stop_.load(std::memory_order_relaxed);
  }

  void offer(const Node& n) {
    if (n.value <= incumbent_.load()) return;
    std::lock_guard lock(mutex_);
    if (n.value <= incumbent_.load()) return;
    incumbent_ = n.value;
    best_ = assignments(n);
  }

  void note_open(double b) {
    std::lock_guard lock(mutex_);
    open_bound_ = std::max(open_bound_, b);
  }

  void dfs(Node& n, double parent_bound) {
    const double b = std::min(parent_bound, bound(n));
    if (b <= static_cast<double>(incumbent_.load())) return;
    if (should_stop()) {
      note_open(b);
      return;
    }
    if (leaf(n)) {
      offer(n);
      return;
    }
    expand(n, [&](Node& child) { dfs(child, b); });
    if (stop_) note_open(b);
  }

  // Open nodes at `depth` below the root, pruned against the incumbent.
  std::vector<Node> split(std::size_t depth) {
    std::vector<Node> frontier{root()};
    for (std::size_t level = 0; level < depth; ++level) {
      std::vector<Node> next;
      for (auto& n : frontier) {
        if (leaf(n)) {
          next.push_back(n);
          continue;
        }
        expand(n, [&](Node& child) {
          Node copy = child;
          copy.bound = std::min(n.bound, bound(copy));
          if (copy.bound > static_cast<double>(incumbent_.load())) next.push_back(std::move(copy));
        });
      }
      frontier = std::move(next);
    }
    return frontier;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  }

  void seed_incumbent(const Schedule& s) {
    incumbent_ = objective_value(s, kind_) - pre_value();
    best_ = s.assignments;
  }

  std::size_t depth_count() const { return order_.size(); }

  SolveReport report(double root_bound) {
    SolveReport out;
    out.best = make_schedule(instance_, best_);
    const double best = static_cast<double>(objective_value(out.best, kind_));
    out.root_bound = root_bound + static_cast<double>(pre_value());
    out.proven_optimal = !stop_;
    out.upper_bound = out.proven_optimal
                          ? best
                          : std::max(best, open_bound_ + static_cast<double>(pre_value()));
    out.upper_bound = std::min(out.upper_bound, out.root_bound);
    out.upper_bound = std::max(out.upper_bound, best);
    out.gap = relative_gap(out.upper_bound, best);
    out.nodes = nodes_.load();
    out.elapsed = elapsed();
    return out;
  }

  std::atomic<bool> stop_{false};

 private:
  void build_groups() {
    const auto& windows = r_.windows();
    auto add_group = [&](const std::vector<std::size_t>& cands, int capacity) {
      Group g;
      g.candidate.assign(windows.size(), false);
      for (auto w : cands) g.candidate[w] = true;
      g.capacity = capacity;
      groups_.push_back(std::move(g));
    };
    for (const auto& s : prep_.subintervals) add_group(s.candidates, s.capacity);
    for (std::size_t j = 0; j < r_.resource_count(); ++j) {
      for (const auto& fti : build_feasible_intervals(r_, j)) {
        std::vector<Seconds> durations;
        std::vector<bool> seen(r_.mission_count(), false);
        for (auto w : fti.members) {
          if (!seen[windows[w].mission]) durations.push_back(r_.missions()[windows[w].mission].duration);
          seen[windows[w].mission] = true;
        }
        add_group(fti.members, max_assignable(fti.length(), durations, r_.resources()[j].stabilize));
      }
    }

    groups_of_window_.resize(windows.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      for (std::size_t w = 0; w < windows.size(); ++w) {
        if (groups_[g].candidate[w]) groups_of_window_[w].push_back(g);
      }
    }

    // Each mission is charged to at most one group containing all its windows.
    std::vector<std::size_t> home(r_.mission_count(), kUnknownIndex);
    for (auto m : order_) {
      for (std::size_t g = 0; g < groups_.size(); ++g) {
        const bool inside = std::all_of(choices_[m].begin(), choices_[m].end(),
                                        [&](std::size_t w) { return groups_[g].candidate[w]; });
        if (!inside) continue;
        if (home[m] == kUnknownIndex || groups_[g].capacity < groups_[home[m]].capacity) home[m] = g;
      }
      if (home[m] != kUnknownIndex) groups_[home[m]].confined.push_back(m);
    }
    for (auto& g : groups_) {
      std::stable_sort(g.confined.begin(), g.confined.end(),
                       [&](std::size_t a, std::size_t b) { return profit_[a] > profit_[b]; });
    }
    free_suffix_.assign(order_.size() + 1, 0.0);
    for (std::size_t d = order_.size(); d-- > 0;) {
      const auto m = order_[d];
      free_suffix_[d] = free_suffix_[d + 1] + (home[m] == kUnknownIndex ? static_cast<double>(profit_[m]) : 0.0);
    }
  }

  const SchedulingInstance& instance_;
  const PreprocessResult& prep_;
  const SchedulingInstance& r_;
  ObjectiveKind kind_;
  SolveLimits limits_;
  std::chrono::steady_clock::time_point started_;

  std::vector<Seconds> setup_;
  std::vector<long> profit_;
  std::vector<std::vector<std::size_t>> choices_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
  std::vector<Group> groups_;
  std::vector<std::vector<std::size_t>> groups_of_window_;
  std::vector<double> free_suffix_;

  std::atomic<long> incumbent_{-1};
  std::atomic<std::size_t> nodes_{0};
  std::mutex mutex_;
  std::vector<Assignment> best_;
  double open_bound_ = -std::numeric_limits<double>::infinity();
};

// ---- brute force -----------------------------------------------------------

// Earliest-start placement over every order, skipping orders that share a
// failing prefix.
std::optional<std::vector<Seconds>> permutation_feasible(const std::vector<Job>& jobs, Seconds setup) {
  std::vector<std::size_t> perm(jobs.size());
  std::iota(perm.begin(), perm.end(), 0);
  if (jobs.empty()) return std::vector<Seconds>{};
  do {
    std::vector<Seconds> starts(jobs.size());
    Seconds ready = kNever;
    std::size_t failed = jobs.size();
    for (std::size_t p = 0; p < perm.size(); ++p) {
      const auto& job = jobs[perm[p]];
      const Seconds s = std::max(ready, job.begin);
      if (s + job.duration > job.end + kTimeEps) {
        failed = p;
        break;
      }
      starts[perm[p]] = s;
      ready = s + job.duration + setup;
    }
    if (failed == jobs.size()) return starts;
    std::sort(perm.begin() + static_cast<std::ptrdiff_t>(failed) + 1, perm.end(), std::greater<>());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<Seconds>> sequence_feasible(std::span<const Job> jobs, Seconds setup) {
  std::vector<Seconds> starts(jobs.size(), 0.0);
  if (jobs.empty()) return starts;
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return jobs[a].begin < jobs[b].begin || (jobs[a].begin == jobs[b].begin && a < b);
  });

  // Groups separated by at least `setup` never interact.
  std::size_t first = 0;
  Seconds reach = jobs[order[0]].end;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    const bool cut = k == order.size() || jobs[order[k]].begin >= reach + setup - kTimeEps;
    if (!cut) {
      reach = std::max(reach, jobs[order[k]].end);
      continue;
    }
    OrderSearch search(jobs, {order.begin() + static_cast<std::ptrdiff_t>(first),
                              order.begin() + static_cast<std::ptrdiff_t>(k)},
                       setup);
    if (!search.run()) return std::nullopt;
    for (std::size_t p = 0; p < search.size(); ++p) starts[search.member(p)] = search.start_of(p);
    if (k < order.size()) {
      first = k;
      reach = jobs[order[k]].end;
    }
  }
  return starts;
}

long objective_value(const Schedule& schedule, ObjectiveKind kind) {
  return kind == ObjectiveKind::Weight ? schedule.objective_weight : schedule.objective_count;
}

double relative_gap(double bound, double best) {
  if (!(bound > 0.0)) return 0.0;
  return (bound - best) / bound;
}

Schedule greedy(const SchedulingInstance& instance, const PreprocessResult& prep,
                ObjectiveKind objective) {
  const auto& r = prep.reduced;
  const auto& windows = r.windows();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < r.mission_count(); ++i) {
    if (!r.windows_of_mission(i).empty()) order.push_back(i);
  }
  if (objective == ObjectiveKind::Weight) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ma = r.missions()[a];
      const auto& mb = r.missions()[b];
      return ma.weight / ma.duration > mb.weight / mb.duration;
    });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return r.windows_of_mission(a).size() < r.windows_of_mission(b).size();
    });
  }

  std::vector<std::vector<std::size_t>> on_resource(r.resource_count());
  std::vector<Seconds> used(r.resource_count(), 0.0);
  auto jobs_of = [&](const std::vector<std::size_t>& ws) {
    std::vector<Job> jobs;
    for (auto w : ws) jobs.push_back({windows[w].begin, windows[w].end, r.missions()[windows[w].mission].duration});
    return jobs;
  };
  for (auto m : order) {
    const Seconds d = r.missions()[m].duration;
    for (auto w : r.windows_of_mission(m)) {
      const auto j = windows[w].resource;
      if (used[j] + d > r.resources()[j].max_usage + kTimeEps) continue;
      on_resource[j].push_back(w);
      if (sequence_feasible(jobs_of(on_resource[j]), setup_time_bound(r.resources()[j]))) {
        used[j] += d;
        break;
      }
      on_resource[j].pop_back();
    }
  }

  auto assignments = preassigned_assignments(instance, prep);
  for (std::size_t j = 0; j < r.resource_count(); ++j) {
    const auto starts = sequence_feasible(jobs_of(on_resource[j]), setup_time_bound(r.resources()[j]));
    for (std::size_t k = 0; k < on_resource[j].size(); ++k) {
      const auto& win = windows[on_resource[j][k]];
      assignments.push_back({win.mission, j, win.begin, win.end, (*starts)[k]});
    }
  }
  return make_schedule(instance, std::move(assignments));
}

SolveReport solve_exact(const SchedulingInstance& instance, const PreprocessResult& prep,
                        ObjectiveKind objective, const SolveLimits& limits) {
  Search search(instance, prep, objective, limits);
  search.seed_incumbent(greedy(instance, prep, objective));
  const Node root = search.root();

  const int threads = limits.threads > 0 ? limits.threads : omp_get_max_threads();
  // Deep enough for a few tasks per thread, never past the last mission.
  std::size_t depth = 0;
  std::vector<Node> tasks{root};
  while (depth < search.depth_count() && tasks.size() < static_cast<std::size_t>(8 * threads) &&
         depth < 12) {
    tasks = search.split(++depth);
    if (tasks.empty()) break;
  }

  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    Node node = tasks[static_cast<std::size_t>(t)];
    if (search.stop_) {
      search.note_open(node.bound);
      continue;
    }
    search.dfs(node, node.bound);
  }
  return search.report(root.bound);
}

SolveReport solve_exact_serial(const SchedulingInstance& instance, const PreprocessResult& prep,
                               ObjectiveKind objective, const SolveLimits& limits) {
  Search search(instance, prep, objective, limits);
  search.seed_incumbent(greedy(instance, prep, objective));
  Node root = search.root();
  search.dfs(root, root.bound);
  return search.report(root.bound);
}

Schedule brute_force(const SchedulingInstance& instance, ObjectiveKind objective) {
  const auto& windows = instance.windows();
  if (instance.mission_count() > kBruteForceMissions || windows.size() > kBruteForceWindows) {
    throw std::invalid_argument("brute_force is limited to " + std::to_string(kBruteForceMissions) +
                                " missions and " + std::to_string(kBruteForceWindows) + " windows");
  }
  const auto n = instance.mission_count();
  std::vector<std::vector<std::size_t>> options(n);
  for (std::size_t i = 0; i < n; ++i) options[i] = instance.windows_of_mission(i);

  std::vector<std::size_t> pick(n, kUnknownIndex);
  long best_value = 0;
  std::vector<Assignment> best;

  auto check = [&]() {
    long value = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i] != kUnknownIndex) value += mission_profit(instance.missions()[i], objective);
    }
    if (value <= best_value) return;
    std::vector<Assignment> trial;
    for (std::size_t j = 0; j < instance.resource_count(); ++j) {
      std::vector<Job> jobs;
      std::vector<std::size_t> ws;
      Seconds usage = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (pick[i] == kUnknownIndex || windows[pick[i]].resource != j) continue;
        const auto& w = windows[pick[i]];
        jobs.push_back({w.begin, w.end, instance.missions()[i].duration});
        ws.push_back(pick[i]);
        usage += instance.missions()[i].duration;
      }
      if (usage > instance.resources()[j].max_usage + kTimeEps) return;
      auto starts = permutation_feasible(jobs, setup_time_bound(instance.resources()[j]));
      if (!starts) return;
      for (std::size_t k = 0; k < ws.size(); ++k) {
        const auto& w = windows[ws[k]];
        trial.push_back({w.mission, j, w.begin, w.end, (*starts)[k]});
      }
    }
    best_value = value;
    best = std::move(trial);
  };

  auto enumerate = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      check();
      return;
    }
    for (auto w : options[i]) {
      pick[i] = w;
      self(self, i + 1);
    }
    pick[i] = kUnknownIndex;
    self(self, i + 1);
  };
  enumerate(enumerate, 0);
  return make_schedule(instance, std::move(best));
}

}  // namespace satsched
