#include <random>

#include "doctest.h"
#include "oracles/sequencing.hpp"
#include "satsched/solver.hpp"
#include "satsched/validator.hpp"
#include "support/fixtures.hpp"

using namespace satsched;

namespace {

SchedulingInstance norm(const SchedulingInstance& i) { return normalize_and_clip(i); }

bool starts_valid(std::span<const Job> jobs, const std::vector<Seconds>& starts, Seconds setup) {
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return starts[a] < starts[b]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& j = jobs[order[k]];
    const double s = starts[order[k]];
    if (s < j.begin - 1e-9 || s + j.duration > j.end + 1e-9) return false;
    if (k > 0) {
      const auto p = order[k - 1];
      if (s < starts[p] + jobs[p].duration + setup - 1e-9) return false;
    }
  }
  return true;
}

SchedulingInstance identical(int count, double window_end, std::vector<int> weights = {}) {
  std::vector<Mission> ms;
  std::vector<fixture::W> ws;
  for (int i = 0; i < count; ++i) {
    const int w = weights.empty() ? 1 : weights[static_cast<std::size_t>(i)];
    ms.push_back(fixture::mission("m" + std::to_string(i), 4, w));
    ws.push_back({"m" + std::to_string(i), "R", 0, window_end});
  }
  return norm(fixture::make(0, 1000, ms, {fixture::resource("R", 2)}, ws));
}

}  // namespace

TEST_CASE("sequence_feasible") {
  SUBCASE("two jobs fit in some order") {
    std::vector<Job> jobs{{0, 20, 5}, {0, 40, 5}};
    auto s = sequence_feasible(jobs, 10);
    REQUIRE(s.has_value());
    CHECK(starts_valid(jobs, *s, 10));
    CHECK(oracle::permutation_sequence({{0, 20, 5}, {0, 40, 5}}, 10).has_value());
  }
  SUBCASE("two jobs in one short window") {
    std::vector<Job> jobs{{0, 10, 5}, {0, 10, 5}};
    CHECK_FALSE(sequence_feasible(jobs, 10).has_value());
  }
  SUBCASE("single job starts at its window begin") {
    std::vector<Job> jobs{{3, 9, 4}};
    auto s = sequence_feasible(jobs, 100);
    REQUIRE(s.has_value());
    CHECK((*s)[0] == 3);
  }
  SUBCASE("empty") { CHECK(sequence_feasible({}, 5).has_value()); }
  SUBCASE("agrees with the permutation oracle") {
    std::mt19937_64 rng(73);
    std::uniform_int_distribution<int> begin(0, 60);
    std::uniform_int_distribution<int> slack(0, 30);
    std::uniform_int_distribution<int> dur(3, 10);
    std::uniform_int_distribution<int> count(1, 7);
    std::uniform_int_distribution<int> gap(0, 12);
    for (int k = 0; k < 3000; ++k) {
      std::vector<Job> jobs;
      std::vector<oracle::Job> ojobs;
      for (int i = count(rng); i > 0; --i) {
        const double b = begin(rng);
        const double d = dur(rng);
        const double e = b + d + slack(rng);
        jobs.push_back({b, e, d});
        ojobs.push_back({b, e, d});
      }
      const double setup = gap(rng);
      auto got = sequence_feasible(jobs, setup);
      auto expect = oracle::permutation_sequence(ojobs, setup);
      REQUIRE(got.has_value() == expect.has_value());
      if (got) CHECK(starts_valid(jobs, *got, setup));
    }
  }
}

TEST_CASE("greedy") {
  SUBCASE("single mission") {
    auto inst = norm(fixture::make(0, 100, {fixture::mission("A", 5)}, {fixture::resource("R", 2)},
                                   {{"A", "R", 10, 20}}));
    auto s = greedy(inst, preprocess(inst), ObjectiveKind::Count);
    CHECK(s.objective_count == 1);
  }
  SUBCASE("three identical missions, capacity two") {
    auto inst = identical(3, 14);
    auto prep = preprocess(inst);
    REQUIRE(prep.subintervals.size() == 1);
    CHECK(prep.subintervals[0].capacity == 2);
    auto s = greedy(inst, prep, ObjectiveKind::Count);
    CHECK(s.objective_count == 2);
    CHECK(brute_force(inst, ObjectiveKind::Count).objective_count == 2);
  }
  SUBCASE("empty instance") {
    auto inst = norm(fixture::make(0, 100, {}, {fixture::resource("R", 2)}, {}));
    auto s = greedy(inst, preprocess(inst), ObjectiveKind::Weight);
    CHECK(s.assignments.empty());
    CHECK(s.objective_count == 0);
    CHECK(s.objective_weight == 0);
  }
}

TEST_CASE("solve_exact examples") {
  SUBCASE("no conflicts") {
    auto inst = norm(fixture::make(0, 1000, {fixture::mission("A", 5), fixture::mission("B", 5), fixture::mission("C", 5)},
                                   {fixture::resource("R", 2)},
                                   {{"A", "R", 0, 20}, {"B", "R", 100, 120}, {"C", "R", 300, 320}}));
    auto r = solve_exact(inst, preprocess(inst), ObjectiveKind::Count);
    CHECK(r.proven_optimal);
    CHECK(r.best.objective_count == 3);
  }
  SUBCASE("shared subinterval of capacity one") {
    auto inst = identical(3, 6, {2, 3, 5});
    auto prep = preprocess(inst);
    auto w = solve_exact(inst, prep, ObjectiveKind::Weight);
    CHECK(w.proven_optimal);
    CHECK(w.best.objective_weight == 5);
    CHECK(brute_force(inst, ObjectiveKind::Weight).objective_weight == 5);
    auto c = solve_exact(inst, prep, ObjectiveKind::Count);
    CHECK(c.best.objective_count == 1);
    CHECK(c.gap == 0.0);
  }
}

TEST_CASE("brute_force") {
  SUBCASE("single mission") {
    auto inst = norm(fixture::make(0, 100, {fixture::mission("A", 5)}, {fixture::resource("R", 2)},
                                   {{"A", "R", 10, 20}}));
    CHECK(brute_force(inst, ObjectiveKind::Count).objective_count == 1);
  }
  SUBCASE("two missions, one short window each") {
    auto inst = norm(fixture::make(0, 100, {fixture::mission("A", 5), fixture::mission("B", 5)},
                                   {fixture::resource("R", 10)}, {{"A", "R", 0, 10}, {"B", "R", 0, 10}}));
    CHECK(brute_force(inst, ObjectiveKind::Count).objective_count == 1);
  }
  SUBCASE("size guard") {
    auto inst = identical(11, 500);
    CHECK_THROWS_AS(brute_force(inst, ObjectiveKind::Count), std::invalid_argument);
  }
}

TEST_CASE("solver properties on random instances") {
  std::mt19937_64 rng(79);
  for (int k = 0; k < 60; ++k) {
    auto inst = norm(fixture::random_tiny(rng));
    auto prep = preprocess(inst);
    for (auto obj : {ObjectiveKind::Count, ObjectiveKind::Weight}) {
      auto g = greedy(inst, prep, obj);
      auto b = brute_force(inst, obj);
      auto serial = solve_exact_serial(inst, prep, obj);
      auto par = solve_exact(inst, prep, obj, {.threads = 2});
      auto one = solve_exact(inst, prep, obj, {.threads = 1});
      auto again = solve_exact(inst, prep, obj, {.threads = 1});
      CHECK(validate(inst, g).ok());
      CHECK(validate(inst, b).ok());
      CHECK(validate(inst, par.best).ok());
      CHECK(objective_value(b, obj) >= objective_value(g, obj));
      CHECK(serial.proven_optimal);
      CHECK(par.proven_optimal);
      CHECK(objective_value(serial.best, obj) == objective_value(b, obj));
      CHECK(objective_value(par.best, obj) == objective_value(b, obj));
      CHECK(one.best == again.best);
      CHECK(one.nodes == again.nodes);
      CHECK(par.root_bound >= par.upper_bound - 1e-9);
      CHECK(par.upper_bound >= objective_value(par.best, obj) - 1e-9);
    }
  }
}

TEST_CASE("limits stop the search without losing feasibility") {
  std::mt19937_64 rng(83);
  for (int k = 0; k < 20; ++k) {
    auto inst = norm(fixture::random_tiny(rng));
    auto prep = preprocess(inst);
    auto r = solve_exact(inst, prep, ObjectiveKind::Weight, {.node_limit = 3});
    CHECK(validate(inst, r.best).ok());
    const double best = objective_value(r.best, ObjectiveKind::Weight);
    CHECK(r.upper_bound >= best);
    CHECK(r.gap == doctest::Approx(relative_gap(r.upper_bound, best)));
    if (r.proven_optimal) CHECK(r.gap == 0.0);
  }
  CHECK(relative_gap(10, 8) == doctest::Approx(0.2));
  CHECK(relative_gap(0, 0) == 0.0);
}
