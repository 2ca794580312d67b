#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "blindseq/game.hpp"
#include "blindseq/grid.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace blindseq;

namespace {

// Bounds straight from the definition: max over the upper-left quadrant,
// min over the lower-right quadrant.
Interval quadrant_bounds(const GridState& g, Cell c) {
  Interval out{0.0, 1.0};
  for (int r = 1; r <= g.m(); ++r) {
    for (int k = 1; k <= g.m(); ++k) {
      const auto& v = g.at({r, k});
      if (!v || (r == c.row && k == c.col)) continue;
      if (r <= c.row && k <= c.col) out.lower = std::max(out.lower, *v);
      if (r >= c.row && k >= c.col) out.upper = std::min(out.upper, *v);
    }
  }
  return out;
}

GridState random_grid(int m, double fill, std::mt19937_64& rng) {
  // A sorted Young-tableau-like fill: value = (r + c + jitter) scaled, kept
  // strictly increasing along rows and columns, then cells dropped at random.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::optional<double>> cells(m * m);
  std::vector<double> base(m * m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) base[r * m + c] = (r + c + 0.9 * u(rng)) / (2.0 * m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      double v = base[r * m + c];
      if (r > 0) v = std::max(v, base[(r - 1) * m + c] + 1e-6);
      if (c > 0) v = std::max(v, base[r * m + c - 1] + 1e-6);
      base[r * m + c] = v;
    }
  for (int i = 0; i < m * m; ++i)
    if (u(rng) < fill) cells[i] = std::min(base[i], 1.0);
  return GridState(m, cells);
}

std::map<std::pair<int, int>, int> count_groups(const std::vector<CellBound>& bounds) {
  std::map<std::pair<int, int>, int> groups;
  for (const auto& b : bounds) {
    const int lo = b.bounds.lower <= 0.0 ? 0 : raw_draw(b.bounds.lower);
    const int hi = b.bounds.upper >= 1.0 ? 1000 : raw_draw(b.bounds.upper);
    ++groups[{lo, hi}];
  }
  return groups;
}

} // namespace

TEST_CASE("grid state validation") {
  CHECK_THROWS_AS(GridState(0), std::invalid_argument);
  CHECK_THROWS_AS(GridState(kMaxGridSide + 1), std::invalid_argument);
  CHECK_THROWS_AS(GridState(2, {0.5, 0.4, std::nullopt, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(GridState(2, {0.5, std::nullopt, 0.3, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(GridState(2, {0.5, std::nullopt, std::nullopt}), std::invalid_argument);
  CHECK_NOTHROW(GridState(2, {0.5, std::nullopt, std::nullopt, 0.3}));
  CHECK(fixture::grid_example_state().filled() == 3);
  CHECK(fixture::grid_example_state().empty_cells() == 22);
}

TEST_CASE("induced bounds: figure state") {
  const auto g = fixture::grid_example_state().with_placement({3, 1}, normalize_draw(170));
  const auto b11 = induced_bounds_at(g, {1, 1});
  CHECK(b11.lower == 0.0);
  CHECK(b11.upper == doctest::Approx(normalize_draw(130)));
  for (Cell c : {Cell{4, 5}, Cell{5, 5}}) {
    const auto b = induced_bounds_at(g, c);
    CHECK(b.lower == doctest::Approx(normalize_draw(761)));
    CHECK(b.upper == 1.0);
  }
  const auto groups = count_groups(induced_bounds(g));
  const std::map<std::pair<int, int>, int> want = {
      {{0, 130}, 1}, {{0, 573}, 4}, {{130, 573}, 3}, {{170, 761}, 3}, {{170, 1000}, 8}, {{761, 1000}, 2},
  };
  CHECK(groups == want);
  CHECK(induced_bounds(g).size() == 21);
}

TEST_CASE("induced bounds: empty grid") {
  for (const auto& b : induced_bounds(GridState(4))) {
    CHECK(b.bounds.lower == 0.0);
    CHECK(b.bounds.upper == 1.0);
  }
  CHECK(induced_bounds(GridState(4)).size() == 16);
}

TEST_CASE("property: induced bounds match the quadrant definition") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 8);
    const auto g = random_grid(m, 0.4, rng);
    for (const auto& cb : induced_bounds(g)) {
      const auto want = quadrant_bounds(g, cb.cell);
      REQUIRE(cb.bounds.lower == want.lower);
      REQUIRE(cb.bounds.upper == want.upper);
    }
  }
}

TEST_CASE("property: bounds are monotone along rows and columns") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 7);
    const auto g = random_grid(m, 0.3, rng);
    for (int r = 1; r <= m; ++r) {
      for (int c = 1; c <= m; ++c) {
        if (g.at({r, c})) continue;
        const auto here = induced_bounds_at(g, {r, c});
        if (c < m && !g.at({r, c + 1})) {
          const auto right = induced_bounds_at(g, {r, c + 1});
          CHECK(here.lower <= right.lower);
          CHECK(here.upper <= right.upper);
        }
        if (r < m && !g.at({r + 1, c})) {
          const auto down = induced_bounds_at(g, {r + 1, c});
          CHECK(here.lower <= down.lower);
          CHECK(here.upper <= down.upper);
        }
      }
    }
  }
}

TEST_CASE("feasible_assignment_exists") {
  const std::vector<Interval> bounds = {{0.0, 0.3}, {0.2, 0.6}, {0.5, 1.0}};
  const std::vector<double> ok = {0.1, 0.55, 0.7};
  const std::vector<double> bad = {0.1, 0.15, 0.7};
  CHECK(feasible_assignment_exists(ok, bounds));
  CHECK_FALSE(feasible_assignment_exists(bad, bounds));
  const std::vector<double> unsorted = {0.7, 0.1, 0.55};
  CHECK(feasible_assignment_exists(unsorted, bounds));
  const std::vector<double> two = {0.1, 0.2};
  CHECK_THROWS_AS(feasible_assignment_exists(two, bounds), std::invalid_argument);
  // Sentinels are inclusive; other ends are open.
  const std::vector<Interval> full = {{0.0, 1.0}};
  const std::vector<double> zero = {0.0}, one = {1.0};
  CHECK(feasible_assignment_exists(zero, full));
  CHECK(feasible_assignment_exists(one, full));
  const std::vector<Interval> open = {{0.2, 0.6}};
  const std::vector<double> edge = {0.2};
  CHECK_FALSE(feasible_assignment_exists(edge, open));
  CHECK(feasible_assignment_exists(std::span<const double>{}, std::span<const Interval>{}));
}

TEST_CASE("property: matching agrees with brute force") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int yes = 0, no = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 7);
    std::vector<double> values(k);
    std::vector<Interval> bounds(k);
    std::vector<std::pair<double, double>> pairs(k);
    for (int i = 0; i < k; ++i) {
      values[i] = u(rng);
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      bounds[i] = {a, b};
      pairs[i] = {a, b};
    }
    std::sort(values.begin(), values.end());
    const bool want = oracle::matching_by_permutation(values, pairs);
    REQUIRE(feasible_assignment_exists(values, bounds) == want);
    (want ? yes : no)++;
  }
  CHECK(yes > 100);
  CHECK(no > 100);
}

TEST_CASE("placement_probability: closed forms on a 2x2 grid") {
  const GridSampling s{200'000, 1, 4};
  const double x = 0.3;
  const double se = 0.5 / std::sqrt(200'000.0);
  // Corner: all three others must exceed x.
  CHECK(std::fabs(placement_probability(GridState(2), {1, 1}, x, s) - std::pow(1 - x, 3)) < 4 * se);
  // Off-diagonal: one below, one above, the last anywhere.
  const double off = 1 - std::pow(x, 3) - std::pow(1 - x, 3);
  CHECK(std::fabs(placement_probability(GridState(2), {1, 2}, x, s) - off) < 4 * se);
  CHECK(std::fabs(placement_probability(GridState(2), {2, 2}, x, s) - std::pow(x, 3)) < 4 * se);
}

TEST_CASE("placement_probability: degenerate inputs") {
  const GridSampling s{1000, 1, 1};
  CHECK(placement_probability(GridState(1), {1, 1}, 0.4, s) == 1.0);
  const auto g = fixture::grid_example_state();
  CHECK(placement_probability(g, {2, 1}, 0.5, s) == 0.0);                    // filled
  CHECK(placement_probability(g, {1, 1}, normalize_draw(170), s) == 0.0);    // inadmissible
  CHECK(placement_probability(g, {3, 1}, normalize_draw(130), s) == 0.0);    // duplicate
  CHECK(grid_advise(g, normalize_draw(573), s).empty());
  // After placing at (1,2), the last cell (2,1) needs a draw in (0.3, 0.31).
  const GridState pinched(2, {0.3, std::nullopt, std::nullopt, 0.31});
  CHECK(placement_probability(pinched, {1, 2}, 0.305, {50'000, 3, 2}) == doctest::Approx(0.01).epsilon(0.2));
}

TEST_CASE("placement_probability: independent of worker count") {
  const auto g = fixture::grid_example_state();
  const double x = normalize_draw(170);
  const double one = placement_probability(g, {3, 1}, x, {20'000, 5, 1});
  for (int w : {2, 3, 7}) CHECK(placement_probability(g, {3, 1}, x, {20'000, 5, w}) == one);
}

TEST_CASE("grid_advise: ranking and admissible cells") {
  const auto g = fixture::grid_example_state();
  const auto recs = grid_advise(g, normalize_draw(170), {20'000, 2, 4});
  REQUIRE(!recs.empty());
  CHECK(recs.front().cell == Cell{3, 1});
  CHECK(recs.front().rank == 1);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    CHECK(recs[i].rank == static_cast<int>(i) + 1);
    CHECK(recs[i - 1].probability >= recs[i].probability);
  }
  // Every empty cell except (1,1), (4,5), (5,5) admits 170.
  CHECK(recs.size() == 19);
}

TEST_CASE("place enforces grid rules") {
  auto g = fixture::grid_example_state();
  CHECK_THROWS_AS(g.place({2, 1}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(g.place({1, 1}, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(g.place({3, 1}, normalize_draw(130)), std::invalid_argument);
  CHECK_THROWS_AS(g.place({0, 1}, 0.2), std::out_of_range);
  g.place({3, 1}, normalize_draw(170));
  CHECK(g.filled() == 4);
}
