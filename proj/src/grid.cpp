#include "blindseq/grid.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>

#include "blindseq/simulator.hpp"

namespace blindseq {

GridState::GridState(int m) : m_(m) {
  if (m < 1 || m > kMaxGridSide) throw std::invalid_argument("grid side out of range");
  cells_.assign(static_cast<std::size_t>(m * m), std::nullopt);
}

GridState::GridState(int m, std::vector<std::optional<double>> cells) : m_(m), cells_(std::move(cells)) {
  if (m < 1 || m > kMaxGridSide) throw std::invalid_argument("grid side out of range");
  if (static_cast<int>(cells_.size()) != m * m) throw std::invalid_argument("grid needs m*m cells");
  for (const auto& v : cells_) {
    if (v && !(*v >= 0.0 && *v <= 1.0)) throw std::invalid_argument("grid value outside [0,1]");
  }
  auto check_line = [&](auto cell_of) {
    std::optional<double> prev;
    for (int t = 1; t <= m_; ++t) {
      const auto& v = at(cell_of(t));
      if (!v) continue;
      if (prev && !(*prev < *v)) throw std::invalid_argument("grid rows and columns must be strictly increasing");
      prev = v;
    }
  };
  for (int i = 1; i <= m_; ++i) {
    check_line([i](int t) { return Cell{i, t}; });
    check_line([i](int t) { return Cell{t, i}; });
  }
}

std::size_t GridState::index(Cell c) const {
  if (c.row < 1 || c.row > m_ || c.col < 1 || c.col > m_) throw std::out_of_range("cell outside the grid");
  return static_cast<std::size_t>((c.row - 1) * m_ + (c.col - 1));
}

const std::optional<double>& GridState::at(Cell c) const { return cells_[index(c)]; }

int GridState::filled() const noexcept {
  return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [](const auto& v) { return v.has_value(); }));
}

void GridState::place(Cell c, double x) {
  if (at(c)) throw std::invalid_argument("cell already filled");
  if (std::any_of(cells_.begin(), cells_.end(), [x](const auto& v) { return v && *v == x; }))
    throw std::invalid_argument("value already on the grid");
  if (!induced_bounds_at(*this, c).admits(x)) throw std::invalid_argument("value violates the cell's induced bounds");
  cells_[index(c)] = x;
}

GridState GridState::with_placement(Cell c, double x) const {
  GridState copy = *this;
  copy.place(c, x);
  return copy;
}

// ---------------------------------------------------------------------------

namespace {

// lower[i][j]: max filled value over cells (i',j') <= (i,j); upper mirrors it.
struct BoundMaps {
  int m;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit BoundMaps(const GridState& s) : m(s.m()), lower(static_cast<std::size_t>(m * m)), upper(lower.size()) {
    auto idx = [this](int i, int j) { return static_cast<std::size_t>(i * m + j); };
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double v = 0.0;
        if (i > 0) v = std::max(v, lower[idx(i - 1, j)]);
        if (j > 0) v = std::max(v, lower[idx(i, j - 1)]);
        if (const auto& c = s.at({i + 1, j + 1})) v = std::max(v, *c);
        lower[idx(i, j)] = v;
      }
    }
    for (int i = m - 1; i >= 0; --i) {
      for (int j = m - 1; j >= 0; --j) {
        double v = 1.0;
        if (i + 1 < m) v = std::min(v, upper[idx(i + 1, j)]);
        if (j + 1 < m) v = std::min(v, upper[idx(i, j + 1)]);
        if (const auto& c = s.at({i + 1, j + 1})) v = std::min(v, *c);
        upper[idx(i, j)] = v;
      }
    }
  }

  // Bounds for cell (i,j) from its strict predecessors and successors.
  Interval at(int i, int j) const {
    auto idx = [this](int a, int b) { return static_cast<std::size_t>(a * m + b); };
    Interval out;
    if (i > 0) out.lower = std::max(out.lower, lower[idx(i - 1, j)]);
    if (j > 0) out.lower = std::max(out.lower, lower[idx(i, j - 1)]);
    if (i + 1 < m) out.upper = std::min(out.upper, upper[idx(i + 1, j)]);
    if (j + 1 < m) out.upper = std::min(out.upper, upper[idx(i, j + 1)]);
    return out;
  }
};

} // namespace

std::vector<CellBound> induced_bounds(const GridState& state) {
  const BoundMaps maps(state);
  std::vector<CellBound> out;
  for (int i = 0; i < state.m(); ++i) {
    for (int j = 0; j < state.m(); ++j) {
      if (state.at({i + 1, j + 1})) continue;
      out.push_back({Cell{i + 1, j + 1}, maps.at(i, j)});
    }
  }
  return out;
}

Interval induced_bounds_at(const GridState& state, Cell c) {
  (void)state.at(c); // range check
  return BoundMaps(state).at(c.row - 1, c.col - 1);
}

namespace {

// Greedy interval matching over intervals pre-sorted by lower bound: each
// value, in ascending order, takes the open interval that closes first.
bool match_sorted(std::span<const double> values, std::span<const Interval> by_lower) {
  std::priority_queue<double, std::vector<double>, std::greater<>> open_uppers;
  std::size_t next = 0;
  for (double x : values) {
    while (next < by_lower.size()) {
      const Interval& iv = by_lower[next];
      if (!(x > iv.lower || (iv.lower <= 0.0 && x >= 0.0))) break;
      open_uppers.push(iv.upper);
      ++next;
    }
    if (open_uppers.empty()) return false;
    const double u = open_uppers.top();
    // An interval that has closed can never be used by a later value.
    if (!(x < u || (u >= 1.0 && x <= 1.0))) return false;
    open_uppers.pop();
  }
  return true;
}

std::vector<Interval> sorted_by_lower(std::span<const Interval> bounds) {
  std::vector<Interval> v(bounds.begin(), bounds.end());
  std::stable_sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lower < b.lower; });
  return v;
}

} // namespace

bool feasible_assignment_exists(std::span<const double> values, std::span<const Interval> bounds) {
  if (values.size() != bounds.size()) throw std::invalid_argument("values and bounds differ in size");
  const auto by_lower = sorted_by_lower(bounds);
  if (std::is_sorted(values.begin(), values.end())) return match_sorted(values, by_lower);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return match_sorted(sorted, by_lower);
}

double placement_probability(const GridState& state, Cell cell, double x, const GridSampling& sampling) {
  if (state.at(cell)) return 0.0;
  const auto& cells = state.cells();
  if (std::any_of(cells.begin(), cells.end(), [x](const auto& v) { return v && *v == x; })) return 0.0;
  if (!induced_bounds_at(state, cell).admits(x)) return 0.0;
  const GridState next = state.with_placement(cell, x);
  std::vector<Interval> bounds;
  for (const CellBound& cb : induced_bounds(next)) {
    if (cb.bounds.empty()) return 0.0;
    bounds.push_back(cb.bounds);
  }
  if (bounds.empty()) return 1.0;
  if (sampling.samples < 1) throw std::invalid_argument("samples must be >= 1");

  const auto by_lower = sorted_by_lower(bounds);
  const std::size_t remaining = bounds.size();
  const auto total = sampling.samples;
  const auto chunks = static_cast<std::uint64_t>(std::clamp<std::uint64_t>(
      static_cast<std::uint64_t>(std::max(1, sampling.workers)), 1, total));
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(chunks), 0);
  auto body = [&](std::uint64_t c) {
    std::vector<double> draws(remaining);
    std::uint64_t local = 0;
    for (std::uint64_t s = total * c / chunks; s < total * (c + 1) / chunks; ++s) {
      SplitMix64 rng(stream_seed(sampling.seed, s));
      for (double& d : draws) d = rng.uniform();
      std::sort(draws.begin(), draws.end());
      if (match_sorted(draws, by_lower)) ++local;
    }
    hits[static_cast<std::size_t>(c)] = local;
  };
  if (chunks == 1) {
    body(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::uint64_t c = 0; c < chunks; ++c) threads.emplace_back(body, c);
  }
  std::uint64_t sum = 0;
  for (auto h : hits) sum += h;
  return static_cast<double>(sum) / static_cast<double>(total);
}

std::vector<GridRecommendation> grid_advise(const GridState& state, double x, const GridSampling& sampling) {
  std::vector<GridRecommendation> out;
  // A repeated value ends the game, as in the list variant.
  const auto& cells = state.cells();
  if (std::any_of(cells.begin(), cells.end(), [x](const auto& v) { return v && *v == x; })) return out;
  for (const CellBound& cb : induced_bounds(state)) {
    if (!cb.bounds.admits(x)) continue;
    out.push_back({cb.cell, placement_probability(state, cb.cell, x, sampling), 0});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GridRecommendation& a, const GridRecommendation& b) { return a.probability > b.probability; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

} // namespace blindseq
