#pragma once

// The m x m grid variant: rows and columns must both ascend. Advice uses a
// greedy metric, the probability that the numbers still to come can be
// matched to the empty cells' induced intervals.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace blindseq {

inline constexpr int kMaxGridSide = 16;

struct Cell {
  int row = 1; // 1-based
  int col = 1;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  // Open interval, except that the 0 and 1 sentinels are inclusive.
  bool admits(double x) const {
    return (x > lower || (lower <= 0.0 && x >= 0.0)) && (x < upper || (upper >= 1.0 && x <= 1.0));
  }
  bool empty() const { return !(lower < upper); }
};

struct CellBound {
  Cell cell;
  Interval bounds;
};

class GridState {
public:
  explicit GridState(int m);
  // Cells in row-major order. Throws std::invalid_argument if a row or a
  // column is not strictly increasing over its filled cells.
  GridState(int m, std::vector<std::optional<double>> cells);

  int m() const noexcept { return m_; }
  const std::optional<double>& at(Cell c) const;
  const std::vector<std::optional<double>>& cells() const noexcept { return cells_; }
  int filled() const noexcept;
  int empty_cells() const noexcept { return m_ * m_ - filled(); }
  bool full() const noexcept { return empty_cells() == 0; }

  // Throws std::invalid_argument unless the cell is empty and its induced
  // interval admits x.
  void place(Cell c, double x);
  GridState with_placement(Cell c, double x) const;

private:
  std::size_t index(Cell c) const;

  int m_;
  std::vector<std::optional<double>> cells_;
};

// Induced interval of every empty cell, row-major.
std::vector<CellBound> induced_bounds(const GridState& state);
Interval induced_bounds_at(const GridState& state, Cell c);

// True iff the values can be assigned one-to-one to intervals containing
// them. Throws std::invalid_argument when the sizes differ.
bool feasible_assignment_exists(std::span<const double> values, std::span<const Interval> bounds);

struct GridSampling {
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Monte Carlo estimate of the probability that the remaining draws fit the
// intervals induced after placing x at `cell`. 0 when x cannot go there.
double placement_probability(const GridState& state, Cell cell, double x, const GridSampling& sampling);

struct GridRecommendation {
  Cell cell;
  double probability = 0.0;
  int rank = 0;
};

// Every empty cell admitting x, ranked by placement probability (ties in
// row-major order). Empty when x fits nowhere.
std::vector<GridRecommendation> grid_advise(const GridState& state, double x, const GridSampling& sampling);

} // namespace blindseq
