#pragma once

#include <optional>
#include <vector>

#include "blindseq/game.hpp"
#include "blindseq/grid.hpp"

namespace fixture {

// 20-game with raw draws 130, 573, 761 in slots 3, 12, 16; next draw 170.
inline blindseq::GameState worked_game_state() {
  using blindseq::normalize_draw;
  std::vector<std::optional<double>> slots(20);
  slots[2] = normalize_draw(130);
  slots[11] = normalize_draw(573);
  slots[15] = normalize_draw(761);
  return blindseq::GameState(20, slots, {normalize_draw(130), normalize_draw(573), normalize_draw(761)});
}

inline constexpr int kWorkedNext = 170;

struct WorkedRow {
  int slot;
  double correct_so_far;
  double win_rt;
  double win_es;
};

inline const std::vector<WorkedRow>& worked_game_rows() {
  static const std::vector<WorkedRow> rows = {
      {4, 9.58e-3, 1.12e-4, 1.02e-4},   {5, 6.81e-3, 1.28e-4, 1.17e-4},   {6, 2.07e-3, 4.61e-5, 4.26e-5},
      {7, 3.51e-4, 8.37e-6, 7.74e-6},   {8, 3.56e-5, 8.50e-7, 7.85e-7},   {9, 2.17e-6, 4.81e-8, 4.46e-8},
      {10, 7.33e-8, 1.37e-9, 1.25e-9},  {11, 1.06e-9, 1.25e-11, 1.13e-11},
  };
  return rows;
}

// 5x5 grid with raw 130 at (2,1), 573 at (2,5), 761 at (3,5).
inline blindseq::GridState grid_example_state() {
  using blindseq::normalize_draw;
  std::vector<std::optional<double>> cells(25);
  cells[1 * 5 + 0] = normalize_draw(130);
  cells[1 * 5 + 4] = normalize_draw(573);
  cells[2 * 5 + 4] = normalize_draw(761);
  return blindseq::GridState(5, cells);
}

// Right-hand table of the grid figure: placement probabilities for 170.
// Negative marks a blank cell (filled or inadmissible).
inline constexpr double kGridExampleTable[5][5] = {
    {-1, 0.16, 0.34, 0.41, 0.35},
    {-1, 0.81, 0.32, 0.05, -1},
    {0.86, 0.15, 0, 0, -1},
    {0.48, 0.01, 0, 0, -1},
    {0.16, 0, 0, 0, -1},
};

} // namespace fixture
