#pragma once

// A live n-number game: placement validation, bins of empty slots, and
// per-slot scoring of the next draw.

#include <optional>
#include <vector>

#include "blindseq/prob_core.hpp"

namespace blindseq {

inline constexpr int kDrawRange = 1000;

// Midpoint map (raw + 0.5) / 1000 for a raw draw in 0..999.
double normalize_draw(int raw);
// Inverse of normalize_draw for values produced by it.
int raw_draw(double normalized);

// How the fit probability of a bin is measured in correct_so_far.
//  Continuous:       u - l on the normalized scale.
//  IntegerInclusive: number of integers in [l, u] divided by 1000, with the
//                    end bins running from 0 and up to 999. This is the
//                    convention that reproduces the published 20-game worked example.
enum class BinWidth { Continuous, IntegerInclusive };

struct Bin {
  int first_slot = 1; // 1-based
  int size = 0;
  double lower = 0.0;
  double upper = 1.0;
  bool at_bottom = false; // lower is the 0 sentinel
  bool at_top = false;    // upper is the 1 sentinel

  int last_slot() const { return first_slot + size - 1; }
  bool contains(double x) const {
    return (x > lower || (at_bottom && x >= lower)) && (x < upper || (at_top && x <= upper));
  }
  double width(BinWidth convention = BinWidth::Continuous) const;
};

class GameState {
public:
  explicit GameState(int n);
  // Throws std::invalid_argument if the slots are not strictly increasing,
  // hold values outside [0,1], or disagree with the history length.
  GameState(int n, std::vector<std::optional<double>> slots, std::vector<double> history);

  int n() const noexcept { return n_; }
  const std::vector<std::optional<double>>& slots() const noexcept { return slots_; }
  const std::vector<double>& history() const noexcept { return history_; }
  int filled() const noexcept { return static_cast<int>(history_.size()); }
  bool full() const noexcept { return filled() == n_; }

  // Places x in the 1-based slot; throws std::invalid_argument when the slot
  // is not feasible for x.
  void place(int slot, double x);
  GameState with_placement(int slot, double x) const;

private:
  int n_;
  std::vector<std::optional<double>> slots_;
  std::vector<double> history_;
};

std::vector<Bin> bins(const GameState& state);

// The bin whose interval holds x, if any.
std::optional<Bin> bin_containing(const GameState& state, double x);

// Empty slots of the bin containing x; empty means the draw eliminates.
std::vector<int> feasible_slots(const GameState& state, double x);

// Multinomial over bin sizes times the product of bin widths raised to
// their sizes.
double correct_so_far(const GameState& state, BinWidth convention = BinWidth::Continuous);

double win_prob_from_state(const GameState& state, const WinProbTable& probs,
                           BinWidth convention = BinWidth::Continuous);

struct SlotRecommendation {
  int slot = 0;
  double correct_so_far = 0.0;
  double win_prob = 0.0;
  int rank = 0;
};

enum class RankBy { WinProb, CorrectSoFar };

// Scores every feasible slot for x, ranked (rank 1 first). Ties go to the
// lower slot. Empty when x cannot be placed.
std::vector<SlotRecommendation> advise(const GameState& state, double x, const WinProbTable& probs,
                                       RankBy rank_by = RankBy::WinProb,
                                       BinWidth convention = BinWidth::Continuous);

// Slot chosen by a boundary table: x is rescaled into its bin and looked up
// in the row for the bin size. nullopt signals elimination.
std::optional<int> strategy_slot(const GameState& state, double x, const StrategyTable& strategy);

} // namespace blindseq
