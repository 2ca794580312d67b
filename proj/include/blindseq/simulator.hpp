#pragma once

// Seeded Monte Carlo play of the n-number game under a boundary table.
//
// Every game draws from its own stream derived from (seed, game index), so
// a run's result depends only on its configuration and never on how the
// games were split across worker threads.

#include <cstdint>
#include <vector>

#include "blindseq/prob_core.hpp"

namespace blindseq {

// SplitMix64. Small, fast, and good enough for uniform draws; each game
// gets an independent seed through stream_seed().
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t sub) noexcept;

struct SimConfig {
  int n = 20;
  StrategyTable strategy = equal_spacing_table(20);
  std::uint64_t games = 100'000;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct SimResult {
  int n = 0;
  std::uint64_t games = 0;
  std::uint64_t wins = 0;
  // Index k counts losing games eliminated on draw k; index 0 is unused.
  std::vector<std::uint64_t> elimination_histogram;
  std::uint64_t total_draws = 0;

  std::uint64_t losses() const noexcept { return games - wins; }
  double win_rate() const noexcept { return games ? static_cast<double>(wins) / static_cast<double>(games) : 0.0; }

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

struct GameOutcome {
  bool won = false;
  int draws = 0; // draws consumed, including the eliminating one
};

// One game from a fixed stream.
GameOutcome play_game(int n, const StrategyTable& strategy, SplitMix64& rng);

// Throws std::invalid_argument on games < 1, workers < 1, or a strategy
// shorter than n.
SimResult run(const SimConfig& config);

// Mean elimination turn over losing games; std::domain_error if none lost.
double mean_elimination_turn(const SimResult& result);

enum class DrawsFormula {
  Published, // n + (1/p + 1) E(f)
  Geometric, // n + (1/p - 1) E(f): expected failures before the first win
};

double expected_draws_to_win(double p_n, double mean_elim, int n, DrawsFormula form = DrawsFormula::Published);

// Mean total draws over `trials` independent play-until-first-win sessions.
double empirical_draws_to_win(const SimConfig& config, std::uint64_t trials);

} // namespace blindseq
