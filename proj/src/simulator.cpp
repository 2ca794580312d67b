#include "blindseq/simulator.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace blindseq {

namespace {

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_config(const SimConfig& config) {
  if (config.n < 1) throw std::invalid_argument("simulation length must be >= 1");
  if (config.n > config.strategy.n_max()) throw std::invalid_argument("strategy table shorter than the game");
  if (config.games < 1) throw std::invalid_argument("games must be >= 1");
  if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");
}

// Runs `body(begin, end, partial)` over [0, count) split into contiguous
// chunks, one per worker, and returns the partials in chunk order.
template <typename Partial, typename Body>
std::vector<Partial> parallel_chunks(std::uint64_t count, int workers, const Partial& init, Body body) {
  const auto w = static_cast<std::uint64_t>(std::max(1, workers));
  const std::uint64_t chunks = std::min<std::uint64_t>(w, count);
  std::vector<Partial> partials(static_cast<std::size_t>(chunks), init);
  auto range = [&](std::uint64_t c) {
    return std::pair{count * c / chunks, count * (c + 1) / chunks};
  };
  if (chunks == 1) {
    body(0, count, partials[0]);
    return partials;
  }
  std::vector<std::jthread> threads;
  threads.reserve(static_cast<std::size_t>(chunks));
  for (std::uint64_t c = 0; c < chunks; ++c) {
    threads.emplace_back([&, c] {
      auto [b, e] = range(c);
      body(b, e, partials[static_cast<std::size_t>(c)]);
    });
  }
  threads.clear();
  return partials;
}

} // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix(mix(seed) ^ (index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t sub) noexcept {
  return stream_seed(stream_seed(seed, index), sub);
}

GameOutcome play_game(int n, const StrategyTable& strategy, SplitMix64& rng) {
  // Filled entries kept sorted by value; slots rise with value.
  struct Entry {
    double value;
    int slot; // 1-based
  };
  std::vector<Entry> filled;
  filled.reserve(static_cast<std::size_t>(n));
  for (int turn = 1; turn <= n; ++turn) {
    const double x = rng.uniform();
    auto it = std::lower_bound(filled.begin(), filled.end(), x,
                               [](const Entry& e, double v) { return e.value < v; });
    if (it != filled.end() && it->value == x) return {false, turn};
    const bool at_bottom = it == filled.begin();
    const bool at_top = it == filled.end();
    const double lower = at_bottom ? 0.0 : std::prev(it)->value;
    const double upper = at_top ? 1.0 : it->value;
    const int first = at_bottom ? 1 : std::prev(it)->slot + 1;
    const int last = at_top ? n : it->slot - 1;
    const int size = last - first + 1;
    if (size <= 0) return {false, turn};
    const double scaled = std::clamp((x - lower) / (upper - lower), 0.0, 1.0);
    const int slot = first + strategy.slot_for(size, scaled) - 1;
    filled.insert(it, Entry{x, slot});
  }
  return {true, n};
}

SimResult run(const SimConfig& config) {
  check_config(config);
  SimResult init;
  init.n = config.n;
  init.elimination_histogram.assign(static_cast<std::size_t>(config.n) + 1, 0);
  auto partials = parallel_chunks(config.games, config.workers, init,
                                  [&](std::uint64_t begin, std::uint64_t end, SimResult& part) {
                                    for (std::uint64_t g = begin; g < end; ++g) {
                                      SplitMix64 rng(stream_seed(config.seed, g));
                                      const GameOutcome o = play_game(config.n, config.strategy, rng);
                                      ++part.games;
                                      part.total_draws += static_cast<std::uint64_t>(o.draws);
                                      if (o.won)
                                        ++part.wins;
                                      else
                                        ++part.elimination_histogram[static_cast<std::size_t>(o.draws)];
                                    }
                                  });
  SimResult total = init;
  for (const SimResult& p : partials) {
    total.games += p.games;
    total.wins += p.wins;
    total.total_draws += p.total_draws;
    for (std::size_t k = 0; k < total.elimination_histogram.size(); ++k)
      total.elimination_histogram[k] += p.elimination_histogram[k];
  }
  return total;
}

double mean_elimination_turn(const SimResult& result) {
  std::uint64_t count = 0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < result.elimination_histogram.size(); ++k) {
    count += result.elimination_histogram[k];
    weighted += static_cast<double>(k) * static_cast<double>(result.elimination_histogram[k]);
  }
  if (count == 0) throw std::domain_error("mean elimination turn undefined: no losing games");
  return weighted / static_cast<double>(count);
}

double expected_draws_to_win(double p_n, double mean_elim, int n, DrawsFormula form) {
  const double multiplier = form == DrawsFormula::Published ? 1.0 / p_n + 1.0 : 1.0 / p_n - 1.0;
  return n + multiplier * mean_elim;
}

double empirical_draws_to_win(const SimConfig& config, std::uint64_t trials) {
  check_config(config);
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  auto partials = parallel_chunks(trials, config.workers, std::uint64_t{0},
                                  [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& draws) {
                                    for (std::uint64_t t = begin; t < end; ++t) {
                                      for (std::uint64_t g = 0;; ++g) {
                                        SplitMix64 rng(stream_seed(config.seed, t, g));
                                        const GameOutcome o = play_game(config.n, config.strategy, rng);
                                        draws += static_cast<std::uint64_t>(o.draws);
                                        if (o.won) break;
                                      }
                                    }
                                  });
  std::uint64_t total = 0;
  for (auto d : partials) total += d;
  return static_cast<double>(total) / static_cast<double>(trials);
}

} // namespace blindseq
