#include "blindseq/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blindseq {

double normalize_draw(int raw) {
  if (raw < 0 || raw >= kDrawRange)
    throw std::out_of_range("draw " + std::to_string(raw) + " outside 0..999");
  return (raw + 0.5) / kDrawRange;
}

int raw_draw(double normalized) {
  const long r = std::lround(normalized * kDrawRange - 0.5);
  return static_cast<int>(std::clamp(r, 0L, static_cast<long>(kDrawRange - 1)));
}

double Bin::width(BinWidth convention) const {
  if (convention == BinWidth::Continuous) return std::max(upper - lower, 0.0);
  const int lo = at_bottom ? 0 : raw_draw(lower);
  const int hi = at_top ? kDrawRange - 1 : raw_draw(upper);
  return std::max(hi - lo + 1, 0) / static_cast<double>(kDrawRange);
}

// ---------------------------------------------------------------------------

GameState::GameState(int n) : n_(n) {
  if (n < 1 || n > kMaxLength) throw std::invalid_argument("game length out of range");
  slots_.assign(static_cast<std::size_t>(n), std::nullopt);
}

GameState::GameState(int n, std::vector<std::optional<double>> slots, std::vector<double> history)
    : n_(n), slots_(std::move(slots)), history_(std::move(history)) {
  if (n < 1 || n > kMaxLength) throw std::invalid_argument("game length out of range");
  if (static_cast<int>(slots_.size()) != n) throw std::invalid_argument("slot count does not match n");
  std::optional<double> prev;
  int count = 0;
  for (const auto& s : slots_) {
    if (!s) continue;
    if (!(*s >= 0.0 && *s <= 1.0)) throw std::invalid_argument("slot value outside [0,1]");
    if (prev && !(*prev < *s)) throw std::invalid_argument("filled slots must be strictly increasing");
    prev = s;
    ++count;
  }
  if (count != static_cast<int>(history_.size()))
    throw std::invalid_argument("history length must equal the number of filled slots");
  for (double h : history_) {
    if (std::none_of(slots_.begin(), slots_.end(), [h](const auto& s) { return s && *s == h; }))
      throw std::invalid_argument("history value not present in the slots");
  }
}

void GameState::place(int slot, double x) {
  const auto feasible = feasible_slots(*this, x);
  if (std::find(feasible.begin(), feasible.end(), slot) == feasible.end())
    throw std::invalid_argument("slot " + std::to_string(slot) + " is not feasible for this draw");
  slots_[static_cast<std::size_t>(slot - 1)] = x;
  history_.push_back(x);
}

GameState GameState::with_placement(int slot, double x) const {
  GameState copy = *this;
  copy.place(slot, x);
  return copy;
}

// ---------------------------------------------------------------------------

std::vector<Bin> bins(const GameState& state) {
  std::vector<Bin> out;
  const auto& slots = state.slots();
  const int n = state.n();
  int i = 0;
  while (i < n) {
    if (slots[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && !slots[static_cast<std::size_t>(j)]) ++j;
    Bin b;
    b.first_slot = i + 1;
    b.size = j - i;
    b.at_bottom = i == 0;
    b.at_top = j == n;
    b.lower = b.at_bottom ? 0.0 : *slots[static_cast<std::size_t>(i - 1)];
    b.upper = b.at_top ? 1.0 : *slots[static_cast<std::size_t>(j)];
    out.push_back(b);
    i = j;
  }
  return out;
}

std::optional<Bin> bin_containing(const GameState& state, double x) {
  for (const Bin& b : bins(state)) {
    if (b.contains(x)) return b;
  }
  return std::nullopt;
}

std::vector<int> feasible_slots(const GameState& state, double x) {
  std::vector<int> out;
  if (auto b = bin_containing(state, x)) {
    for (int s = b->first_slot; s <= b->last_slot(); ++s) out.push_back(s);
  }
  return out;
}

double correct_so_far(const GameState& state, BinWidth convention) {
  // log-space: the multinomial overflows a double past ~170 empty slots.
  double log_value = 0.0;
  int total = 0;
  for (const Bin& b : bins(state)) {
    const double w = b.width(convention);
    if (w <= 0.0) return 0.0;
    log_value += b.size * std::log(w) - std::lgamma(b.size + 1.0);
    total += b.size;
  }
  if (total == 0) return 1.0;
  return std::exp(log_value + std::lgamma(total + 1.0));
}

double win_prob_from_state(const GameState& state, const WinProbTable& probs, BinWidth convention) {
  double value = correct_so_far(state, convention);
  for (const Bin& b : bins(state)) value *= probs[b.size];
  return value;
}

std::vector<SlotRecommendation> advise(const GameState& state, double x, const WinProbTable& probs,
                                       RankBy rank_by, BinWidth convention) {
  std::vector<SlotRecommendation> recs;
  for (int slot : feasible_slots(state, x)) {
    const GameState next = state.with_placement(slot, x);
    SlotRecommendation r;
    r.slot = slot;
    r.correct_so_far = correct_so_far(next, convention);
    r.win_prob = r.correct_so_far;
    for (const Bin& b : bins(next)) r.win_prob *= probs[b.size];
    recs.push_back(r);
  }
  auto key = [rank_by](const SlotRecommendation& r) {
    return rank_by == RankBy::WinProb ? r.win_prob : r.correct_so_far;
  };
  std::stable_sort(recs.begin(), recs.end(),
                   [&](const SlotRecommendation& a, const SlotRecommendation& b) { return key(a) > key(b); });
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].rank = static_cast<int>(i) + 1;
  return recs;
}

std::optional<int> strategy_slot(const GameState& state, double x, const StrategyTable& strategy) {
  auto b = bin_containing(state, x);
  if (!b) return std::nullopt;
  const double scaled = std::clamp((x - b->lower) / (b->upper - b->lower), 0.0, 1.0);
  return b->first_slot + strategy.slot_for(b->size, scaled) - 1;
}

} // namespace blindseq
