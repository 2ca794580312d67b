#pragma once

// Exact win-probability machinery for the n-number game: strategy tables,
// the recursive win-probability table, slot-value functions and the
// optimal (risk-tolerant) boundaries.

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace blindseq {

inline constexpr int kDefaultMaxLength = 64;
inline constexpr int kMaxLength = 256;

enum class StrategyKind { EqualSpacing, RiskTolerant, Custom };

std::string_view to_string(StrategyKind kind);
// Accepts "es"/"rt"/"custom" as well as the long names.
StrategyKind parse_strategy_kind(std::string_view text);

// Per-length decision boundaries. Row k (1 <= k <= n_max) holds
// alpha_{k,0..k}; a value x in [alpha_{k,j-1}, alpha_{k,j}) goes to slot j.
class StrategyTable {
public:
  // Validates every row; throws std::invalid_argument on a malformed table.
  StrategyTable(StrategyKind kind, std::vector<std::vector<double>> rows);

  StrategyKind kind() const noexcept { return kind_; }
  int n_max() const noexcept { return static_cast<int>(rows_.size()); }

  // Row for list length k, alpha_{k,0} .. alpha_{k,k}.
  std::span<const double> row(int k) const;
  double boundary(int k, int j) const { return row(k)[static_cast<std::size_t>(j)]; }

  // Slot (1..k) chosen for a value x in [0,1] on an empty list of length k.
  int slot_for(int k, double x) const;

  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

private:
  StrategyKind kind_;
  std::vector<std::vector<double>> rows_;
};

class WinProbTable {
public:
  // p[0] and p[1] must be 1 and the sequence must be non-increasing.
  WinProbTable(StrategyKind kind, std::vector<double> p);

  StrategyKind kind() const noexcept { return kind_; }
  int n_max() const noexcept { return static_cast<int>(p_.size()) - 1; }
  double operator[](int n) const;
  std::span<const double> values() const noexcept { return p_; }

private:
  StrategyKind kind_;
  std::vector<double> p_;
};

// Binomial coefficient as a double; exact for results below 2^53.
double binomial(int n, int k);

// Integral of x^{k-1} (1-x)^{n-k} over [a, b], evaluated through the
// Bernstein-sum form of the regularized incomplete Beta function.
double beta_segment(double a, double b, int k, int n);

StrategyTable equal_spacing_table(int n_max);

// Throws std::invalid_argument when the table has fewer than 1 row or more
// than kMaxLength rows.
WinProbTable win_prob_table(const StrategyTable& strategy);

// Win probability of a length-n game whose first placement uses `row`
// (alpha_{n,0..n}) and whose continuation probabilities are p[0..n-1].
double win_prob_for_row(std::span<const double> row, std::span<const double> p);

// Interleaved dynamic program: row n from the equalization condition on
// p_0..p_{n-1}, then p_n from that row.
std::pair<StrategyTable, WinProbTable> risk_tolerant_table(int n_max);

// f_{n,k}(x) = C(n-1,k-1) p_{k-1} p_{n-k} x^{k-1} (1-x)^{n-k}.
double slot_value(int n, int k, double x, const WinProbTable& probs);

// C(n-1,k-1) x^{k-1} (1-x)^{n-k}: probability that the first number x of
// an n-game is correctly placed in slot k.
double correct_so_far_slot(int n, int k, double x);

// p_3 for the symmetric 3-strategy with boundaries (alpha, 1 - alpha).
double p3_of_alpha(double alpha);

} // namespace blindseq
