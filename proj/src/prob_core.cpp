#include "blindseq/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blindseq {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::EqualSpacing: return "es";
    case StrategyKind::RiskTolerant: return "rt";
    case StrategyKind::Custom: return "custom";
  }
  return "custom";
}

StrategyKind parse_strategy_kind(std::string_view text) {
  if (text == "es" || text == "equal-spacing" || text == "EqualSpacing") return StrategyKind::EqualSpacing;
  if (text == "rt" || text == "risk-tolerant" || text == "RiskTolerant") return StrategyKind::RiskTolerant;
  if (text == "custom" || text == "Custom") return StrategyKind::Custom;
  throw std::invalid_argument("unknown strategy kind: " + std::string(text));
}

// ---------------------------------------------------------------------------
// StrategyTable / WinProbTable

StrategyTable::StrategyTable(StrategyKind kind, std::vector<std::vector<double>> rows)
    : kind_(kind), rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("strategy table needs at least one row");
  if (static_cast<int>(rows_.size()) > kMaxLength)
    throw std::invalid_argument("strategy table exceeds the maximum length " + std::to_string(kMaxLength));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    const std::size_t k = i + 1;
    if (r.size() != k + 1)
      throw std::invalid_argument("row " + std::to_string(k) + " must hold " + std::to_string(k + 1) + " boundaries");
    if (r.front() != 0.0 || r.back() != 1.0)
      throw std::invalid_argument("row " + std::to_string(k) + " must start at 0 and end at 1");
    for (std::size_t j = 1; j < r.size(); ++j) {
      if (!(r[j - 1] <= r[j]) || !std::isfinite(r[j]))
        throw std::invalid_argument("row " + std::to_string(k) + " is not nondecreasing");
    }
  }
}

std::span<const double> StrategyTable::row(int k) const {
  if (k < 1 || k > n_max()) throw std::out_of_range("strategy row " + std::to_string(k) + " out of range");
  return rows_[static_cast<std::size_t>(k - 1)];
}

int StrategyTable::slot_for(int k, double x) const {
  auto r = row(k);
  // Half-open bins [alpha_{j-1}, alpha_j).
  auto it = std::upper_bound(r.begin(), r.end(), x);
  int slot = static_cast<int>(it - r.begin());
  return std::clamp(slot, 1, k);
}

WinProbTable::WinProbTable(StrategyKind kind, std::vector<double> p) : kind_(kind), p_(std::move(p)) {
  if (p_.size() < 2) throw std::invalid_argument("win probability table needs p_0 and p_1");
  if (p_[0] != 1.0 || p_[1] != 1.0) throw std::invalid_argument("p_0 and p_1 must equal 1");
  for (std::size_t n = 2; n < p_.size(); ++n) {
    if (!(p_[n] > 0.0) || p_[n] > p_[n - 1] * (1.0 + 1e-12))
      throw std::invalid_argument("win probabilities must be positive and non-increasing (n=" + std::to_string(n) + ")");
  }
}

double WinProbTable::operator[](int n) const {
  if (n < 0 || n > n_max()) throw std::out_of_range("win probability index " + std::to_string(n) + " out of range");
  return p_[static_cast<std::size_t>(n)];
}

// ---------------------------------------------------------------------------
// Numerics

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c < 9.0e15 ? std::round(c) : c;
}

namespace {

double bernstein_term(int n, int j, double x) {
  return binomial(n, j) * std::pow(x, j) * std::pow(1.0 - x, n - j);
}

// P(Binomial(n, x) >= k)
double upper_tail(int n, int k, double x) {
  double s = 0.0;
  for (int j = n; j >= k; --j) s += bernstein_term(n, j, x);
  return s;
}

// P(Binomial(n, x) < k)
double lower_tail(int n, int k, double x) {
  double s = 0.0;
  for (int j = 0; j < k; ++j) s += bernstein_term(n, j, x);
  return s;
}

} // namespace

double beta_segment(double a, double b, int k, int n) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("beta_segment: slot must satisfy 1 <= k <= n");
  if (!(0.0 <= a && a <= b && b <= 1.0)) throw std::invalid_argument("beta_segment: need 0 <= a <= b <= 1");
  if (a == b) return 0.0;
  // n C(n-1,k-1) * integral_0^x = P(Bin(n,x) >= k); sum whichever tail is
  // the small one so the difference keeps its relative precision.
  const double mid = 0.5 * (a + b);
  double diff;
  if (k > n * mid) {
    diff = upper_tail(n, k, b) - upper_tail(n, k, a);
  } else {
    diff = lower_tail(n, k, a) - lower_tail(n, k, b);
  }
  return std::max(diff, 0.0) / (n * binomial(n - 1, k - 1));
}

StrategyTable equal_spacing_table(int n_max) {
  if (n_max < 1 || n_max > kMaxLength) throw std::invalid_argument("n_max out of range");
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(n_max));
  for (int k = 1; k <= n_max; ++k) {
    std::vector<double> r(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) r[static_cast<std::size_t>(j)] = static_cast<double>(j) / k;
    rows.push_back(std::move(r));
  }
  return StrategyTable(StrategyKind::EqualSpacing, std::move(rows));
}

double win_prob_for_row(std::span<const double> row, std::span<const double> p) {
  const int n = static_cast<int>(row.size()) - 1;
  if (n < 1 || static_cast<int>(p.size()) < n) throw std::invalid_argument("win_prob_for_row: inconsistent sizes");
  double total = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double lo = row[static_cast<std::size_t>(k - 1)];
    const double hi = row[static_cast<std::size_t>(k)];
    if (lo == hi) continue;
    total += binomial(n - 1, k - 1) * p[static_cast<std::size_t>(k - 1)] * p[static_cast<std::size_t>(n - k)] *
             beta_segment(lo, hi, k, n);
  }
  return total;
}

WinProbTable win_prob_table(const StrategyTable& strategy) {
  const int n_max = strategy.n_max();
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  p[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    p[static_cast<std::size_t>(n)] = win_prob_for_row(strategy.row(n), std::span(p).first(static_cast<std::size_t>(n)));
  }
  p[1] = 1.0;
  return WinProbTable(strategy.kind(), std::move(p));
}

std::pair<StrategyTable, WinProbTable> risk_tolerant_table(int n_max) {
  if (n_max < 1 || n_max > kMaxLength) throw std::invalid_argument("n_max out of range");
  std::vector<std::vector<double>> rows;
  std::vector<double> p{1.0, 1.0};
  rows.push_back({0.0, 1.0});
  for (int n = 2; n <= n_max; ++n) {
    std::vector<double> r(static_cast<std::size_t>(n) + 1);
    r.front() = 0.0;
    r.back() = 1.0;
    for (int k = 1; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const auto un = static_cast<std::size_t>(n);
      const double ratio = (p[uk] * p[un - uk - 1]) / (p[uk - 1] * p[un - uk]);
      r[uk] = 1.0 / (1.0 + ratio * (static_cast<double>(n) / k - 1.0));
    }
    p.push_back(win_prob_for_row(r, p));
    rows.push_back(std::move(r));
  }
  StrategyTable table(StrategyKind::RiskTolerant, std::move(rows));
  return {std::move(table), WinProbTable(StrategyKind::RiskTolerant, std::move(p))};
}

double correct_so_far_slot(int n, int k, double x) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("correct_so_far_slot: slot must satisfy 1 <= k <= n");
  if (!(0.0 <= x && x <= 1.0)) throw std::invalid_argument("correct_so_far_slot: x must lie in [0,1]");
  return binomial(n - 1, k - 1) * std::pow(x, k - 1) * std::pow(1.0 - x, n - k);
}

double slot_value(int n, int k, double x, const WinProbTable& probs) {
  if (n > probs.n_max()) throw std::out_of_range("slot_value: n exceeds the probability table");
  return probs[k - 1] * probs[n - k] * correct_so_far_slot(n, k, x);
}

double p3_of_alpha(double a) {
  return 11.0 / 6.0 * a * a * a - 3.5 * a * a + 1.5 * a + 1.0 / 3.0;
}

} // namespace blindseq
