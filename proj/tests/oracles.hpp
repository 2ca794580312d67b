#pragma once

// Test-only reference computations, deliberately independent of the
// library's evaluation paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 60) {
  auto step = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
                  int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
    return self(self, lo, mid, flo, flm, fmid, left, eps / 2, d - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, eps / 2, d - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return step(step, a, b, fa, fm, fb, whole, tol, depth);
}

// Gauss-Legendre rule on [a, b] with `points` nodes; exact for polynomials
// of degree < 2 * points. Nodes by Newton iteration in long double.
inline long double gauss_legendre(const std::function<long double(long double)>& f, long double a, long double b,
                                  int points) {
  const long double pi = 3.141592653589793238462643383279502884L;
  long double sum = 0.0L;
  for (int i = 1; i <= points; ++i) {
    long double z = std::cos(pi * (i - 0.25L) / (points + 0.5L));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = 0.0L;
      for (int j = 1; j <= points; ++j) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j - 1.0L) * z * p1 - (j - 1.0L) * p2) / j;
      }
      dp = points * (z * p0 - p1) / (z * z - 1.0L);
      const long double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - z * z) * dp * dp);
    const long double x = 0.5L * (b - a) * z + 0.5L * (b + a);
    sum += w * f(x);
  }
  return 0.5L * (b - a) * sum;
}

inline long double monomial_integral(long double a, long double b, int k, int n) {
  return gauss_legendre([k, n](long double x) { return std::pow(x, k - 1) * std::pow(1.0L - x, n - k); }, a, b,
                        n / 2 + 2);
}

// Brute-force interval matching: tries every permutation.
inline bool matching_by_permutation(std::vector<double> values, const std::vector<std::pair<double, double>>& bounds) {
  std::vector<std::size_t> perm(bounds.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < values.size() && ok; ++i) {
      const auto& [lo, hi] = bounds[perm[i]];
      ok = lo < values[i] && values[i] < hi;
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

} // namespace oracle
