#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "witsen/error.hpp"

namespace witsen {

// Compensated summation (Neumaier variant).
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double x)
  {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

// Sum over i of term(i) for i in [0, n), pairing i with n-1-i first.
// If term(n-1-i) == -term(i) bit-for-bit, the result negates exactly.
template <class F>
double mirrored_sum(int n, F&& term)
{
  double s = 0.0;
  for (int i = 0; i < n / 2; ++i)
    s += term(i) + term(n - 1 - i);
  if (n % 2 == 1)
    s += term(n / 2);
  return s;
}

// Root of f on [a, b] with f(a), f(b) of opposite sign (or zero).
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb, double xtol = 0.0)
{
  if (fa == 0.0)
    return a;
  if (fb == 0.0)
    return b;
  if ((fa > 0) == (fb > 0))
    throw NumericError("no sign change on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  std::uintmax_t iters = 200;
  auto tol = [xtol](double lo, double hi) {
    double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
    return std::abs(hi - lo) <= std::max(xtol, 4.0 * std::numeric_limits<double>::epsilon() * scale);
  };
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  double fl = f(r.first), fr = f(r.second);
  return std::abs(fl) <= std::abs(fr) ? r.first : r.second;
}

// Piecewise-linear interpolation with constant extrapolation; x strictly increasing.
inline double interp_linear(const std::vector<double>& x, const std::vector<double>& y, double t)
{
  if (t <= x.front())
    return y.front();
  if (t >= x.back())
    return y.back();
  auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t j = static_cast<std::size_t>(it - x.begin());
  double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + w * (y[j] - y[j - 1]);
}

inline std::vector<double> linspace(double a, double b, int n)
{
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i)
    v[i] = a + (b - a) * i / (n - 1);
  v.back() = b;
  return v;
}

} // namespace witsen
