#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "witsen/error.hpp"

namespace witsen {

struct Tread {
  double x_begin, x_end;
  double slope;     // least-squares slope over the tread samples
  double intercept;
};

struct StaircaseSummary {
  int steps = 0;                  // number of treads
  std::vector<Tread> treads;
  std::vector<double> jumps;      // value increase across each boundary
  std::vector<double> jump_at;    // midpoint of the boundary interval
  bool staircase = false;         // every jump > 10 x adjacent tread rise
  double line_rms_rel = 0.0;      // RMS deviation from best-fit line / RMS of values
  bool linear = false;            // line_rms_rel < 1%
};

namespace detail {

inline void fit_line(const std::vector<double>& x, const std::vector<double>& y, std::size_t b, std::size_t e,
                     double& slope, double& icpt)
{
  double n = static_cast<double>(e - b), sx = 0, sy = 0;
  for (std::size_t i = b; i < e; ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
  for (std::size_t i = b; i < e; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  slope = sxx > 0 ? sxy / sxx : 0.0;
  icpt = my - slope * mx;
}

} // namespace detail

// Samples must be on an increasing x grid. An increment counts as a jump when it
// exceeds jump_factor times the median absolute increment (plus a tiny floor).
inline StaircaseSummary detect_staircase(const std::vector<double>& x, const std::vector<double>& y,
                                         double jump_factor = 10.0)
{
  if (x.size() != y.size() || x.size() < 3)
    throw PreconditionError("detect_staircase needs >= 3 paired samples");
  const std::size_t n = x.size();
  std::vector<double> inc(n - 1);
  double range = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    inc[i] = y[i + 1] - y[i];
    range = std::max(range, std::abs(y[i]));
  }
  range = std::max(range, std::abs(y.back()));
  std::vector<double> mag(inc.size());
  for (std::size_t i = 0; i < inc.size(); ++i)
    mag[i] = std::abs(inc[i]);
  std::nth_element(mag.begin(), mag.begin() + mag.size() / 2, mag.end());
  double med = mag[mag.size() / 2];
  double thr = jump_factor * std::max(med, 1e-12 * std::max(range, 1e-300));

  StaircaseSummary s;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= inc.size(); ++i) {
    bool cut = i == inc.size() || std::abs(inc[i]) > thr;
    if (!cut)
      continue;
    Tread t{x[b], x[i], 0.0, y[b]};
    if (i > b)
      detail::fit_line(x, y, b, i + 1, t.slope, t.intercept);
    s.treads.push_back(t);
    if (i < inc.size()) {
      s.jumps.push_back(inc[i]);
      s.jump_at.push_back(0.5 * (x[i] + x[i + 1]));
    }
    b = i + 1;
  }
  s.steps = static_cast<int>(s.treads.size());

  s.staircase = s.steps > 1;
  for (std::size_t j = 0; j < s.jumps.size(); ++j) {
    for (const Tread* t : {&s.treads[j], &s.treads[j + 1]}) {
      double rise = std::abs(t->slope) * (t->x_end - t->x_begin);
      if (!(std::abs(s.jumps[j]) > 10.0 * rise))
        s.staircase = false;
    }
  }

  double slope, icpt;
  detail::fit_line(x, y, 0, n, slope, icpt);
  double ss = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (slope * x[i] + icpt);
    ss += r * r;
    sv += y[i] * y[i];
  }
  s.line_rms_rel = sv > 0 ? std::sqrt(ss / sv) : 0.0;
  s.linear = s.line_rms_rel < 0.01;
  return s;
}

} // namespace witsen
