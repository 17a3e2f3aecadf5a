#pragma once

// Diagnostics on return-probability series: ratio/log-convexity checks,
// operator-norm estimates, decay-law fitting and the two-sided stability
// comparison up to multiplicative constants in value and time scale.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rwlab/common.hpp"
#include "rwlab/measure.hpp"

namespace rwlab {

template <class S>
struct SpectralDiagnostics {
  std::vector<S> ratios;          // r_n = a_{n+1}/a_n
  S norm_squared_estimate;        // last ratio
  double richardson_estimate;     // one-step 1/n extrapolation of the ratios
  bool ratios_in_unit_interval = true;
  bool ratios_nondecreasing = true;
  bool log_convex = true;
};

// Ratio positivity/monotonicity and a_n^2 <= a_{n-1} a_{n+1} are theorems;
// a violation beyond the mode tolerance signals an arithmetic bug.
template <class S>
SpectralDiagnostics<S> we_spectral_diagnostics(const ReturnSeries<S>& s, bool throw_on_violation = true) {
  if (s.size() < 3) throw invariant_violation("we_spectral_diagnostics: need series length >= 3");
  const double tol = std::is_same_v<S, double> ? 1e-9 : 0.0;
  SpectralDiagnostics<S> d;
  for (std::size_t n = 0; n + 1 < s.size(); ++n) {
    d.ratios.push_back(s.a[n + 1] / s.a[n]);
    const double r = to_double(d.ratios.back());
    if (!(r > 0.0 && r <= 1.0 + tol)) d.ratios_in_unit_interval = false;
    if (n > 0 && to_double(d.ratios[n]) < to_double(d.ratios[n - 1]) - tol) d.ratios_nondecreasing = false;
  }
  for (std::size_t n = 1; n + 1 < s.size(); ++n) {
    if constexpr (std::is_same_v<S, double>) {
      if (s.a[n] * s.a[n] > s.a[n - 1] * s.a[n + 1] * (1.0 + tol)) d.log_convex = false;
    } else {
      if (s.a[n] * s.a[n] > s.a[n - 1] * s.a[n + 1]) d.log_convex = false;
    }
  }
  d.norm_squared_estimate = d.ratios.back();
  const std::size_t m = d.ratios.size();
  d.richardson_estimate =
      m >= 2 ? static_cast<double>(m) * to_double(d.ratios[m - 1]) -
                   static_cast<double>(m - 1) * to_double(d.ratios[m - 2])
             : to_double(d.ratios.back());
  if (throw_on_violation && !(d.ratios_in_unit_interval && d.ratios_nondecreasing && d.log_convex))
    throw invariant_violation("we_spectral_diagnostics: Lemma-1 invariant violated (arithmetic bug)");
  return d;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms residual
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

struct DecayFit {
  double poly_exponent = 0.0;        // a_n ~ n^{-alpha}
  double poly_residual = 0.0;
  double stretched_exponent = 0.0;   // a_n ~ exp(-c n^gamma)
  double stretched_residual = 0.0;
  double exp_rate = 0.0;             // a_n ~ exp(-rho n)
  double exp_residual = 0.0;
  std::string best;                  // "polynomial" | "stretched" | "exponential"
};

// Three decay-law fits over a window [lo, hi] of 1-based indices.
inline DecayFit we_decay_fit(const std::vector<double>& a, std::size_t lo, std::size_t hi) {
  if (lo < 1 || hi > a.size() || hi - lo + 1 < 5)
    throw invariant_violation("we_decay_fit: window too short (need >= 5 points)");
  std::vector<double> n, log_n, log_a, loglog;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (!(a[i - 1] > 0)) throw invariant_violation("we_decay_fit: nonpositive a_n");
    n.push_back(static_cast<double>(i));
    log_n.push_back(std::log(static_cast<double>(i)));
    log_a.push_back(std::log(a[i - 1]));
    loglog.push_back(std::log(-std::log(a[i - 1])));
  }
  DecayFit fit;
  auto poly = least_squares(log_n, log_a);
  fit.poly_exponent = -poly.slope;
  fit.poly_residual = poly.residual;
  auto stretched = least_squares(log_n, loglog);
  fit.stretched_exponent = stretched.slope;
  fit.stretched_residual = stretched.residual;
  auto expo = least_squares(n, log_a);
  fit.exp_rate = -expo.slope;
  fit.exp_residual = expo.residual;
  fit.best = "polynomial";
  double best = fit.poly_residual;
  if (fit.stretched_residual < best) {
    best = fit.stretched_residual;
    fit.best = "stretched";
  }
  if (fit.exp_residual < best) fit.best = "exponential";
  return fit;
}

struct StabilityDirection {
  bool found = false;
  double a = 0.0;
  int b = 1;
  int r = 0;  // indices n > r were required to satisfy the bound
};

struct StabilityReport {
  StabilityDirection forward;   // s1(n) <= a s2(ceil(n/b))
  StabilityDirection backward;  // s2(n) <= a s1(ceil(n/b))
  int b_max = 8;
  double a_cap = 1e6;
};

namespace detail {

inline StabilityDirection stability_one_direction(const std::vector<double>& s1, const std::vector<double>& s2,
                                                  int b_max, double a_cap) {
  StabilityDirection best;
  const std::size_t n1 = s1.size(), n2 = s2.size();
  const std::size_t r_max = n1 / 3;
  for (int b = 1; b <= b_max; ++b) {
    for (std::size_t r = 0; r <= r_max; ++r) {
      double need = 0.0;
      bool usable = false;
      for (std::size_t n = r + 1; n <= n1; ++n) {
        const std::size_t m = (n + static_cast<std::size_t>(b) - 1) / static_cast<std::size_t>(b);
        if (m > n2) break;
        usable = true;
        need = std::max(need, s1[n - 1] / s2[m - 1]);
      }
      if (usable && need <= a_cap && (!best.found || need < best.a)) {
        best.found = true;
        best.a = need;
        best.b = b;
        best.r = static_cast<int>(r);
      }
    }
    // prefer the smallest time rescaling that works; a is minimized within it
    if (best.found) break;
  }
  return best;
}

}  // namespace detail

// Grid search for the constants realizing each direction of the <~ relation.
inline StabilityReport we_stability_compare(const std::vector<double>& s1, const std::vector<double>& s2,
                                            int b_max = 8, double a_cap = 1e6) {
  StabilityReport rep;
  rep.b_max = b_max;
  rep.a_cap = a_cap;
  rep.forward = detail::stability_one_direction(s1, s2, b_max, a_cap);
  rep.backward = detail::stability_one_direction(s2, s1, b_max, a_cap);
  return rep;
}

template <class S>
std::vector<double> to_doubles(const std::vector<S>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

}  // namespace rwlab
