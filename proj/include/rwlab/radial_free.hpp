#pragma once

// Radial birth-death reduction of the simple random walk on the free group
// F_k: mu^{*n} depends only on word length, so it is stored as an exact
// integer-count vector over distances 0..n with denominator (2k)^n.
// From distance d >= 1 the walk moves out with probability (2k-1)/(2k) and
// in with probability 1/(2k); from 0 it moves out with probability 1.

#include <vector>

#include "rwlab/common.hpp"
#include "rwlab/measure.hpp"

namespace rwlab {

class RadialFreeWalk {
 public:
  explicit RadialFreeWalk(int k) : k_(k) {
    if (k < 2) throw invariant_violation("RadialFreeWalk: k >= 2");
  }

  // Sphere size |{g : |g| = d}| = 2k (2k-1)^{d-1}.
  Integer sphere_size(int d) const {
    if (d == 0) return 1;
    return Integer(2 * k_) * ipow(2 * k_ - 1, static_cast<unsigned long>(d - 1));
  }

  // a_n = sum_d p_n(d)^2 / N_d for n = 1..n_max, exact.
  std::vector<Rational> return_series(int n_max) const {
    std::vector<Integer> c{1};  // counts over distance, denominator (2k)^n
    std::vector<Rational> a;
    const Integer up(2 * k_ - 1), full(2 * k_);
    for (int n = 1; n <= n_max; ++n) {
      std::vector<Integer> next(static_cast<std::size_t>(n) + 1, Integer(0));
      next[1] += c[0] * full;  // from 0: out with probability 1
      for (std::size_t d = 1; d < c.size(); ++d) {
        if (c[d] == 0) continue;
        next[d + 1] += c[d] * up;
        next[d - 1] += c[d];
      }
      c = std::move(next);
      // a_n = sum_d (c_d / (2k)^n)^2 / N_d
      Rational an(0);
      const Integer denom = ipow(2 * k_, static_cast<unsigned long>(n));
      for (std::size_t d = 0; d < c.size(); ++d) {
        if (c[d] == 0) continue;
        Rational term(c[d] * c[d], denom * denom * sphere_size(static_cast<int>(d)));
        term.canonicalize();
        an += term;
      }
      a.push_back(an);
    }
    return a;
  }

  // Distribution of mu^{*n} as a measure over word lengths (probabilities).
  std::vector<Rational> radial_distribution(int n) const {
    std::vector<Integer> c{1};
    const Integer up(2 * k_ - 1), full(2 * k_);
    for (int step = 1; step <= n; ++step) {
      std::vector<Integer> next(static_cast<std::size_t>(step) + 1, Integer(0));
      next[1] += c[0] * full;
      for (std::size_t d = 1; d < c.size(); ++d) {
        if (c[d] == 0) continue;
        next[d + 1] += c[d] * up;
        next[d - 1] += c[d];
      }
      c = std::move(next);
    }
    const Integer denom = ipow(2 * k_, static_cast<unsigned long>(n));
    std::vector<Rational> p;
    p.reserve(c.size());
    for (const auto& cd : c) {
      Rational r(cd, denom);
      r.canonicalize();
      p.push_back(r);
    }
    return p;
  }

 private:
  int k_;
};

}  // namespace rwlab
