#pragma once

// Finitely supported symmetric probability measures as sparse maps, their
// convolution powers, return-probability series, right convolution and
// Dirichlet forms, in exact-rational or float arithmetic.

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwlab/common.hpp"
#include "rwlab/groups.hpp"

namespace rwlab {

template <class S>
using SparseFunc = std::unordered_map<Elem, S, ElemHash>;

inline constexpr double kFloatPruneThreshold = 1e-18;
inline constexpr double kFloatDriftBudget = 1e-9;

template <class S>
struct Measure {
  GroupDesc group;
  SparseFunc<S> support;
  double dropped_mass = 0.0;  // float mode: pruned atoms, tracked

  S mass() const {
    S total = S(0);
    for (const auto& [e, p] : support) total += p;
    return total;
  }

  bool is_symmetric(const Group& g) const {
    for (const auto& [e, p] : support) {
      auto it = support.find(g.inverse(e));
      if (it == support.end() || !(it->second == p)) return false;
    }
    return true;
  }

  std::string fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::vector<std::string> rows;
    for (const auto& [e, p] : support) {
      std::ostringstream os;
      for (auto v : e.d) os << v << ",";
      os << "=" << p;
      rows.push_back(os.str());
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& r : rows)
      for (char c : r) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
      }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
  }

  static Measure uniform_on(const Group& g, const std::vector<Elem>& elems) {
    if (elems.empty()) throw invariant_violation("measure: empty support");
    Measure m{g.desc(), {}, 0.0};
    const S w = S(1) / S(static_cast<int>(elems.size()));
    for (const auto& e : elems) m.support[e] = w;
    if (m.support.size() != elems.size()) throw invariant_violation("measure: duplicate support points");
    return m;
  }

  // Uniform on the standard symmetric generators.
  static Measure srw(const Group& g) { return uniform_on(g, GeneratingSet::standard(g).elems); }

  // Holding probability p0 at e, the rest split evenly over the generators.
  static Measure lazy(const Group& g, const S& p0) {
    auto gens = GeneratingSet::standard(g).elems;
    Measure m{g.desc(), {}, 0.0};
    m.support[g.identity()] = p0;
    const S w = (S(1) - p0) / S(static_cast<int>(gens.size()));
    for (const auto& e : gens) m.support[e] = w;
    return m;
  }

  static Measure uniform_ball(const Group& g, int radius) {
    std::vector<Elem> elems;
    for (const auto& [e, d] : gc_ball(g, GeneratingSet::standard(g), radius)) elems.push_back(e);
    return uniform_on(g, elems);
  }
};

namespace detail {

template <class S>
void prune(Measure<S>& m) {
  if constexpr (std::is_same_v<S, double>) {
    for (auto it = m.support.begin(); it != m.support.end();)
      if (std::abs(it->second) < kFloatPruneThreshold) {
        m.dropped_mass += it->second;
        it = m.support.erase(it);
      } else {
        ++it;
      }
  }
}

}  // namespace detail

// (mu * nu)(x) = sum_y mu(x y^-1) nu(y); mass preserved up to tracked pruning.
template <class S>
Measure<S> we_convolve(const Group& g, const Measure<S>& mu, const Measure<S>& nu) {
  if (!(mu.group == g.desc()) || !(nu.group == g.desc()))
    throw invariant_violation("we_convolve: group mismatch");
  Measure<S> out{g.desc(), {}, mu.dropped_mass + nu.dropped_mass};
  out.support.reserve(mu.support.size() * 2);
  for (const auto& [u, pu] : mu.support)
    for (const auto& [y, py] : nu.support) out.support[g.op(u, y)] += pu * py;
  detail::prune(out);
  return out;
}

// (R_mu f)(x) = sum_y f(x y^-1) mu(y).
template <class S>
SparseFunc<S> we_right_convolve(const Group& g, const SparseFunc<S>& f, const Measure<S>& mu) {
  SparseFunc<S> out;
  for (const auto& [x, fx] : f)
    for (const auto& [y, py] : mu.support) out[g.op(x, y)] += fx * py;  // x = (xy)(y)^-1 ranges over all xy
  return out;
}

template <class S>
struct ReturnSeries {
  GroupDesc group;
  std::string measure_fingerprint;
  std::vector<S> a;  // a[n-1] = a_n = mu^{*2n}(e), n = 1..N
  std::size_t max_support = 0;

  std::size_t size() const { return a.size(); }
};

// a_n = sum_x mu^{*n}(x)^2: the ||F^{*n}||_2^2 identity, never forming mu^{*2n}.
template <class S>
ReturnSeries<S> we_return_series(const Group& g, const Measure<S>& mu, int n_max,
                                 std::size_t element_budget = 50'000'000) {
  if (!mu.is_symmetric(g)) throw invariant_violation("we_return_series: measure must be symmetric");
  ReturnSeries<S> s{g.desc(), mu.fingerprint(), {}, 0};
  Measure<S> nu = mu;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) nu = we_convolve(g, nu, mu);
    if (nu.support.size() > element_budget)
      throw invariant_violation("we_return_series: support budget exceeded at n=" + std::to_string(n));
    s.max_support = std::max(s.max_support, nu.support.size());
    S an = S(0);
    for (const auto& [x, p] : nu.support) an += p * p;
    s.a.push_back(an);
    if constexpr (std::is_same_v<S, double>) {
      if (std::abs(nu.dropped_mass) > kFloatDriftBudget)
        throw invariant_violation("we_return_series: float mass drift exceeded budget");
    }
  }
  return s;
}

// Both Dirichlet evaluations: (f|f) - (R_mu f|f) and the half double sum.
template <class S>
struct DirichletValues {
  S quadratic_form;
  S double_sum;
  S difference() const { return quadratic_form - double_sum; }
};

template <class S>
DirichletValues<S> we_dirichlet_form(const Group& g, const SparseFunc<S>& f, const Measure<S>& mu) {
  if (!mu.is_symmetric(g)) throw invariant_violation("we_dirichlet_form: measure must be symmetric");
  S ff = S(0);
  for (const auto& [x, fx] : f) ff += fx * fx;
  auto rf = we_right_convolve(g, f, mu);
  S rff = S(0);
  for (const auto& [x, v] : rf) {
    auto it = f.find(x);
    if (it != f.end()) rff += v * it->second;
  }
  // half double sum over x where f(x) or f(xy) is nonzero
  auto value = [&f](const Elem& x) {
    auto it = f.find(x);
    return it == f.end() ? S(0) : it->second;
  };
  std::unordered_map<Elem, bool, ElemHash> xs;
  for (const auto& [x, fx] : f) xs[x] = true;
  for (const auto& [x, fx] : f)
    for (const auto& [y, py] : mu.support) xs[g.op(x, g.inverse(y))] = true;
  S dsum = S(0);
  for (const auto& [x, unused] : xs) {
    const S fx = value(x);
    for (const auto& [y, py] : mu.support) {
      const S d = fx - value(g.op(x, y));
      dsum += d * d * py;
    }
  }
  dsum /= S(2);
  return DirichletValues<S>{ff - rff, dsum};
}

// Prop-4-style comparison constant C = 4 M2 / (r |U|) with
// r = inf_{U^2} F2 and M2 the second moment of F1 in the U word metric.
template <class S>
struct ComparisonReport {
  S r_min;        // min of F2 over U*U
  S moment2;      // sum |s|_U^2 F1(s)
  S constant;     // 4 * moment2 / (r_min * |U|)
  int violations = 0;
  int checked = 0;
};

template <class S>
ComparisonReport<S> we_comparison_constant(const Group& g, const Measure<S>& f1, const Measure<S>& f2,
                                           const GeneratingSet& u, int radius_cap = 64) {
  if (!f1.is_symmetric(g) || !f2.is_symmetric(g))
    throw invariant_violation("we_comparison_constant: measures must be symmetric");
  // product set U*U
  std::unordered_map<Elem, bool, ElemHash> u2;
  for (const auto& a : u.elems)
    for (const auto& b : u.elems) u2[g.op(a, b)] = true;
  bool have = false;
  S r = S(0);
  for (const auto& [e, unused] : u2) {
    auto it = f2.support.find(e);
    if (it == f2.support.end())
      throw invariant_violation("we_comparison_constant: F2 vanishes on U^2, hypothesis inf F2 > 0 fails");
    if (!have || it->second < r) {
      r = it->second;
      have = true;
    }
  }
  S m2 = S(0);
  for (const auto& [e, p] : f1.support) {
    if (g.is_identity(e)) continue;
    const long len = gc_word_length(g, e, u, radius_cap);
    m2 += S(static_cast<int>(len * len)) * p;
  }
  ComparisonReport<S> rep;
  rep.r_min = r;
  rep.moment2 = m2;
  rep.constant = S(4) * m2 / (r * S(static_cast<int>(u.elems.size())));
  return rep;
}

// Empirical side of Prop 4: eps_{F1}(f) <= C eps_{F2}(f) on the given test functions.
template <class S>
void we_comparison_verify(const Group& g, const Measure<S>& f1, const Measure<S>& f2,
                          ComparisonReport<S>& rep, const std::vector<SparseFunc<S>>& test_functions) {
  for (const auto& f : test_functions) {
    const S e1 = we_dirichlet_form(g, f, f1).quadratic_form;
    const S e2 = we_dirichlet_form(g, f, f2).quadratic_form;
    ++rep.checked;
    if (e1 > rep.constant * e2) ++rep.violations;
  }
}

// Random finitely supported test function within the given word radius.
template <class S>
SparseFunc<S> random_test_function(const Group& g, int radius, int atoms, Rng& rng) {
  auto ball = gc_ball(g, GeneratingSet::standard(g), radius);
  std::vector<Elem> elems;
  for (const auto& [e, d] : ball) elems.push_back(e);
  std::sort(elems.begin(), elems.end(), [](const Elem& a, const Elem& b) { return a.d < b.d; });
  std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 9);
  SparseFunc<S> f;
  for (int i = 0; i < atoms; ++i) {
    int n = num(rng);
    if (n == 0) n = 1;
    if constexpr (std::is_same_v<S, Rational>)
      f[elems[pick(rng)]] = rational_from(n, den(rng));
    else
      f[elems[pick(rng)]] = static_cast<double>(n) / den(rng);
  }
  return f;
}

}  // namespace rwlab
