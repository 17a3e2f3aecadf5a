#pragma once

// The solvable matrix group over K = F_q((t)): triples (a, x, y) realizing
// [[a,0,x],[0,a^-1,y],[0,0,1]], Haar-uniform step sampling on the compact
// generating set V, the box family Omega_n, the confinement argument and
// the exp(-t^{1/3}) lower-bound pipeline via exact DP on the projected walk.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#if defined(__PCLMUL__)
#include <wmmintrin.h>
#endif

#include "rwlab/common.hpp"
#include "rwlab/laurent.hpp"

namespace rwlab {

struct SolElement {
  LaurentNumber a, x, y;

  static SolElement identity(const LaurentField& f) { return {f.one(), f.zero(), f.zero()}; }
};

// (a1,x1,y1)(a2,x2,y2) = (a1 a2, a1 x2 + x1, a1^-1 y2 + y1).
inline SolElement ss_multiply(const SolElement& g, const SolElement& h) {
  if (g.a.is_precision_zero() || h.a.is_precision_zero())
    throw invariant_violation("ss_multiply: precision-zero a-coordinate");
  return {lf_mul(g.a, h.a), lf_add(lf_mul(g.a, h.x), g.x), lf_add(lf_mul(lf_inv(g.a), h.y), g.y)};
}

inline SolElement ss_inverse(const SolElement& g) {
  if (g.a.is_precision_zero()) throw invariant_violation("ss_inverse: precision-zero a-coordinate");
  LaurentNumber ainv = lf_inv(g.a);
  return {ainv, lf_mul(ainv, g.x).negate(), lf_mul(g.a, g.y).negate()};
}

// w(d(g)) = valuation of the a-coordinate.
inline long ss_project(const SolElement& g) { return g.a.valuation(); }

struct BoxSpec {
  int n = 0;
};

// Omega_n membership: |v(a)| <= n, v(x) >= -n, v(y) >= -n; reads only
// valuations, so truncation never flips the test unless a coordinate is
// precision-zero with an uncertifiable bound.
inline bool ss_in_box(const SolElement& g, const BoxSpec& box) {
  if (std::labs(g.a.valuation()) > box.n) return false;
  for (const LaurentNumber* c : {&g.x, &g.y}) {
    if (c->is_zero()) continue;
    if (c->is_precision_zero()) {
      if (c->valuation_lower_bound() >= -box.n) continue;
      throw invariant_violation("ss_in_box: precision-zero coordinate, bound not certifiable");
    }
    if (c->valuation() < -box.n) return false;
  }
  return true;
}

// mu(Omega_n) = (2n+1) q^{2n}.
inline Integer ss_box_volume(int n, int q) {
  if (n < 0) throw invariant_violation("ss_box_volume: n >= 0");
  return Integer(2 * n + 1) * ipow(q, static_cast<unsigned long>(2 * n));
}

// Law of the projected step on {-1, 0, +1}.
struct ProjectedKernel {
  double down = 0.4, hold = 0.2, up = 0.4;

  static ProjectedKernel standard() { return {}; }
  void validate() const {
    if (down < 0 || hold < 0 || up < 0 || std::abs(down + hold + up - 1.0) > 1e-12)
      throw invariant_violation("ProjectedKernel: probabilities must be a distribution");
  }
};

// Haar-uniform step on V = V_1 u V_1^{-1}: one of five Haar-unit slices
// chosen uniformly (r in {-1,0,1} of V_1 plus the inverses of the r = +-1
// slices), giving the projected law (2/5, 1/5, 2/5).
class SolSampler {
 public:
  explicit SolSampler(LaurentField field) : field_(std::move(field)) {}

  const LaurentField& field() const { return field_; }

  SolElement sample_step(Rng& rng) const {
    std::uniform_int_distribution<int> pick(0, 4);
    const int slice = pick(rng);
    const long r = slice == 0 ? -1 : slice == 1 ? 0 : slice == 2 ? 1 : slice == 3 ? 1 : -1;
    LaurentNumber u = field_.sample_unit(rng);
    LaurentNumber x0 = field_.sample_ball(rng);
    LaurentNumber y0 = field_.sample_ball(rng);
    SolElement s{lf_mul(field_.uniformizer_power(r), u), x0, y0};
    if (slice >= 3) return ss_inverse(s);
    return s;
  }

 private:
  LaurentField field_;
};

struct ConfinedProbability {
  double log_prob = 0.0;
  double prob() const { return std::exp(log_prob); }
};

// P(S_1,...,S_t all in [-n,n]) by DP over 2n+1 states, float with running
// renormalization so deep-decay probabilities stay representable in logs.
inline ConfinedProbability ss_confined_dp(const ProjectedKernel& kernel, int n, long t) {
  kernel.validate();
  if (n < 0 || t < 0) throw invariant_violation("ss_confined_dp: n, t >= 0");
  const int states = 2 * n + 1;
  std::vector<double> v(static_cast<std::size_t>(states), 0.0), w(static_cast<std::size_t>(states), 0.0);
  v[static_cast<std::size_t>(n)] = 1.0;
  double log_offset = 0.0;
  for (long step = 0; step < t; ++step) {
    for (int j = 0; j < states; ++j) {
      double s = kernel.hold * v[static_cast<std::size_t>(j)];
      if (j > 0) s += kernel.up * v[static_cast<std::size_t>(j - 1)];
      if (j + 1 < states) s += kernel.down * v[static_cast<std::size_t>(j + 1)];
      w[static_cast<std::size_t>(j)] = s;
    }
    v.swap(w);
    if ((step & 255) == 255) {
      double total = 0.0;
      for (double x : v) total += x;
      if (total <= 0.0) return {-std::numeric_limits<double>::infinity()};
      if (total < 1e-120) {
        for (double& x : v) x /= total;
        log_offset += std::log(total);
      }
    }
  }
  double total = 0.0, comp = 0.0;
  for (double x : v) {  // compensated sum
    const double yy = x - comp, tt = total + yy;
    comp = (tt - total) - yy;
    total = tt;
  }
  if (total <= 0.0) return {-std::numeric_limits<double>::infinity()};
  return {std::log(total) + log_offset};
}

// Exact-rational oracle for the (2/5, 1/5, 2/5) kernel: integer path counts
// with denominator 5^t.
inline Rational ss_confined_dp_exact(int n, long t) {
  const int states = 2 * n + 1;
  std::vector<Integer> v(static_cast<std::size_t>(states), Integer(0)), w(v);
  v[static_cast<std::size_t>(n)] = 1;
  for (long step = 0; step < t; ++step) {
    for (int j = 0; j < states; ++j) {
      Integer s = v[static_cast<std::size_t>(j)];
      if (j > 0) s += 2 * v[static_cast<std::size_t>(j - 1)];
      if (j + 1 < states) s += 2 * v[static_cast<std::size_t>(j + 1)];
      w[static_cast<std::size_t>(j)] = s;
    }
    v.swap(w);
  }
  Integer total(0);
  for (const auto& x : v) total += x;
  Rational r(total, ipow(5, static_cast<unsigned long>(t)));
  r.canonicalize();
  return r;
}

struct LowerBoundPoint {
  long t = 0;
  int n = 0;
  double log_confined = 0.0;
  double log_volume = 0.0;
  double log_bound() const { return log_confined - log_volume; }
};

struct LowerBoundResult {
  long t = 0;
  int n_star = 0;
  double log_bound = 0.0;
  std::vector<LowerBoundPoint> table;
};

// Grid around the predicted optimum n ~ (pi^2 t / (5 ln q))^{1/3}.
inline std::vector<int> ss_default_n_grid(long t, int q, int points = 12) {
  const double nh = std::cbrt(M_PI * M_PI * static_cast<double>(t) / (5.0 * std::log(static_cast<double>(q))));
  std::vector<int> ns;
  for (int i = 0; i < points; ++i) {
    const double frac = 0.6 + 1.2 * static_cast<double>(i) / (points - 1);
    const int n = std::max(1, static_cast<int>(std::lround(frac * nh)));
    if (ns.empty() || ns.back() != n) ns.push_back(n);
  }
  return ns;
}

// Certified lower bound max_n P(S confined to [-n,n] for 2t steps) / mu(Omega_n).
inline LowerBoundResult ss_lower_bound(long t, int q, const std::vector<int>& ns,
                                       const ProjectedKernel& kernel = ProjectedKernel::standard()) {
  if (t < 1) throw invariant_violation("ss_lower_bound: t >= 1");
  if (ns.empty()) throw invariant_violation("ss_lower_bound: empty n range");
  LowerBoundResult res;
  res.t = t;
  bool first = true;
  for (int n : ns) {
    LowerBoundPoint pt;
    pt.t = t;
    pt.n = n;
    pt.log_confined = ss_confined_dp(kernel, n, 2 * t).log_prob;
    pt.log_volume = std::log(2.0 * n + 1.0) + 2.0 * n * std::log(static_cast<double>(q));
    res.table.push_back(pt);
    if (first || pt.log_bound() > res.log_bound) {
      res.log_bound = pt.log_bound();
      res.n_star = n;
      first = false;
    }
  }
  return res;
}

struct Lemma3Report {
  long trials = 0;
  long confined_prefixes = 0;  // prefixes whose projected partial sums stayed in [-n,n]
  long violations = 0;         // confined prefixes whose product left Omega_n (must be 0)
  long uncertifiable = 0;      // precision-zero coordinates without a usable bound
};

// Samples words from V; whenever every projected partial sum up to i lies in
// [-n,n], the prefix product must lie in Omega_n.
inline Lemma3Report ss_lemma3_check(const SolSampler& sampler, int n, int length, long trials, Rng& rng) {
  Lemma3Report rep;
  rep.trials = trials;
  const BoxSpec box{n};
  for (long trial = 0; trial < trials; ++trial) {
    SolElement z = SolElement::identity(sampler.field());
    bool confined = true;
    for (int i = 0; i < length && confined; ++i) {
      z = ss_multiply(z, sampler.sample_step(rng));
      if (std::labs(ss_project(z)) > n) {
        confined = false;  // implication is one-directional; nothing to assert
        break;
      }
      ++rep.confined_prefixes;
      try {
        if (!ss_in_box(z, box)) ++rep.violations;
      } catch (const invariant_violation&) {
        ++rep.uncertifiable;
      }
    }
  }
  return rep;
}

struct MonteCarloEstimate {
  long t = 0;
  int n = 0;
  long samples = 0;
  long hits = 0;
  long discarded = 0;  // precision-zero trajectories
  double estimate() const { return static_cast<double>(hits) / static_cast<double>(samples - discarded); }
  double sigma() const {
    const double p = estimate();
    return std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(samples - discarded));
  }
  double ci_low() const { return estimate() - 1.96 * sigma(); }
  double ci_high() const { return estimate() + 1.96 * sigma(); }
};

namespace detail {

// ---- bit-packed F_2((t)) fast path for the q = 2 Monte Carlo walk ----

inline constexpr int kGf2MaxWords = 10;  // up to 640 retained coefficients

// Word-level carry-less product, out = a * b over GF(2)[t]; out has wa + wb
// words and is zeroed by the caller. Truncation hint `max_words` skips high
// words the caller will discard.
#if defined(__PCLMUL__)
inline void gf2w_mul_words(const std::uint64_t* a, int wa, const std::uint64_t* b, int wb,
                           std::uint64_t* out, int max_words) {
  for (int i = 0; i < wa && i < max_words; ++i) {
    if (!a[i]) continue;
    const __m128i va = _mm_set_epi64x(0, static_cast<long long>(a[i]));
    for (int j = 0; j < wb && i + j < max_words; ++j) {
      if (!b[j]) continue;
      const __m128i p = _mm_clmulepi64_si128(va, _mm_set_epi64x(0, static_cast<long long>(b[j])), 0);
      out[i + j] ^= static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
      out[i + j + 1] ^= static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_srli_si128(p, 8)));
    }
  }
}
#else
inline void gf2w_mul_words(const std::uint64_t* a, int wa, const std::uint64_t* b, int wb,
                           std::uint64_t* out, int max_words) {
  for (int i = 0; i < wa * 64 && (i >> 6) < max_words; ++i) {
    if (!(a[i >> 6] >> (i & 63) & 1)) continue;
    const int ws = i >> 6, bs = i & 63;
    for (int j = 0; j < wb && ws + j < max_words; ++j) {
      out[ws + j] ^= b[j] << bs;
      if (bs) out[ws + j + 1] ^= b[j] >> (64 - bs);
    }
  }
}
#endif

struct Gf2Val {
  long val = 0;       // valuation; lower bound when pz; ignored when zero
  int nbits = 0;      // known window length; 0 for zero/pz
  bool zero = true;   // exact zero
  bool pz = false;
  std::array<std::uint64_t, kGf2MaxWords> w{};

  long known_end() const { return zero ? LaurentNumber::kInfValuation : val + nbits; }
};

inline void gf2w_xor_shifted(std::array<std::uint64_t, kGf2MaxWords>& out, const std::uint64_t* src,
                             int src_words, long shift, int out_bits) {
  const int out_words = (out_bits + 63) / 64;
  const long ws = shift >> 6, bs = shift & 63;
  for (int j = 0; j < src_words; ++j) {
    const long k = ws + j;
    if (k >= out_words) break;
    out[static_cast<std::size_t>(k)] ^= src[j] << bs;
    if (bs && k + 1 < out_words) out[static_cast<std::size_t>(k + 1)] ^= src[j] >> (64 - bs);
  }
  // mask bits past the window
  const int top = out_bits & 63;
  if (top) out[static_cast<std::size_t>(out_words - 1)] &= (~0ull) >> (64 - top);
}

inline void gf2w_mask(std::array<std::uint64_t, kGf2MaxWords>& w, int nbits) {
  const int words = (nbits + 63) / 64;
  for (int j = words; j < kGf2MaxWords; ++j) w[static_cast<std::size_t>(j)] = 0;
  const int top = nbits & 63;
  if (top) w[static_cast<std::size_t>(words - 1)] &= (~0ull) >> (64 - top);
}

// Strip leading (low-order) zero coefficients; empty window becomes pz.
inline void gf2w_normalize(Gf2Val& v) {
  const int words = (v.nbits + 63) / 64;
  int lead = -1;
  for (int j = 0; j < words; ++j)
    if (v.w[static_cast<std::size_t>(j)]) {
      lead = j * 64 + __builtin_ctzll(v.w[static_cast<std::size_t>(j)]);
      break;
    }
  if (lead < 0 || lead >= v.nbits) {
    v.pz = true;
    v.val = v.val + v.nbits;
    v.nbits = 0;
    v.w.fill(0);
    return;
  }
  if (lead > 0) {
    std::array<std::uint64_t, kGf2MaxWords> out{};
    const long ws = lead >> 6, bs = lead & 63;
    for (int j = 0; j + static_cast<int>(ws) < words; ++j) {
      std::uint64_t x = v.w[static_cast<std::size_t>(j + ws)] >> bs;
      if (bs && j + static_cast<int>(ws) + 1 < words) x |= v.w[static_cast<std::size_t>(j + ws + 1)] << (64 - bs);
      out[static_cast<std::size_t>(j)] = x;
    }
    v.w = out;
    v.val += lead;
    v.nbits -= lead;
    gf2w_mask(v.w, v.nbits);
  }
}

inline Gf2Val gf2_add(const Gf2Val& a, const Gf2Val& b) {
  if (a.zero) return b;
  if (b.zero) return a;
  const long end = std::min(a.known_end(), b.known_end());
  const long start = std::min(a.pz ? end : a.val, b.pz ? end : b.val);
  if (start >= end) return Gf2Val{end, 0, false, true, {}};
  Gf2Val r;
  r.zero = false;
  r.pz = false;
  r.val = start;
  r.nbits = static_cast<int>(end - start);
  if (!a.pz) gf2w_xor_shifted(r.w, a.w.data(), (a.nbits + 63) / 64, a.val - start, r.nbits);
  if (!b.pz) gf2w_xor_shifted(r.w, b.w.data(), (b.nbits + 63) / 64, b.val - start, r.nbits);
  gf2w_normalize(r);
  return r;
}

inline Gf2Val gf2_mul(const Gf2Val& a, const Gf2Val& b) {
  if (a.zero || b.zero) return Gf2Val{};
  if (a.pz || b.pz) return Gf2Val{a.val + b.val, 0, false, true, {}};
  Gf2Val r;
  r.zero = false;
  r.val = a.val + b.val;
  r.nbits = std::min(a.nbits, b.nbits);
  const int need = (r.nbits + 63) / 64;
  std::uint64_t full[kGf2MaxWords + 1] = {};
  gf2w_mul_words(a.w.data(), (a.nbits + 63) / 64, b.w.data(), (b.nbits + 63) / 64, full, need);
  for (int j = 0; j < need; ++j) r.w[static_cast<std::size_t>(j)] = full[j];
  gf2w_mask(r.w, r.nbits);
  return r;  // bit 0 = 1 since both leading bits are 1
}

// Unit-part multiplication: both operands valuation-free, nbits = prec.
inline void gf2_unit_mul(const std::array<std::uint64_t, kGf2MaxWords>& a,
                         const std::array<std::uint64_t, kGf2MaxWords>& b, int nbits,
                         std::array<std::uint64_t, kGf2MaxWords>& out) {
  const int need = (nbits + 63) / 64;
  std::uint64_t full[kGf2MaxWords + 1] = {};
  gf2w_mul_words(a.data(), need, b.data(), need, full, need);
  out.fill(0);
  for (int j = 0; j < need; ++j) out[static_cast<std::size_t>(j)] = full[j];
  gf2w_mask(out, nbits);
}

// Newton inversion over F_2[[t]]: x <- a x^2 doubles the correct precision.
inline void gf2_unit_inv(const std::array<std::uint64_t, kGf2MaxWords>& a, int nbits,
                         std::array<std::uint64_t, kGf2MaxWords>& out) {
  std::array<std::uint64_t, kGf2MaxWords> x{};
  x[0] = 1;
  int m = 1;
  while (m < nbits) {
    const int m2 = std::min(2 * m, nbits);
    const int need = (m2 + 63) / 64;
    // sq = x^2 truncated to m2 bits (carry-less square spreads the bits)
    std::uint64_t sq[kGf2MaxWords + 1] = {};
    const int xw = (m + 63) / 64;
    gf2w_mul_words(x.data(), xw, x.data(), xw, sq, need);
    std::uint64_t prod[kGf2MaxWords + 1] = {};
    gf2w_mul_words(a.data(), need, sq, need, prod, need);
    for (int j = 0; j < need; ++j) x[static_cast<std::size_t>(j)] = prod[j];
    gf2w_mask(x, m2);
    m = m2;
  }
  out = x;
  gf2w_mask(out, nbits);
}

class Gf2SolWalker {
 public:
  explicit Gf2SolWalker(int prec) : prec_(prec) {
    if (prec > 64 * kGf2MaxWords)
      throw invariant_violation("Gf2SolWalker: precision exceeds packed capacity");
    reset();
  }

  void reset() {
    va_ = 0;
    ua_.fill(0);
    uai_.fill(0);
    ua_[0] = 1;
    uai_[0] = 1;
    x_ = Gf2Val{};
    y_ = Gf2Val{};
  }

  long projected() const { return va_; }

  void step(Rng& rng) {
    std::uniform_int_distribution<int> pick(0, 4);
    const int slice = pick(rng);
    const long r = slice == 0 ? -1 : slice == 1 ? 0 : slice == 2 ? 1 : slice == 3 ? 1 : -1;
    std::array<std::uint64_t, kGf2MaxWords> u{}, uinv{};
    sample_words(rng, u);
    u[0] |= 1;  // unit: leading coefficient 1
    gf2w_mask(u, prec_);
    gf2_unit_inv(u, prec_, uinv);
    Gf2Val x0 = sample_ball(rng);
    Gf2Val y0 = sample_ball(rng);
    long vz;
    const std::array<std::uint64_t, kGf2MaxWords>*uz, *uzi;
    Gf2Val xz, yz;
    if (slice < 3) {
      vz = r;
      uz = &u;
      uzi = &uinv;
      xz = x0;
      yz = y0;
    } else {
      // inverse slice: (pi^r u, x0, y0)^{-1} = (pi^{-r} u^{-1}, -pi^{-r} u^{-1} x0, -pi^r u y0)
      vz = -r;
      uz = &uinv;
      uzi = &u;
      Gf2Val az{-r, prec_, false, false, uinv}, azi{r, prec_, false, false, u};
      xz = gf2_mul(az, x0);
      yz = gf2_mul(azi, y0);
    }
    // Z <- Z * step: x += a * xz, y += a^{-1} * yz, a *= az
    Gf2Val a{va_, prec_, false, false, ua_}, ai{-va_, prec_, false, false, uai_};
    x_ = gf2_add(gf2_mul(a, xz), x_);
    y_ = gf2_add(gf2_mul(ai, yz), y_);
    std::array<std::uint64_t, kGf2MaxWords> tmp{};
    gf2_unit_mul(ua_, *uz, prec_, tmp);
    ua_ = tmp;
    gf2_unit_mul(uai_, *uzi, prec_, tmp);
    uai_ = tmp;
    va_ += vz;
  }

  // 1 = inside, 0 = outside, -1 = uncertifiable precision-zero coordinate.
  int in_box(int n) const {
    if (std::labs(va_) > n) return 0;
    for (const Gf2Val* c : {&x_, &y_}) {
      if (c->zero) continue;
      if (c->pz) {
        if (c->val >= -n) continue;
        return -1;
      }
      if (c->val < -n) return 0;
    }
    return 1;
  }

 private:
  void sample_words(Rng& rng, std::array<std::uint64_t, kGf2MaxWords>& w) {
    const int words = (prec_ + 63) / 64;
    for (int j = 0; j < words; ++j) w[static_cast<std::size_t>(j)] = rng();
    for (int j = words; j < kGf2MaxWords; ++j) w[static_cast<std::size_t>(j)] = 0;
  }

  Gf2Val sample_ball(Rng& rng) {
    Gf2Val v;
    v.zero = false;
    v.val = 0;
    v.nbits = prec_;
    sample_words(rng, v.w);
    gf2w_mask(v.w, prec_);
    gf2w_normalize(v);
    return v;
  }

  int prec_;
  long va_;
  std::array<std::uint64_t, kGf2MaxWords> ua_, uai_;
  Gf2Val x_, y_;
};

}  // namespace detail

// Fraction of `samples` independent 2t-step walks landing in Omega_n, with a
// 95% binomial confidence interval; q = 2 runs on the bit-packed fast path.
inline MonteCarloEstimate ss_monte_carlo_return(int q, long t, int n, long samples, std::uint64_t seed,
                                                int precision = 0) {
  if (samples < 1) throw invariant_violation("ss_monte_carlo_return: samples >= 1");
  if (precision <= 0) precision = static_cast<int>(2 * t) + 8;
  MonteCarloEstimate est;
  est.t = t;
  est.n = n;
  est.samples = samples;
  Rng rng(seed);
  if (q == 2 && precision <= 64 * detail::kGf2MaxWords) {
    detail::Gf2SolWalker walker(precision);
    for (long s = 0; s < samples; ++s) {
      walker.reset();
      for (long i = 0; i < 2 * t; ++i) walker.step(rng);
      const int verdict = walker.in_box(n);
      if (verdict < 0)
        ++est.discarded;
      else
        est.hits += verdict;
    }
  } else {
    SolSampler sampler(LaurentField(q, precision));
    const BoxSpec box{n};
    for (long s = 0; s < samples; ++s) {
      SolElement z = SolElement::identity(sampler.field());
      for (long i = 0; i < 2 * t; ++i) z = ss_multiply(z, sampler.sample_step(rng));
      try {
        est.hits += ss_in_box(z, box) ? 1 : 0;
      } catch (const invariant_violation&) {
        ++est.discarded;
      }
    }
  }
  return est;
}

}  // namespace rwlab
