#pragma once

// Truncated formal Laurent series over F_q: the local field F_q((t)) with
// exact valuations, modulus, inversion and Haar-uniform sampling on the
// unit ball and the unit group.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rwlab/common.hpp"

namespace rwlab {

namespace detail {

inline int mod_pow(long base, long e, int q) {
  long r = 1, b = base % q;
  while (e > 0) {
    if (e & 1) r = r * b % q;
    b = b * b % q;
    e >>= 1;
  }
  return static_cast<int>(r);
}

inline int mod_inverse(int c, int q) { return mod_pow(c, q - 2, q); }  // q prime

// Carry-less (GF(2)) coefficient convolution on bit-packed words.
inline void gf2_convolve(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                         std::vector<std::uint8_t>& out, std::size_t n_out) {
  const std::size_t wa = (a.size() + 63) / 64, wb = (b.size() + 63) / 64;
  const std::size_t wo = (n_out + 63) / 64 + 1;
  std::vector<std::uint64_t> pa(wa, 0), pb(wb, 0), po(wo, 0);
  for (std::size_t i = 0; i < a.size(); ++i) pa[i >> 6] |= static_cast<std::uint64_t>(a[i] & 1) << (i & 63);
  for (std::size_t i = 0; i < b.size(); ++i) pb[i >> 6] |= static_cast<std::uint64_t>(b[i] & 1) << (i & 63);
  const std::size_t lim = std::min(a.size(), n_out);
  for (std::size_t i = 0; i < lim; ++i) {
    if (!(pa[i >> 6] >> (i & 63) & 1)) continue;
    const std::size_t wshift = i >> 6, bshift = i & 63;
    for (std::size_t j = 0; j < wb && wshift + j < wo; ++j) {
      po[wshift + j] ^= pb[j] << bshift;
      if (bshift && wshift + j + 1 < wo) po[wshift + j + 1] ^= pb[j] >> (64 - bshift);
    }
  }
  out.assign(n_out, 0);
  for (std::size_t i = 0; i < n_out; ++i) out[i] = static_cast<std::uint8_t>(po[i >> 6] >> (i & 63) & 1);
}

}  // namespace detail

// mod_K(a) = q^exponent with exponent = -v(a); multiplicative.
struct ModValue {
  int q = 0;
  long exponent = 0;
  double value() const { return std::pow(static_cast<double>(q), static_cast<double>(exponent)); }
};

class LaurentNumber {
 public:
  static constexpr long kInfValuation = std::numeric_limits<long>::max() / 4;

  static LaurentNumber zero(int q) {
    LaurentNumber r;
    r.q_ = q;
    r.val_ = kInfValuation;
    return r;
  }

  // Lower bound `val_bound` on the true valuation of a fully cancelled window.
  static LaurentNumber precision_zero(int q, long val_bound) {
    LaurentNumber r;
    r.q_ = q;
    r.val_ = val_bound;
    r.pz_ = true;
    return r;
  }

  static LaurentNumber from_coeffs(int q, long val, std::vector<std::uint8_t> coeffs) {
    std::size_t lead = 0;
    while (lead < coeffs.size() && coeffs[lead] == 0) ++lead;
    if (lead == coeffs.size()) return zero(q);
    LaurentNumber r;
    r.q_ = q;
    r.val_ = val + static_cast<long>(lead);
    r.c_.assign(coeffs.begin() + static_cast<long>(lead), coeffs.end());
    return r;
  }

  static LaurentNumber one(int q, int prec) {
    std::vector<std::uint8_t> c(static_cast<std::size_t>(prec), 0);
    c[0] = 1;
    return from_coeffs(q, 0, std::move(c));
  }

  static LaurentNumber uniformizer(int q, int prec) {
    std::vector<std::uint8_t> c(static_cast<std::size_t>(prec), 0);
    c[0] = 1;
    return from_coeffs(q, 1, std::move(c));
  }

  int q() const { return q_; }
  bool is_zero() const { return c_.empty() && !pz_; }
  bool is_precision_zero() const { return pz_; }
  bool nonzero() const { return !c_.empty(); }

  long valuation() const {
    if (pz_) throw invariant_violation("valuation read on a precision-zero value");
    if (c_.empty()) throw invariant_violation("valuation of zero is undefined");
    return val_;
  }

  // True valuation is >= this for every state (kInfValuation for exact zero).
  long valuation_lower_bound() const { return c_.empty() ? val_ : val_; }

  long precision() const { return static_cast<long>(c_.size()); }
  long known_end() const { return c_.empty() && !pz_ ? kInfValuation : val_ + static_cast<long>(c_.size()); }
  const std::vector<std::uint8_t>& coeffs() const { return c_; }

  LaurentNumber negate() const {
    LaurentNumber r = *this;
    for (auto& c : r.c_) c = static_cast<std::uint8_t>((q_ - c) % q_);
    return r;
  }

  bool same_window_equal(const LaurentNumber& o) const {
    return q_ == o.q_ && pz_ == o.pz_ && val_ == o.val_ && c_ == o.c_;
  }

  friend LaurentNumber lf_add(const LaurentNumber& a, const LaurentNumber& b) {
    if (a.q_ != b.q_) throw invariant_violation("lf_add: mismatched residue fields");
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const long end = std::min(a.known_end(), b.known_end());
    const long start = std::min(a.val_, b.val_);
    if (start >= end) return precision_zero(a.q_, end);
    std::vector<std::uint8_t> sum(static_cast<std::size_t>(end - start), 0);
    auto accumulate = [&](const LaurentNumber& x) {
      for (std::size_t i = 0; i < x.c_.size(); ++i) {
        const long pos = x.val_ + static_cast<long>(i);
        if (pos >= end) break;
        auto& s = sum[static_cast<std::size_t>(pos - start)];
        s = static_cast<std::uint8_t>((s + x.c_[i]) % a.q_);
      }
    };
    if (!a.pz_) accumulate(a);
    if (!b.pz_) accumulate(b);
    std::size_t lead = 0;
    while (lead < sum.size() && sum[lead] == 0) ++lead;
    if (lead == sum.size()) return precision_zero(a.q_, end);
    LaurentNumber r;
    r.q_ = a.q_;
    r.val_ = start + static_cast<long>(lead);
    r.c_.assign(sum.begin() + static_cast<long>(lead), sum.end());
    return r;
  }

  friend LaurentNumber lf_sub(const LaurentNumber& a, const LaurentNumber& b) { return lf_add(a, b.negate()); }

  friend LaurentNumber lf_mul(const LaurentNumber& a, const LaurentNumber& b) {
    if (a.q_ != b.q_) throw invariant_violation("lf_mul: mismatched residue fields");
    if (a.is_zero() || b.is_zero()) return zero(a.q_);
    if (a.pz_ || b.pz_) return precision_zero(a.q_, a.val_ + b.val_);
    const std::size_t n = std::min(a.c_.size(), b.c_.size());
    LaurentNumber r;
    r.q_ = a.q_;
    r.val_ = a.val_ + b.val_;
    if (a.q_ == 2 && n > 32) {
      detail::gf2_convolve(a.c_, b.c_, r.c_, n);
    } else {
      r.c_.assign(n, 0);
      for (std::size_t i = 0; i < std::min(a.c_.size(), n); ++i) {
        if (a.c_[i] == 0) continue;
        const std::size_t jmax = std::min(b.c_.size(), n - i);
        for (std::size_t j = 0; j < jmax; ++j)
          r.c_[i + j] = static_cast<std::uint8_t>((r.c_[i + j] + a.c_[i] * b.c_[j]) % a.q_);
      }
    }
    return r;  // leading coefficient a0*b0 != 0 mod a prime
  }

  friend LaurentNumber lf_inv(const LaurentNumber& a) {
    if (!a.nonzero()) throw invariant_violation("lf_inv: zero has no inverse");
    const std::size_t n = a.c_.size();
    std::vector<std::uint8_t> d(n, 0);
    const int c0inv = detail::mod_inverse(a.c_[0], a.q_);
    d[0] = static_cast<std::uint8_t>(c0inv);
    for (std::size_t k = 1; k < n; ++k) {
      long s = 0;
      for (std::size_t j = 1; j <= k; ++j) s += static_cast<long>(a.c_[j]) * d[k - j];
      s %= a.q_;
      d[k] = static_cast<std::uint8_t>((a.q_ - s) % a.q_ * c0inv % a.q_);
    }
    LaurentNumber r;
    r.q_ = a.q_;
    r.val_ = -a.val_;
    r.c_ = std::move(d);
    return r;
  }

 private:
  int q_ = 2;
  long val_ = kInfValuation;  // valuation; lower bound when pz_; kInfValuation for zero
  std::vector<std::uint8_t> c_;
  bool pz_ = false;
};

inline ModValue lf_mod(const LaurentNumber& a) {
  return ModValue{a.q(), -a.valuation()};
}

// Field configuration: prime q plus the default precision window.
class LaurentField {
 public:
  LaurentField(int q, int prec) : q_(q), prec_(prec) {
    if (q < 2 || prec < 1) throw invariant_violation("LaurentField: need q >= 2 and prec >= 1");
    for (int d = 2; d * d <= q; ++d)
      if (q % d == 0) throw invariant_violation("LaurentField: q must be prime");
  }

  int q() const { return q_; }
  int precision() const { return prec_; }

  LaurentNumber zero() const { return LaurentNumber::zero(q_); }
  LaurentNumber one() const { return LaurentNumber::one(q_, prec_); }
  LaurentNumber uniformizer() const { return LaurentNumber::uniformizer(q_, prec_); }

  LaurentNumber uniformizer_power(long r) const {
    std::vector<std::uint8_t> c(static_cast<std::size_t>(prec_), 0);
    c[0] = 1;
    return LaurentNumber::from_coeffs(q_, r, std::move(c));
  }

  // Haar-uniform on R (valuation >= 0): i.i.d. uniform coefficients of t^0..t^{prec-1}.
  LaurentNumber sample_ball(Rng& rng) const {
    std::uniform_int_distribution<int> coeff(0, q_ - 1);
    std::vector<std::uint8_t> c(static_cast<std::size_t>(prec_));
    for (auto& x : c) x = static_cast<std::uint8_t>(coeff(rng));
    auto r = LaurentNumber::from_coeffs(q_, 0, std::move(c));
    if (r.is_zero()) return LaurentNumber::precision_zero(q_, prec_);
    return r;
  }

  // Haar-uniform on the unit group R^x: valuation exactly 0.
  LaurentNumber sample_unit(Rng& rng) const {
    std::uniform_int_distribution<int> lead(1, q_ - 1);
    std::uniform_int_distribution<int> coeff(0, q_ - 1);
    std::vector<std::uint8_t> c(static_cast<std::size_t>(prec_));
    c[0] = static_cast<std::uint8_t>(lead(rng));
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = static_cast<std::uint8_t>(coeff(rng));
    return LaurentNumber::from_coeffs(q_, 0, std::move(c));
  }

  std::string to_string(const LaurentNumber& a) const {
    if (a.is_precision_zero()) return "~0";
    if (a.is_zero()) return "0";
    std::ostringstream os;
    os << "t^" << a.valuation() << "*(";
    bool first = true;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
      if (a.coeffs()[i] == 0) continue;
      if (!first) os << " + ";
      first = false;
      os << static_cast<int>(a.coeffs()[i]);
      if (i == 1) os << "*t";
      if (i > 1) os << "*t^" << i;
    }
    os << ")";
    return os.str();
  }

  LaurentNumber parse(const std::string& text) const {
    std::string s;
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s == "0") return zero();
    if (s.rfind("t^", 0) != 0) throw invariant_violation("parse: expected t^v*(...) or 0");
    std::size_t star = s.find("*(");
    if (star == std::string::npos || s.back() != ')')
      throw invariant_violation("parse: expected t^v*(...)");
    const long val = std::stol(s.substr(2, star - 2));
    std::vector<std::uint8_t> c(static_cast<std::size_t>(prec_), 0);
    std::string body = s.substr(star + 2, s.size() - star - 3);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t next = body.find('+', pos);
      if (next == std::string::npos) next = body.size();
      std::string term = body.substr(pos, next - pos);
      pos = next + 1;
      long coeff = 0, power = 0;
      std::size_t tp = term.find("*t");
      if (tp == std::string::npos) {
        coeff = std::stol(term);
      } else {
        coeff = std::stol(term.substr(0, tp));
        power = tp + 2 == term.size() ? 1 : std::stol(term.substr(tp + 3));
      }
      if (coeff < 0 || coeff >= q_ || power < 0 || power >= prec_)
        throw invariant_violation("parse: residue or exponent out of range");
      c[static_cast<std::size_t>(power)] = static_cast<std::uint8_t>(coeff);
    }
    return LaurentNumber::from_coeffs(q_, val, std::move(c));
  }

 private:
  int q_;
  int prec_;
};

}  // namespace rwlab
