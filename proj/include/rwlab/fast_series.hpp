#pragma once

// Exact return series for uniform measures at scales the generic sparse
// mpq convolution cannot reach: integer path counts with an implicit
// denominator m^n. Two engines: a dense mpz line for walks on Z, and a
// bit-packed counting table for the q = 2 lamplighter.

#include <cstdint>
#include <vector>

#include "rwlab/common.hpp"
#include "rwlab/groups.hpp"
#include "rwlab/measure.hpp"

namespace rwlab {

// Walk on Z with step weights w[-r..r] (integers, mass m = sum w); returns
// a_1..a_nmax with a_n = sum_j c_n(j)^2 / m^{2n}.
inline ReturnSeries<Rational> zz_return_series_dense(const std::vector<Integer>& weights, int nmax) {
  const int r = (static_cast<int>(weights.size()) - 1) / 2;
  if (weights.size() != static_cast<std::size_t>(2 * r + 1))
    throw invariant_violation("zz_return_series_dense: weights must have odd length");
  Integer m(0);
  for (int i = 0; i < 2 * r + 1; ++i) {
    if (weights[static_cast<std::size_t>(i)] < 0)
      throw invariant_violation("zz_return_series_dense: negative weight");
    if (weights[static_cast<std::size_t>(i)] != weights[static_cast<std::size_t>(2 * r - i)])
      throw invariant_violation("zz_return_series_dense: weights must be symmetric");
    m += weights[static_cast<std::size_t>(i)];
  }
  if (m == 0) throw invariant_violation("zz_return_series_dense: zero mass");
  const int width = nmax * r;
  std::vector<Integer> c(static_cast<std::size_t>(2 * width + 1), Integer(0)), next(c);
  c[static_cast<std::size_t>(width)] = 1;
  ReturnSeries<Rational> series;
  series.group = GroupDesc{GroupKind::Zd, 1};
  series.measure_fingerprint = "zz-dense";
  Integer msq = m * m, denom(1);
  for (int n = 1; n <= nmax; ++n) {
    for (int j = -width; j <= width; ++j) {
      Integer s(0);
      for (int k = -r; k <= r; ++k) {
        const int i = j - k;
        if (i < -width || i > width) continue;
        s += weights[static_cast<std::size_t>(k + r)] * c[static_cast<std::size_t>(i + width)];
      }
      next[static_cast<std::size_t>(j + width)] = s;
    }
    c.swap(next);
    denom *= msq;
    Integer sq(0);
    for (const Integer& v : c)
      if (v != 0) sq += v * v;
    Rational an(sq, denom);
    an.canonicalize();
    series.a.push_back(an);
    series.max_support = std::max<std::size_t>(series.max_support, c.size());
  }
  return series;
}

namespace detail {

// Flat linear-probe hash table for (packed element, path count); keys are
// nonzero by construction (bias below), value 0 marks an empty slot.
class CountTable {
 public:
  explicit CountTable(std::size_t expected) {
    std::size_t cap = 64;
    while (cap * 5 < expected * 8) cap <<= 1;
    slots_.assign(cap * 2, 0);
    mask_ = cap - 1;
  }

  void add(std::uint64_t key, std::uint64_t count) {
    if (size_ * 8 >= capacity() * 5) grow();
    insert(key, count);
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return mask_ + 1; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i <= mask_; ++i)
      if (slots_[2 * i + 1]) fn(slots_[2 * i], slots_[2 * i + 1]);
  }

 private:
  void insert(std::uint64_t key, std::uint64_t count) {
    std::size_t i = hash(key) & mask_;
    while (true) {
      if (slots_[2 * i + 1] == 0) {
        slots_[2 * i] = key;
        slots_[2 * i + 1] = count;
        ++size_;
        return;
      }
      if (slots_[2 * i] == key) {
        slots_[2 * i + 1] += count;
        return;
      }
      i = (i + 1) & mask_;
    }
  }

  void grow() {
    std::vector<std::uint64_t> old;
    old.swap(slots_);
    const std::size_t old_cap = mask_ + 1;
    slots_.assign(old_cap * 4, 0);
    mask_ = old_cap * 2 - 1;
    size_ = 0;
    for (std::size_t i = 0; i < old_cap; ++i)
      if (old[2 * i + 1]) insert(old[2 * i], old[2 * i + 1]);
  }

  static std::uint64_t hash(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 29;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 32;
    return x;
  }

  std::vector<std::uint64_t> slots_;  // interleaved key, count
  std::size_t mask_ = 0, size_ = 0;
};

}  // namespace detail

// Exact return series for the uniform measure on a symmetric generating set
// of the q = 2 lamplighter, with elements packed into 64-bit keys: 6 bits of
// cursor, one lamp bit per position in [-R, R]. Counts stay in uint64 as
// long as |S|^nmax < 2^63.
inline ReturnSeries<Rational> ll_return_series_packed(const Group& group, const GeneratingSet& gens,
                                                      int nmax) {
  if (group.desc().kind != GroupKind::Lamplighter || group.desc().param != 2)
    throw invariant_violation("ll_return_series_packed: q = 2 lamplighter only");
  const int m = static_cast<int>(gens.elems.size());
  int reach = 0;
  for (const Elem& g : gens.elems) {
    reach = std::max(reach, std::abs(g.d[0]));
    for (std::size_t i = 1; i + 1 < g.d.size(); i += 2)
      reach = std::max(reach, std::abs(g.d[i]));
  }
  const int radius = nmax * std::max(reach, 1);
  if (radius > 28) throw invariant_violation("ll_return_series_packed: range exceeds packed capacity");
  double total = 1.0;
  for (int n = 0; n < nmax; ++n) total *= m;
  if (total >= 9.2e18) throw invariant_violation("ll_return_series_packed: counts would overflow");

  // generator action on a packed state (cursor c, lamp mask): cursor += dc,
  // mask ^= gmask shifted by c
  struct PackedGen {
    int dc;
    std::uint64_t gmask;
  };
  std::vector<PackedGen> pg;
  for (const Elem& g : gens.elems) {
    PackedGen p{g.d[0], 0};
    for (std::size_t i = 1; i + 1 < g.d.size(); i += 2)
      p.gmask |= 1ull << (g.d[i] + radius);
    pg.push_back(p);
  }
  const auto pack = [](int c, std::uint64_t mask) {
    return (mask << 6) | static_cast<std::uint64_t>(c + 32);
  };

  detail::CountTable cur(16);
  cur.add(pack(0, 0), 1);
  ReturnSeries<Rational> series;
  series.group = group.desc();
  series.measure_fingerprint = "ll-packed";
  Integer denom(1);
  const Integer msq = Integer(m) * m;
  for (int n = 1; n <= nmax; ++n) {
    detail::CountTable next(cur.size() * 3);
    cur.for_each([&](std::uint64_t key, std::uint64_t count) {
      const int c = static_cast<int>(key & 63) - 32;
      const std::uint64_t mask = key >> 6;
      for (const PackedGen& g : pg) {
        const std::uint64_t shifted = c >= 0 ? g.gmask << c : g.gmask >> -c;
        next.add(pack(c + g.dc, mask ^ shifted), count);
      }
    });
    cur = std::move(next);
    denom *= msq;
    Integer sq(0), tmp;
    cur.for_each([&](std::uint64_t, std::uint64_t count) {
      tmp = Integer(count);
      sq += tmp * tmp;
    });
    Rational an(sq, denom);
    an.canonicalize();
    series.a.push_back(an);
    series.max_support = std::max(series.max_support, cur.size());
  }
  return series;
}

}  // namespace rwlab
