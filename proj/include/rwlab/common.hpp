#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace rwlab {

using Rational = mpq_class;
using Integer = mpz_class;
using Rng = std::mt19937_64;

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(double r) { return r; }

inline Rational rational_from(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Independent seed streams: stream i of a master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

inline Integer ipow(long base, unsigned long e) {
  Integer b;
  mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(base), e);
  return b;
}

struct invariant_violation : std::runtime_error {
  explicit invariant_violation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rwlab
