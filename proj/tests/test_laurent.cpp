#include <doctest.h>

#include "rwlab/laurent.hpp"

using namespace rwlab;

namespace {

LaurentNumber mk(const LaurentField& f, const std::string& s) { return f.parse(s); }

}  // namespace

TEST_CASE("addition: characteristic-2 cancellation and ultrametric") {
  LaurentField f(2, 8);
  // (t + t^2) + (t^2) = t
  auto a = mk(f, "t^1*(1 + 1*t)");
  auto b = mk(f, "t^2*(1)");
  auto s = lf_add(a, b);
  CHECK(s.valuation() == 1);
  CHECK(f.to_string(s) == "t^1*(1)");

  // distinct valuations: result valuation is the min
  auto lo = mk(f, "t^-2*(1 + 1*t)");
  auto hi = mk(f, "t^0*(1)");
  CHECK(lf_add(lo, hi).valuation() == -2);

  // x + (-x) -> precision-zero (full cancellation inside the window)
  auto z = lf_add(a, a.negate());
  CHECK(z.is_precision_zero());
}

TEST_CASE("multiplication: valuations add, hand convolution") {
  LaurentField f(2, 8);
  auto tinv = mk(f, "t^-1*(1)");
  auto t = mk(f, "t^1*(1)");
  auto one = lf_mul(tinv, t);
  CHECK(one.valuation() == 0);
  CHECK(one.same_window_equal(f.one()));

  // (1+t)^2 over F_2 = 1 + t^2
  auto u = mk(f, "t^0*(1 + 1*t)");
  auto sq = lf_mul(u, u);
  CHECK(f.to_string(sq) == "t^0*(1 + 1*t^2)");

  auto a = mk(f, "t^-3*(1 + 1*t)");
  auto b = mk(f, "t^2*(1 + 1*t^2)");
  CHECK(lf_mul(a, b).valuation() == -1);
}

TEST_CASE("inversion roundtrip") {
  LaurentField f2(2, 16), f5(5, 12);
  CHECK(lf_inv(f2.one()).same_window_equal(f2.one()));
  CHECK(lf_inv(f2.uniformizer()).valuation() == -1);

  // 1/(1+t) over F_2 = 1 + t + t^2 + ...
  auto u = mk(f2, "t^0*(1 + 1*t)");
  auto inv = lf_inv(u);
  for (long i = 0; i < inv.precision(); ++i) CHECK(inv.coeffs()[static_cast<std::size_t>(i)] == 1);
  auto prod = lf_mul(u, inv);
  CHECK(prod.valuation() == 0);
  CHECK(prod.coeffs()[0] == 1);
  for (std::size_t i = 1; i < prod.coeffs().size(); ++i) CHECK(prod.coeffs()[i] == 0);

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    for (const LaurentField* f : {&f2, &f5}) {
      auto a = f->sample_unit(rng);
      auto p = lf_mul(a, lf_inv(a));
      CHECK(p.valuation() == 0);
      CHECK(p.coeffs()[0] == 1);
      for (std::size_t j = 1; j < p.coeffs().size(); ++j) CHECK(p.coeffs()[j] == 0);
    }
  }
}

TEST_CASE("mod values") {
  LaurentField f(3, 8);
  auto a = mk(f, "t^-3*(1)");
  CHECK(lf_mod(a).exponent == 3);
  CHECK(lf_mod(a).value() == doctest::Approx(27.0));
  Rng rng(3);
  auto u = f.sample_unit(rng);
  CHECK(lf_mod(u).exponent == 0);
  auto b = f.sample_unit(rng);
  auto bb = lf_mul(lf_mul(f.uniformizer_power(-2), b), u);
  CHECK(lf_mod(bb).exponent == lf_mod(u).exponent + 2);
}

TEST_CASE("sampling: valuation contracts and coefficient frequencies") {
  LaurentField f(3, 6);
  Rng rng(42);
  // chi-square over the q=3 residues of all sampled ball coefficients
  long counts[3] = {0, 0, 0};
  for (int i = 0; i < 100000; ++i) {
    auto b = f.sample_ball(rng);
    if (!b.is_precision_zero()) CHECK(b.valuation() >= 0);
    auto u = f.sample_unit(rng);
    CHECK(u.valuation() == 0);
    for (long j = 0; j < u.precision(); ++j)
      if (u.valuation() + j > 0)  // coefficients past the (constrained) lead
        ++counts[u.coeffs()[static_cast<std::size_t>(j)]];
  }
  const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
  double chi2 = 0.0;
  for (long c : counts) {
    const double dev = static_cast<double>(c) - total / 3.0;
    chi2 += dev * dev / (total / 3.0);
  }
  CHECK(chi2 < 13.8);  // chi-square(2 dof) well beyond 3 sigma
}

TEST_CASE("ultrametric and ring laws on random values") {
  LaurentField f(5, 10);
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    auto a = lf_mul(f.uniformizer_power(static_cast<long>(rng() % 7) - 3), f.sample_unit(rng));
    auto b = lf_mul(f.uniformizer_power(static_cast<long>(rng() % 7) - 3), f.sample_unit(rng));
    auto c = f.sample_unit(rng);
    auto s = lf_add(a, b);
    if (!s.is_precision_zero())
      CHECK(s.valuation() >= std::min(a.valuation(), b.valuation()));
    if (a.valuation() != b.valuation())
      CHECK(s.valuation() == std::min(a.valuation(), b.valuation()));
    CHECK(lf_mul(a, b).valuation() == a.valuation() + b.valuation());
    // commutativity / associativity / distributivity on retained windows
    CHECK(lf_mul(a, b).same_window_equal(lf_mul(b, a)));
    CHECK(lf_add(a, b).same_window_equal(lf_add(b, a)));
    auto lhs = lf_mul(lf_mul(a, b), c);
    auto rhs = lf_mul(a, lf_mul(b, c));
    CHECK(lhs.valuation() == rhs.valuation());
    CHECK(lhs.same_window_equal(rhs));
    auto d1 = lf_mul(a, lf_add(b, c));
    auto d2 = lf_add(lf_mul(a, b), lf_mul(a, c));
    if (!d1.is_precision_zero() && !d2.is_precision_zero()) {
      CHECK(d1.valuation() == d2.valuation());
    }
  }
}

TEST_CASE("gf2 packed convolution agrees with the generic path") {
  // precision above the packed-path threshold vs below: same leading window
  LaurentField wide(2, 48), narrow(2, 20);
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    auto aw = wide.sample_unit(rng);
    auto bw = wide.sample_unit(rng);
    std::vector<std::uint8_t> ac(aw.coeffs().begin(), aw.coeffs().begin() + 20);
    std::vector<std::uint8_t> bc(bw.coeffs().begin(), bw.coeffs().begin() + 20);
    auto an = LaurentNumber::from_coeffs(2, 0, ac);
    auto bn = LaurentNumber::from_coeffs(2, 0, bc);
    auto pw = lf_mul(aw, bw);
    auto pn = lf_mul(an, bn);
    for (long j = 0; j < pn.precision(); ++j)
      CHECK(pw.coeffs()[static_cast<std::size_t>(j)] == pn.coeffs()[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("parse/to_string roundtrip and error paths") {
  LaurentField f(7, 6);
  for (const char* s : {"t^-2*(3 + 1*t + 6*t^4)", "t^0*(1)", "t^3*(2 + 5*t^2)"}) {
    auto v = f.parse(s);
    CHECK(f.to_string(v) == s);
  }
  CHECK(f.parse("0").is_zero());
  CHECK_THROWS_AS(f.parse("t^0*(9)"), invariant_violation);
  CHECK_THROWS_AS((void)LaurentField(4, 8), invariant_violation);
  CHECK_THROWS_AS((void)f.zero().valuation(), invariant_violation);
  CHECK_THROWS_AS((void)lf_inv(f.zero()), invariant_violation);
}
