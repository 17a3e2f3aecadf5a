#include <doctest.h>

#include <cmath>

#include "rwlab/measure.hpp"
#include "rwlab/radial_free.hpp"
#include "rwlab/series.hpp"

using namespace rwlab;

TEST_CASE("ratio diagnostics: closed form on Z") {
  Group z("z:1");
  auto series = we_return_series(z, Measure<Rational>::srw(z), 12);
  auto diag = we_spectral_diagnostics(series);
  // r_n = (2n+1)/(2n+2)
  for (std::size_t n = 0; n < diag.ratios.size(); ++n) {
    Rational expect(2 * static_cast<long>(n) + 3, 2 * static_cast<long>(n) + 4);
    expect.canonicalize();
    CHECK(diag.ratios[n] == expect);
  }
  CHECK(diag.ratios_in_unit_interval);
  CHECK(diag.ratios_nondecreasing);
  CHECK(diag.log_convex);
}

TEST_CASE("ratio limit on the free group approaches 3/4") {
  auto fa = RadialFreeWalk(2).return_series(500);
  ReturnSeries<Rational> series{GroupDesc{GroupKind::Free, 2}, "radial", fa, 0};
  auto diag = we_spectral_diagnostics(series);
  const double last = to_double(diag.ratios.back());
  CHECK(std::abs(last - 0.75) <= 0.005);
  CHECK(diag.ratios_nondecreasing);
  CHECK(diag.log_convex);
}

TEST_CASE("diagnostics flag a corrupted series") {
  ReturnSeries<double> bad{GroupDesc{}, "synthetic", {0.5, 0.4, 0.35, 0.2}, 0};
  CHECK_THROWS_AS((void)we_spectral_diagnostics(bad), invariant_violation);
}

TEST_CASE("decay fits classify the three synthetic laws") {
  std::vector<double> poly, stretched, expo;
  for (int n = 1; n <= 200; ++n) {
    poly.push_back(std::pow(n, -0.5));
    stretched.push_back(std::exp(-std::cbrt(static_cast<double>(n))));
    expo.push_back(std::pow(0.75, n));
  }
  auto fp = we_decay_fit(poly, 10, 200);
  CHECK(fp.best == "polynomial");
  CHECK(fp.poly_exponent == doctest::Approx(0.5).epsilon(1e-6));
  auto fs = we_decay_fit(stretched, 10, 200);
  CHECK(fs.best == "stretched");
  CHECK(fs.stretched_exponent == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  auto fe = we_decay_fit(expo, 10, 200);
  CHECK(fe.best == "exponential");
  CHECK(fe.exp_rate == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-6));
  CHECK_THROWS_AS((void)we_decay_fit(poly, 1, 4), invariant_violation);
}

TEST_CASE("stability search: identical series give a=1, b=1") {
  std::vector<double> s;
  for (int n = 1; n <= 50; ++n) s.push_back(std::pow(0.8, n));
  auto rep = we_stability_compare(s, s);
  CHECK(rep.forward.found);
  CHECK(rep.forward.b == 1);
  CHECK(rep.forward.a == doctest::Approx(1.0));
  CHECK(rep.backward.found);
  CHECK(rep.backward.a == doctest::Approx(1.0));
}

TEST_CASE("stability search: Z SRW vs lazy both ways, vs free group one way fails") {
  Group z("z:1");
  auto srw = to_doubles(we_return_series(z, Measure<Rational>::srw(z), 60).a);
  auto lazy = to_doubles(we_return_series(z, Measure<Rational>::lazy(z, rational_from(1, 2)), 60).a);
  auto rep = we_stability_compare(srw, lazy, 4, 1e3);
  CHECK(rep.forward.found);
  CHECK(rep.backward.found);

  auto srw_long = to_doubles(we_return_series(z, Measure<Rational>::srw(z), 120).a);
  auto free_a = to_doubles(RadialFreeWalk(2).return_series(120));
  auto cross = we_stability_compare(free_a, srw_long, 4, 1e3);
  // free decays exponentially, Z polynomially: domination only one way round
  CHECK(cross.forward.found);
  CHECK_FALSE(cross.backward.found);
}
