// Acceptance gate: one pass/fail line per criterion; nonzero exit if any fails.
// argv[1] = path to the CLI binary (criterion 1 exercises the external interface).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rwlab/fast_series.hpp"
#include "rwlab/measure.hpp"
#include "rwlab/radial_free.hpp"
#include "rwlab/series.hpp"
#include "rwlab/sol.hpp"
#include "rwlab/trace.hpp"

using namespace rwlab;

namespace {

int g_failures = 0;

void report(int idx, const std::string& what, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << idx << ": " << what;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_cli(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  pclose(p);
  return out;
}

// --- criterion 1: exact oracle on the line, via the CLI ---
void criterion1(const std::string& cli) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string csv = run_cli(cli + " walk return --group z:1 --measure srw --n 20 --mode exact");
  int matched = 0;
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
    std::istringstream ls(line);
    std::string ns, as;
    std::getline(ls, ns, ',');
    std::getline(ls, as, ',');
    const unsigned long n = std::stoul(ns);
    Rational expect(binomial(2 * n, n), ipow(4, n));
    expect.canonicalize();
    Rational got;
    if (got.set_str(as, 10) != 0) continue;
    got.canonicalize();
    if (got == expect) ++matched;
  }
  const double dt = seconds_since(t0);
  report(1, "binomial oracle on the line, 20 exact values via CLI", matched == 20 && dt < 1.0,
         "matched " + std::to_string(matched) + "/20 in " + std::to_string(dt) + "s");
}

// --- criterion 2: ratio/log-convexity package, exact ---
void criterion2() {
  bool ok = true;
  std::string detail;
  try {
    Group z("z:1");
    auto sz = we_return_series(z, Measure<Rational>::srw(z), 30);
    (void)we_spectral_diagnostics(sz);

    ReturnSeries<Rational> sf{GroupDesc{GroupKind::Free, 2}, "radial", RadialFreeWalk(2).return_series(200), 0};
    (void)we_spectral_diagnostics(sf);

    Group ll("lamplighter:2");
    auto sl = we_return_series(ll, Measure<Rational>::srw(ll), 12);
    (void)we_spectral_diagnostics(sl);
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(2, "ratio monotonicity and log-convexity, zero tolerance on three groups", ok, detail);
}

// --- criterion 3: ratio limit on the free group ---
void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  auto a = RadialFreeWalk(2).return_series(500);
  const double ratio = to_double(a[499] / a[498]);
  const double dt = seconds_since(t0);
  report(3, "free-group ratio a_500/a_499 within 0.005 of 3/4", std::abs(ratio - 0.75) <= 0.005 && dt < 5.0,
         "ratio " + std::to_string(ratio) + " in " + std::to_string(dt) + "s");
}

// --- criterion 4: dual Dirichlet evaluations, exact ---
void criterion4() {
  Rng rng(424242);
  int equal = 0;
  for (const char* desc : {"lamplighter:2", "z:2"}) {
    Group g(desc);
    auto mu = Measure<Rational>::srw(g);
    for (int i = 0; i < 100; ++i) {
      auto f = random_test_function<Rational>(g, 2, 6, rng);
      auto dv = we_dirichlet_form(g, f, mu);
      if (dv.quadratic_form == dv.double_sum) ++equal;
    }
  }
  report(4, "quadratic-form and double-sum Dirichlet values identical rationals", equal == 200,
         std::to_string(equal) + "/200");
}

// --- criterion 5: comparison constant and empirical domination ---
void criterion5() {
  bool ok = true;
  std::string detail;
  try {
    Group z("z:1");
    auto f1 = Measure<Rational>::srw(z);
    auto f2 = Measure<Rational>::uniform_ball(z, 2);
    GeneratingSet u;
    for (const auto& [e, d] : gc_ball(z, GeneratingSet::standard(z), 1)) u.elems.push_back(e);
    auto rep = we_comparison_constant(z, f1, f2, u);
    if (rep.constant != rational_from(20, 3)) {
      ok = false;
      detail = "C != 20/3";
    }
    Rng rng(55555);
    std::vector<SparseFunc<Rational>> fs;
    for (int i = 0; i < 100; ++i) fs.push_back(random_test_function<Rational>(z, 3, 6, rng));
    we_comparison_verify(z, f1, f2, rep, fs);
    if (rep.violations != 0) ok = false;

    Group ll("lamplighter:2");
    auto g1 = Measure<Rational>::srw(ll);
    auto g2 = Measure<Rational>::uniform_ball(ll, 2);
    GeneratingSet ul;
    for (const auto& [e, d] : gc_ball(ll, GeneratingSet::standard(ll), 1)) ul.elems.push_back(e);
    auto rep2 = we_comparison_constant(ll, g1, g2, ul);
    std::vector<SparseFunc<Rational>> fs2;
    for (int i = 0; i < 100; ++i) fs2.push_back(random_test_function<Rational>(ll, 2, 6, rng));
    we_comparison_verify(ll, g1, g2, rep2, fs2);
    if (rep2.violations != 0) ok = false;
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(5, "comparison constant 20/3 on the line plus empirical domination, both harnesses", ok, detail);
}

// --- criterion 6: two-sided stability within caps ---
void criterion6() {
  bool ok = true;
  std::string detail;
  try {
    auto srw = to_doubles(zz_return_series_dense({Integer(1), Integer(0), Integer(1)}, 2000).a);
    auto lazy = to_doubles(zz_return_series_dense({Integer(1), Integer(2), Integer(1)}, 2000).a);
    auto repz = we_stability_compare(srw, lazy, 4, 1e3);
    if (!repz.forward.found || !repz.backward.found) {
      ok = false;
      detail = "line pair not matched";
    }

    Group ll("lamplighter:2");
    auto base = GeneratingSet::standard(ll);
    auto rich = GeneratingSet::symmetric_closure(ll, {Elem{{1}}, Elem{{0, 0, 1}}, Elem{{1, 0, 1}}});
    auto s1 = to_doubles(ll_return_series_packed(ll, base, 20).a);
    auto s2 = to_doubles(ll_return_series_packed(ll, rich, 20).a);
    auto repl = we_stability_compare(s1, s2, 4, 1e3);
    if (!repl.forward.found || !repl.backward.found) {
      ok = false;
      detail += " lamplighter pair not matched";
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(6, "stability constants found both directions within caps, line and lamplighter", ok, detail);
}

// --- criterion 7: trace-inequality suite ---
void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  try {
    Rng rng(777);
    std::uniform_real_distribution<double> uc(0.02, 0.98), ut(1.0, 40.0);
    for (int i = 0; i < 25; ++i) {
      auto rep = tl_check_lemma2(uc(rng), ut(rng), 10000);
      if (rep.violations != 0) {
        ok = false;
        detail = "scalar grid violation";
      }
    }
    std::uniform_int_distribution<int> dims(2, 30);
    for (int i = 0; i < 1000; ++i) {
      auto [lower, upper] = tl_random_ordered_pair(dims(rng), 1.0, rng);
      for (int s = 0; s < 10; ++s) {
        auto rep = tl_check_prop2(upper, lower, StepFunctionSpec::random(rng));
        if (rep.violations != 0) {
          ok = false;
          detail = "monotonicity violation";
        }
      }
    }
    std::uniform_real_distribution<double> uC(1.5, 20.0);
    const double mults[] = {3.0, 5.0, 10.0};
    for (int i = 0; i < 500; ++i) {
      const double C = uC(rng);
      auto [x, y] = tl_random_ordered_pair(dims(rng), C, rng);
      auto rep = tl_check_thm1_chain(x, y, C, mults[i % 3] * C);
      if (!rep.ok()) {
        ok = false;
        detail = "chain violation";
      }
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  const double dt = seconds_since(t0);
  report(7, "scalar grids, 1000 monotonicity pairs, 500 domination chains", ok && dt < 60.0,
         detail.empty() ? std::to_string(dt) + "s" : detail);
}

// --- criterion 8: confinement on random words ---
void criterion8() {
  SolSampler sampler{LaurentField(2, 64)};
  Rng rng(88888);
  auto rep = ss_lemma3_check(sampler, 10, 50, 100000, rng);
  report(8, "100000 random words: every confined prefix lands in the box",
         rep.violations == 0 && rep.uncertifiable == 0 && rep.confined_prefixes > 0,
         std::to_string(rep.confined_prefixes) + " confined prefixes, " +
             std::to_string(rep.violations) + " violations");
}

// --- criterion 9: lower-bound slope ---
void criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> log_t, loglog;
  for (long t = 1 << 10; t <= 1 << 20; t <<= 1) {
    auto res = ss_lower_bound(t, 2, ss_default_n_grid(t, 2));
    log_t.push_back(std::log(static_cast<double>(t)));
    loglog.push_back(std::log(-res.log_bound));
  }
  auto fit = least_squares(log_t, loglog);
  const double dt = seconds_since(t0);
  report(9, "regression slope of log(-log bound) vs log t in [0.30, 0.37]",
         fit.slope >= 0.30 && fit.slope <= 0.37 && dt < 600.0,
         "slope " + std::to_string(fit.slope) + " in " + std::to_string(dt) + "s");
}

// --- criterion 10: Monte Carlo vs DP coherence ---
void criterion10() {
  auto lb = ss_lower_bound(64, 2, ss_default_n_grid(64, 2));
  auto est = ss_monte_carlo_return(2, 64, lb.n_star, 1000000, 101010);
  const double confined = std::exp(ss_confined_dp(ProjectedKernel::standard(), lb.n_star, 128).log_prob);
  const bool coherent = est.estimate() >= confined - 3 * est.sigma();
  const bool clean = est.discarded * 10000 < est.samples;  // < 0.01%

  auto small = ss_monte_carlo_return(2, 1, 1, 200000, 202020);
  const bool small_ok = std::abs(small.estimate() - 17.0 / 25.0) <= 3 * small.sigma();

  report(10, "1e6-sample Monte Carlo sits above the confined DP and matches 17/25 at small scale",
         coherent && clean && small_ok,
         "estimate " + std::to_string(est.estimate()) + " vs confined " + std::to_string(confined) +
             ", discarded " + std::to_string(est.discarded));
}

// --- criterion 11: ball-return vs return probability ratio ---
void criterion11() {
  bool ok = true;
  std::string detail;
  try {
    Group ll("lamplighter:2");
    auto mu = Measure<Rational>::srw(ll);
    auto ball = gc_ball(ll, GeneratingSet::standard(ll), 1);
    const Rational ball_size(static_cast<int>(ball.size()));
    auto series = we_return_series(ll, mu, 12);
    auto nu = we_convolve(ll, mu, mu);  // mu^{*2n}, starting at n = 1
    for (int n = 1; n <= 12; ++n) {
      if (n > 1) {
        nu = we_convolve(ll, nu, mu);
        nu = we_convolve(ll, nu, mu);
      }
      Rational in_ball(0);
      for (const auto& [e, d] : ball) {
        auto it = nu.support.find(e);
        if (it != nu.support.end()) in_ball += it->second;
      }
      const Rational ratio = in_ball / series.a[static_cast<std::size_t>(n - 1)];
      if (ratio < Rational(1) || ratio > ball_size) {
        ok = false;
        detail = "ratio outside [1, |B|] at t=" + std::to_string(n);
      }
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(11, "P(walk in unit ball)/a_t inside [1, |B(e,1)|] for all computed t", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "./tools/rwlab";
  criterion1(cli);
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(g_failures) + " CRITERIA FAILED")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
