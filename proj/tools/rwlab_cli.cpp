// Command-line front end: every pipeline as a subcommand emitting versioned
// CSV/JSON. Exit codes: 0 success, 1 usage error, 2 violated invariant.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwlab/fast_series.hpp"
#include "rwlab/groups.hpp"
#include "rwlab/laurent.hpp"
#include "rwlab/measure.hpp"
#include "rwlab/radial_free.hpp"
#include "rwlab/series.hpp"
#include "rwlab/sol.hpp"
#include "rwlab/trace.hpp"

using nlohmann::json;
using namespace rwlab;

namespace {

constexpr int kSchema = 1;

std::string g_command_line;

struct Output {
  std::string path;
  std::ofstream file;

  std::ostream& stream() {
    if (path.empty()) return std::cout;
    if (!file.is_open()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
    }
    return file;
  }
};

void csv_header(std::ostream& os, std::uint64_t seed) {
  os << "# schema: " << kSchema << "\n# command: " << g_command_line << "\n# seed: " << seed << "\n";
}

json json_header(std::uint64_t seed) {
  return json{{"schema", kSchema}, {"command", g_command_line}, {"seed", seed}};
}

std::string g_format;  // "" = subcommand default, else csv|json

// Render a flat report object in the requested format; CSV gets key,value rows.
void emit_report(Output& out, const json& j, std::uint64_t seed) {
  auto& os = out.stream();
  if (g_format == "csv") {
    csv_header(os, seed);
    os << "key,value\n";
    for (const auto& [key, value] : j.items()) {
      if (key == "schema" || key == "command" || key == "seed") continue;
      os << key << "," << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    }
  } else {
    os << j.dump(2) << "\n";
  }
}

Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw CLI::ValidationError("not a rational: " + s);
  r.canonicalize();
  return r;
}

template <class S>
S scalar_from_string(const std::string& s);

template <>
Rational scalar_from_string<Rational>(const std::string& s) {
  return parse_rational(s);
}

template <>
double scalar_from_string<double>(const std::string& s) {
  return std::stod(s);
}

// Measure specs: srw | lazy:p | uniform-ball:r | uniform-gens:g1;g2;...
// where each gi is a comma-separated Elem encoding (symmetric closure taken).
template <class S>
Measure<S> parse_measure(const Group& g, const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "srw") return Measure<S>::srw(g);
  if (name == "lazy") return Measure<S>::lazy(g, scalar_from_string<S>(arg.empty() ? "1/2" : arg));
  if (name == "uniform-ball") return Measure<S>::uniform_ball(g, arg.empty() ? 1 : std::stoi(arg));
  if (name == "uniform-gens") {
    std::vector<Elem> base;
    std::istringstream is(arg);
    std::string tok;
    while (std::getline(is, tok, ';')) {
      Elem e;
      std::istringstream es(tok);
      std::string num;
      while (std::getline(es, num, ',')) e.d.push_back(std::stoi(num));
      base.push_back(e);
    }
    return Measure<S>::uniform_on(g, GeneratingSet::symmetric_closure(g, base).elems);
  }
  throw CLI::ValidationError("unknown measure spec: " + spec);
}

GeneratingSet parse_uset(const Group& g, const std::string& spec) {
  if (spec == "std") return GeneratingSet::standard(g);
  const auto colon = spec.find(':');
  if (spec.substr(0, colon) == "ball") {
    const int r = colon == std::string::npos ? 1 : std::stoi(spec.substr(colon + 1));
    GeneratingSet u;
    for (const auto& [e, d] : gc_ball(g, GeneratingSet::standard(g), r)) u.elems.push_back(e);
    return u;
  }
  throw CLI::ValidationError("unknown generating-set spec: " + spec);
}

std::string rational_str(const Rational& r) { return r.get_str(); }

template <class S>
void emit_return_series(const Group&, const ReturnSeries<S>& series, Output& out, std::uint64_t seed) {
  auto& os = out.stream();
  const auto diagnostics = we_spectral_diagnostics(series);
  if (g_format == "json") {
    json j = json_header(seed);
    json rows = json::array();
    for (std::size_t i = 0; i < series.size(); ++i) {
      json row{{"n", i + 1}, {"log_a", std::log(to_double(series.a[i]))}};
      if constexpr (std::is_same_v<S, Rational>)
        row["a_n"] = rational_str(series.a[i]);
      else
        row["a_n"] = series.a[i];
      if (i + 1 < series.size()) row["ratio"] = to_double(series.a[i + 1]) / to_double(series.a[i]);
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["norm_squared_estimate"] = to_double(diagnostics.norm_squared_estimate);
    j["richardson_estimate"] = diagnostics.richardson_estimate;
    j["max_support"] = series.max_support;
    os << j.dump(2) << "\n";
    return;
  }
  csv_header(os, seed);
  os << "n,a_n,ratio,log_a\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double an = to_double(series.a[i]);
    os << (i + 1) << ",";
    if constexpr (std::is_same_v<S, Rational>)
      os << rational_str(series.a[i]);
    else
      os << an;
    os << "," << (i + 1 < series.size() ? std::to_string(to_double(series.a[i + 1]) / an) : "")
       << "," << std::log(an) << "\n";
  }
  os << "# norm_squared_estimate: " << to_double(diagnostics.norm_squared_estimate) << "\n"
     << "# richardson_estimate: " << diagnostics.richardson_estimate << "\n"
     << "# max_support: " << series.max_support << "\n";
}

template <class S>
int run_walk_return(const std::string& group_s, const std::string& measure_s, int n, Output& out) {
  Group g(group_s);
  auto mu = parse_measure<S>(g, measure_s);
  auto series = we_return_series(g, mu, n);
  emit_return_series(g, series, out, 0);
  return 0;
}

template <class S>
int run_walk_dirichlet(const std::string& group_s, const std::string& measure_s, int trials, int radius,
                       std::uint64_t seed, Output& out) {
  Group g(group_s);
  auto mu = parse_measure<S>(g, measure_s);
  Rng rng(seed);
  double max_diff = 0.0;
  int exact_equal = 0;
  for (int i = 0; i < trials; ++i) {
    auto f = random_test_function<S>(g, radius, 8, rng);
    auto dv = we_dirichlet_form(g, f, mu);
    if (dv.quadratic_form == dv.double_sum) ++exact_equal;
    max_diff = std::max(max_diff, std::abs(to_double(dv.difference())));
    if constexpr (std::is_same_v<S, Rational>) {
      if (!(dv.quadratic_form == dv.double_sum))
        throw invariant_violation("dual Dirichlet evaluations differ in exact mode");
    }
  }
  json j = json_header(seed);
  j["trials"] = trials;
  j["exact_equal"] = exact_equal;
  j["max_difference"] = max_diff;
  emit_report(out, j, seed);
  return 0;
}

template <class S>
int run_walk_compare(const std::string& group_s, const std::string& m1_s, const std::string& m2_s,
                     const std::string& uset_s, int trials, int radius, std::uint64_t seed, Output& out) {
  Group g(group_s);
  auto f1 = parse_measure<S>(g, m1_s);
  auto f2 = parse_measure<S>(g, m2_s);
  auto u = parse_uset(g, uset_s);
  auto rep = we_comparison_constant(g, f1, f2, u);
  Rng rng(seed);
  std::vector<SparseFunc<S>> fs;
  for (int i = 0; i < trials; ++i) fs.push_back(random_test_function<S>(g, radius, 8, rng));
  we_comparison_verify(g, f1, f2, rep, fs);
  json j = json_header(seed);
  j["r_min"] = to_double(rep.r_min);
  j["moment2"] = to_double(rep.moment2);
  j["constant"] = to_double(rep.constant);
  if constexpr (std::is_same_v<S, Rational>) j["constant_exact"] = rational_str(rep.constant);
  j["checked"] = rep.checked;
  j["violations"] = rep.violations;
  if (rep.violations > 0) throw invariant_violation("Dirichlet comparison violated");
  emit_report(out, j, seed);
  return 0;
}

template <class S>
int run_walk_stability(const std::string& g1_s, const std::string& m1_s, const std::string& g2_s,
                       const std::string& m2_s, int n, int b_max, double a_cap, Output& out) {
  Group g1(g1_s), g2(g2_s);
  auto s1 = we_return_series(g1, parse_measure<S>(g1, m1_s), n);
  auto s2 = we_return_series(g2, parse_measure<S>(g2, m2_s), n);
  auto rep = we_stability_compare(to_doubles(s1.a), to_doubles(s2.a), b_max, a_cap);
  json j = json_header(0);
  auto dir = [](const StabilityDirection& d) {
    return json{{"found", d.found}, {"a", d.a}, {"b", d.b}, {"r", d.r}};
  };
  j["forward"] = dir(rep.forward);
  j["backward"] = dir(rep.backward);
  j["b_max"] = rep.b_max;
  j["a_cap"] = rep.a_cap;
  emit_report(out, j, 0);
  return 0;
}

template <class S>
int run_walk_fit(const std::string& group_s, const std::string& measure_s, int n, std::size_t lo,
                 std::size_t hi, Output& out) {
  Group g(group_s);
  auto series = we_return_series(g, parse_measure<S>(g, measure_s), n);
  if (hi == 0) hi = series.size();
  auto fit = we_decay_fit(to_doubles(series.a), lo, hi);
  json j = json_header(0);
  j["window"] = {lo, hi};
  j["poly_exponent"] = fit.poly_exponent;
  j["poly_residual"] = fit.poly_residual;
  j["stretched_exponent"] = fit.stretched_exponent;
  j["stretched_residual"] = fit.stretched_residual;
  j["exp_rate"] = fit.exp_rate;
  j["exp_residual"] = fit.exp_residual;
  j["best"] = fit.best;
  emit_report(out, j, 0);
  return 0;
}

int run_trace_prop2(int trials, int dim_lo, int dim_hi, int specs, std::uint64_t seed, Output& out) {
  Rng rng(seed);
  std::uniform_int_distribution<int> dims(dim_lo, dim_hi);
  CheckReport total;
  for (int i = 0; i < trials; ++i) {
    const int dim = dims(rng);
    auto [lower, upper] = tl_random_ordered_pair(dim, 1.0, rng);  // I - lower <= I - upper, so lower >= upper
    for (int s = 0; s < specs; ++s) {
      auto spec = StepFunctionSpec::random(rng);
      auto rep = tl_check_prop2(upper, lower, spec);
      total.checks += rep.checks;
      total.violations += rep.violations;
      total.worst_margin = std::min(total.worst_margin, rep.worst_margin);
      total.ok = total.ok && rep.ok;
    }
  }
  json j = json_header(seed);
  j["trials"] = trials;
  j["dims"] = {dim_lo, dim_hi};
  j["checks"] = total.checks;
  j["violations"] = total.violations;
  j["worst_margin"] = total.worst_margin;
  emit_report(out, j, seed);
  if (!total.ok) throw invariant_violation("trace monotonicity violated");
  return 0;
}

int run_trace_lemma2(int pairs, int grid, std::uint64_t seed, Output& out) {
  Rng rng(seed);
  std::uniform_real_distribution<double> uc(0.02, 0.98), ut(1.0, 40.0);
  CheckReport total;
  for (int i = 0; i < pairs; ++i) {
    const double c = uc(rng), t = ut(rng);
    auto rep = tl_check_lemma2(c, t, grid);
    total.checks += rep.checks;
    total.violations += rep.violations;
    total.worst_margin = std::min(total.worst_margin, rep.worst_margin);
    total.ok = total.ok && rep.ok;
  }
  json j = json_header(seed);
  j["pairs"] = pairs;
  j["grid"] = grid;
  j["checks"] = total.checks;
  j["violations"] = total.violations;
  j["worst_margin"] = total.worst_margin;
  emit_report(out, j, seed);
  if (!total.ok) throw invariant_violation("scalar inequality grid violated");
  return 0;
}

int run_trace_thm1(int trials, int dim_lo, int dim_hi, std::uint64_t seed, Output& out) {
  Rng rng(seed);
  std::uniform_int_distribution<int> dims(dim_lo, dim_hi);
  std::uniform_real_distribution<double> uC(1.5, 20.0);
  const double mults[] = {3.0, 5.0, 10.0};
  int violations = 0, checks = 0;
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const int dim = dims(rng);
    const double C = uC(rng);
    const double t = mults[i % 3] * C;  // t = m / c with c = 1/C
    auto [x, y] = tl_random_ordered_pair(dim, C, rng);
    auto rep = tl_check_thm1_chain(x, y, C, t);
    for (const CheckReport* step : {&rep.step1, &rep.step2, &rep.step3}) {
      checks += step->checks;
      violations += step->violations;
      worst = std::min(worst, step->worst_margin);
    }
  }
  json j = json_header(seed);
  j["trials"] = trials;
  j["dims"] = {dim_lo, dim_hi};
  j["checks"] = checks;
  j["violations"] = violations;
  j["worst_margin"] = worst;
  emit_report(out, j, seed);
  if (violations > 0) throw invariant_violation("trace domination chain violated");
  return 0;
}

int run_sol_lower_bound(int q, long t_single, long tmax, Output& out) {
  std::vector<long> ts;
  if (t_single > 0)
    ts.push_back(t_single);
  else
    for (long t = 16; t <= tmax; t *= 2) ts.push_back(t);
  auto& os = out.stream();
  const bool as_json = g_format == "json";
  json rows = json::array();
  if (!as_json) {
    csv_header(os, 0);
    os << "t,n_star,confined_prob,volume,bound,log_neg_log_bound\n";
  }
  std::vector<double> log_t, loglog;
  for (long t : ts) {
    auto res = ss_lower_bound(t, q, ss_default_n_grid(t, q));
    const LowerBoundPoint* star = nullptr;
    for (const auto& pt : res.table)
      if (pt.n == res.n_star) star = &pt;
    if (as_json) {
      rows.push_back(json{{"t", t},
                          {"n_star", res.n_star},
                          {"confined_prob", std::exp(star->log_confined)},
                          {"volume", std::exp(star->log_volume)},
                          {"bound", std::exp(res.log_bound)},
                          {"log_neg_log_bound", std::log(-res.log_bound)}});
    } else {
      os << t << "," << res.n_star << "," << std::exp(star->log_confined) << ","
         << std::exp(star->log_volume) << "," << std::exp(res.log_bound) << ","
         << std::log(-res.log_bound) << "\n";
    }
    log_t.push_back(std::log(static_cast<double>(t)));
    loglog.push_back(std::log(-res.log_bound));
  }
  json j = json_header(0);
  j["q"] = q;
  if (ts.size() >= 3) {
    auto fit = least_squares(log_t, loglog);
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["residual"] = fit.residual;
  }
  if (as_json) {
    j["rows"] = std::move(rows);
    os << j.dump(2) << "\n";
  } else {
    os << "# summary: " << j.dump() << "\n";
  }
  return 0;
}

int run_sol_mc(int q, long t, int n, long samples, std::uint64_t seed, Output& out) {
  if (n < 0) n = ss_lower_bound(t, q, ss_default_n_grid(t, q)).n_star;
  auto est = ss_monte_carlo_return(q, t, n, samples, seed);
  json j = json_header(seed);
  j["q"] = q;
  j["t"] = est.t;
  j["n"] = est.n;
  j["samples"] = est.samples;
  j["hits"] = est.hits;
  j["discarded"] = est.discarded;
  j["estimate"] = est.estimate();
  j["ci_low"] = est.ci_low();
  j["ci_high"] = est.ci_high();
  emit_report(out, j, seed);
  return 0;
}

int run_sol_lemma3(int q, int n, int length, long trials, int precision, std::uint64_t seed, Output& out) {
  SolSampler sampler{LaurentField(q, precision)};
  Rng rng(seed);
  auto rep = ss_lemma3_check(sampler, n, length, trials, rng);
  json j = json_header(seed);
  j["q"] = q;
  j["n"] = n;
  j["length"] = length;
  j["trials"] = rep.trials;
  j["confined_prefixes"] = rep.confined_prefixes;
  j["violations"] = rep.violations;
  j["uncertifiable"] = rep.uncertifiable;
  emit_report(out, j, seed);
  if (rep.violations > 0) throw invariant_violation("confined prefix left the box");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::ostringstream cmd;
  for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
  g_command_line = cmd.str();

  CLI::App app{"random-walk return-probability laboratory"};
  app.require_subcommand(1);

  std::string group = "z:1", group2, measure = "srw", measure2, uset = "ball:1", mode = "exact", out_path;
  int n = 10, radius = 2, trials = 100, b_max = 4, grid = 10000, dim_lo = 2, dim_hi = 30, specs = 10;
  int q = 2, box_n = -1, length = 50, precision = 0;
  std::size_t win_lo = 1, win_hi = 0;
  double a_cap = 1e6;
  long t = 0, tmax = 0, samples = 100000;
  std::uint64_t seed = 12345;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--mode", mode, "exact|float")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--format", g_format, "csv|json (default depends on subcommand)")
        ->check(CLI::IsMember({"csv", "json"}));
    return sub;
  };

  auto* walk = app.add_subcommand("walk", "convolution-power pipelines");
  auto* wret = add_common(walk->add_subcommand("return", "return-probability series"));
  wret->add_option("--group", group);
  wret->add_option("--measure", measure);
  wret->add_option("--n", n, "series length");
  auto* wdir = add_common(walk->add_subcommand("dirichlet", "dual Dirichlet evaluations"));
  wdir->add_option("--group", group);
  wdir->add_option("--measure", measure);
  wdir->add_option("--trials", trials);
  wdir->add_option("--radius", radius, "support radius of random test functions");
  auto* wcmp = add_common(walk->add_subcommand("compare", "Dirichlet comparison constant"));
  wcmp->add_option("--group", group);
  wcmp->add_option("--measure", measure);
  wcmp->add_option("--measure2", measure2)->required();
  wcmp->add_option("--uset", uset, "generating set: std | ball:r");
  wcmp->add_option("--trials", trials);
  wcmp->add_option("--radius", radius);
  auto* wsta = add_common(walk->add_subcommand("stability", "two-sided stability search"));
  wsta->add_option("--group", group);
  wsta->add_option("--measure", measure);
  wsta->add_option("--group2", group2);
  wsta->add_option("--measure2", measure2)->required();
  wsta->add_option("--n", n);
  wsta->add_option("--bmax", b_max);
  wsta->add_option("--acap", a_cap);
  auto* wfit = add_common(walk->add_subcommand("fit", "decay-law fits"));
  wfit->add_option("--group", group);
  wfit->add_option("--measure", measure);
  wfit->add_option("--n", n);
  wfit->add_option("--lo", win_lo);
  wfit->add_option("--hi", win_hi);

  auto* trace = app.add_subcommand("trace", "matrix trace-inequality sweeps");
  auto* tp2 = add_common(trace->add_subcommand("prop2", "trace monotonicity"));
  tp2->add_option("--trials", trials);
  tp2->add_option("--dim-lo", dim_lo);
  tp2->add_option("--dim-hi", dim_hi);
  tp2->add_option("--specs", specs);
  auto* tl2 = add_common(trace->add_subcommand("lemma2", "scalar inequality grids"));
  tl2->add_option("--pairs", trials);
  tl2->add_option("--grid", grid);
  auto* tt1 = add_common(trace->add_subcommand("thm1", "domination proof chain"));
  tt1->add_option("--trials", trials);
  tt1->add_option("--dim-lo", dim_lo);
  tt1->add_option("--dim-hi", dim_hi);

  auto* sol = app.add_subcommand("sol", "solvable-group lower-bound pipelines");
  auto* slb = add_common(sol->add_subcommand("lower-bound", "box lower bound"));
  slb->add_option("--q", q);
  slb->add_option("--t", t);
  slb->add_option("--tmax", tmax);
  auto* smc = add_common(sol->add_subcommand("mc", "Monte Carlo box probability"));
  smc->add_option("--q", q);
  smc->add_option("--t", t)->required();
  smc->add_option("--n", box_n, "box parameter (default: optimizer's n*)");
  smc->add_option("--samples", samples);
  auto* sl3 = add_common(sol->add_subcommand("lemma3", "confinement check"));
  sl3->add_option("--q", q);
  sl3->add_option("--n", box_n);
  sl3->add_option("--length", length);
  sl3->add_option("--trials", samples);
  sl3->add_option("--precision", precision);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Output out;
  out.path = out_path;
  const bool exact = mode == "exact";
  try {
    if (wret->parsed())
      return exact ? run_walk_return<Rational>(group, measure, n, out)
                   : run_walk_return<double>(group, measure, n, out);
    if (wdir->parsed())
      return exact ? run_walk_dirichlet<Rational>(group, measure, trials, radius, seed, out)
                   : run_walk_dirichlet<double>(group, measure, trials, radius, seed, out);
    if (wcmp->parsed())
      return exact ? run_walk_compare<Rational>(group, measure, measure2, uset, trials, radius, seed, out)
                   : run_walk_compare<double>(group, measure, measure2, uset, trials, radius, seed, out);
    if (wsta->parsed()) {
      const std::string g2 = group2.empty() ? group : group2;
      return exact ? run_walk_stability<Rational>(group, measure, g2, measure2, n, b_max, a_cap, out)
                   : run_walk_stability<double>(group, measure, g2, measure2, n, b_max, a_cap, out);
    }
    if (wfit->parsed())
      return exact ? run_walk_fit<Rational>(group, measure, n, win_lo, win_hi, out)
                   : run_walk_fit<double>(group, measure, n, win_lo, win_hi, out);
    if (tp2->parsed()) return run_trace_prop2(trials, dim_lo, dim_hi, specs, seed, out);
    if (tl2->parsed()) return run_trace_lemma2(trials, grid, seed, out);
    if (tt1->parsed()) return run_trace_thm1(trials, dim_lo, dim_hi, seed, out);
    if (slb->parsed()) {
      if (t <= 0 && tmax <= 0) throw CLI::ValidationError("sol lower-bound: need --t or --tmax");
      return run_sol_lower_bound(q, t, tmax, out);
    }
    if (smc->parsed()) return run_sol_mc(q, t, box_n, samples, seed, out);
    if (sl3->parsed()) {
      if (box_n < 0) box_n = 3;
      if (precision <= 0) precision = 4 * length + 8;
      return run_sol_lemma3(q, box_n, length, samples, precision, seed, out);
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const invariant_violation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
