#pragma once

// Finite-dimensional matrix surrogate for the trace-inequality chain:
// spectral calculus on symmetric operators with spectrum in [0,1], the PSD
// order, monotonicity of the normalized trace under increasing truncated
// step functions, and the e^{-n} domination proof chain.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rwlab/common.hpp"

namespace rwlab {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kSpectrumSlack = 1e-10;
inline constexpr double kCheckSlack = 1e-9;

class SpectralOperator {
 public:
  static SpectralOperator from_matrix(const Eigen::MatrixXd& m, bool require_unit_spectrum = true) {
    if (m.rows() != m.cols()) throw invariant_violation("SpectralOperator: matrix must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
      throw invariant_violation("SpectralOperator: symmetry defect beyond tolerance");
    SpectralOperator op;
    op.m_ = (m + m.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.m_);
    op.evals_ = es.eigenvalues();
    op.evecs_ = es.eigenvectors();
    op.unit_spectrum_ = require_unit_spectrum;
    if (require_unit_spectrum &&
        (op.evals_.minCoeff() < -kSpectrumSlack || op.evals_.maxCoeff() > 1.0 + kSpectrumSlack))
      throw invariant_violation("SpectralOperator: spectrum outside [0,1]");
    return op;
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXd& eigenvectors() const { return evecs_; }
  bool unit_spectrum() const { return unit_spectrum_; }

  double normalized_trace() const { return m_.trace() / dim(); }

 private:
  Eigen::MatrixXd m_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
  bool unit_spectrum_ = false;
};

// h applied through the spectral resolution; eigenvectors unchanged.
inline SpectralOperator tl_spectral_apply(const SpectralOperator& op,
                                          const std::function<double(double)>& h) {
  if (!op.unit_spectrum()) throw invariant_violation("tl_spectral_apply: unit-spectrum flag required");
  Eigen::VectorXd mapped(op.dim());
  for (int i = 0; i < op.dim(); ++i) {
    const double lam = std::clamp(op.eigenvalues()[i], 0.0, 1.0);
    mapped[i] = h(lam);
  }
  Eigen::MatrixXd out = op.eigenvectors() * mapped.asDiagonal() * op.eigenvectors().transpose();
  return SpectralOperator::from_matrix(out, false);
}

// Mean of h over the spectrum: tau(h(M)) without forming the matrix.
inline double tl_spectral_trace(const SpectralOperator& op, const std::function<double(double)>& h) {
  double s = 0;
  for (int i = 0; i < op.dim(); ++i) s += h(std::clamp(op.eigenvalues()[i], 0.0, 1.0));
  return s / op.dim();
}

inline bool tl_psd_leq(const SpectralOperator& a, const SpectralOperator& b, double tol = kSpectrumSlack) {
  if (a.dim() != b.dim()) throw invariant_violation("tl_psd_leq: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.matrix() - a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

// h = g 1_{[r,1]} with g continuous nondecreasing, sampled on a uniform grid
// of [0,1] and interpolated piecewise-linearly.
struct StepFunctionSpec {
  double r = 0.5;
  std::vector<double> grid;  // g at i/(grid.size()-1), nondecreasing

  double g(double lambda) const {
    const double pos = lambda * static_cast<double>(grid.size() - 1);
    const auto lo = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(grid.size() - 2)));
    const double frac = pos - static_cast<double>(lo);
    return grid[lo] * (1.0 - frac) + grid[lo + 1] * frac;
  }

  double operator()(double lambda) const { return lambda < r ? 0.0 : g(lambda); }

  // Dyadic step approximation g_level(x) = g(k/2^level) on [k/2^level, (k+1)/2^level).
  double dyadic(double lambda, int level) const {
    if (lambda < r) return 0.0;
    const double scale = std::pow(2.0, level);
    const double knot = std::min(std::floor(lambda * scale) / scale, 1.0);
    return g(knot);
  }

  static StepFunctionSpec random(Rng& rng, std::size_t grid_size = 1024) {
    std::uniform_real_distribution<double> ur(0.05, 0.95);
    std::uniform_real_distribution<double> step(0.0, 1.0);
    StepFunctionSpec spec;
    spec.r = ur(rng);
    spec.grid.resize(grid_size);
    double acc = step(rng);
    for (auto& v : spec.grid) {
      acc += step(rng) / static_cast<double>(grid_size);
      v = acc;
    }
    return spec;
  }

  void validate() const {
    if (!(r > 0.0 && r < 1.0)) throw invariant_violation("StepFunctionSpec: r must lie in (0,1)");
    if (grid.size() < 2) throw invariant_violation("StepFunctionSpec: grid too small");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (grid[i] < grid[i - 1]) throw invariant_violation("StepFunctionSpec: g must be nondecreasing");
    if (g(r) < 0.0) throw invariant_violation("StepFunctionSpec: g must be >= 0 on [r,1]");
  }
};

struct CheckReport {
  bool ok = true;
  double worst_margin = 0.0;  // most negative slack observed (rhs - lhs)
  int checks = 0;
  int violations = 0;

  void record(double lhs, double rhs, double slack) {
    ++checks;
    worst_margin = std::min(worst_margin, rhs - lhs);
    if (lhs > rhs + slack) {
      ok = false;
      ++violations;
    }
  }
};

// tau(h(x)) <= tau(h(y)) for x <= y, h = g 1_{[r,1]}.
inline CheckReport tl_check_prop2(const SpectralOperator& x, const SpectralOperator& y,
                                  const StepFunctionSpec& spec) {
  spec.validate();
  if (!tl_psd_leq(x, y)) throw invariant_violation("tl_check_prop2: precondition x <= y fails");
  CheckReport rep;
  rep.record(tl_spectral_trace(x, spec), tl_spectral_trace(y, spec), kCheckSlack);
  return rep;
}

// The three scalar inequalities on lambda grids: (i) and (ii) at parameter t,
// (iii) in the time-substituted form e^{-ct}(e^{lambda c t}-1) <= lambda c t
// e^{-ct/2} + lambda^{ct/2} used downstream (requires ct/2 >= 1).
inline CheckReport tl_check_lemma2(double c, double t, int grid_size) {
  if (!(c > 0.0 && c < 1.0)) throw invariant_violation("tl_check_lemma2: c must lie in (0,1)");
  if (!(t >= 1.0)) throw invariant_violation("tl_check_lemma2: t >= 1 required");
  const double r = 1.0 - c;
  CheckReport rep;
  for (int i = 0; i <= grid_size; ++i) {
    const double u = static_cast<double>(i) / grid_size;
    const double lam_i = u * r;        // [0, r]
    const double lam_ii = r + u * c;   // [r, 1]
    const double lam_iii = u;          // [0, 1]
    rep.record(std::pow(lam_i, 2.0 * t), lam_i * std::exp(-c * t), 1e-12);
    rep.record(std::pow(lam_ii, 2.0 * t),
               std::exp((lam_ii - 1.0) * t) - std::exp(-c * t) + lam_ii * std::exp(-c * t), 1e-12);
    rep.record(std::exp(-2.0 * t) * (std::exp(2.0 * lam_iii * t) - 1.0),
               2.0 * lam_iii * t * std::exp(-t) + std::pow(lam_iii, t), 1e-12);
    if (c * t / 2.0 >= 1.0) {
      rep.record(std::exp(-c * t) * (std::exp(lam_iii * c * t) - 1.0),
                 lam_iii * c * t * std::exp(-c * t / 2.0) + std::pow(lam_iii, c * t / 2.0), 1e-12);
    }
  }
  return rep;
}

// The displayed inequalities of the e^{-n} domination proof, with
// h(lambda) = 1_{[r,1]}(lambda) (e^{(lambda-1)t} - e^{-ct}), c = 1/C:
//   (1) tau(y^{2t}) <= 2 e^{-ct} tau(y) + tau(h(y))
//   (2) tau(h(y))   <= tau(h((1-c)I + c x))
//   (3) tau(y^{2t}) <= 2 tau(y) e^{-ct} + c t e^{-ct/2} tau(x) + tau(x^{ct/2})
struct Thm1ChainReport {
  CheckReport step1, step2, step3;
  bool ok() const { return step1.ok && step2.ok && step3.ok; }
};

inline Thm1ChainReport tl_check_thm1_chain(const SpectralOperator& x, const SpectralOperator& y,
                                           double C, double t) {
  if (!(C >= 1.0)) throw invariant_violation("tl_check_thm1_chain: C >= 1 required");
  const double c = 1.0 / C;
  if (!(t > 2.0 / c)) throw invariant_violation("tl_check_thm1_chain: t > 2/c required");
  const double r = 1.0 - c;
  const auto identity_shift = [&](double lam) { return 1.0 - c + c * lam; };
  {
    Eigen::MatrixXd ix = Eigen::MatrixXd::Identity(x.dim(), x.dim()) - x.matrix();
    Eigen::MatrixXd iy = Eigen::MatrixXd::Identity(y.dim(), y.dim()) - y.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C * iy - ix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kSpectrumSlack)
      throw invariant_violation("tl_check_thm1_chain: precondition I - x <= C(I - y) fails");
  }
  auto h = [&](double lam) { return lam < r ? 0.0 : std::exp((lam - 1.0) * t) - std::exp(-c * t); };
  const double tau_y2t = tl_spectral_trace(y, [&](double lam) { return std::pow(lam, 2.0 * t); });
  const double tau_y = y.normalized_trace();
  const double tau_x = x.normalized_trace();
  const double tau_hy = tl_spectral_trace(y, h);
  const double tau_hz = tl_spectral_trace(x, [&](double lam) { return h(identity_shift(lam)); });
  const double tau_xct2 = tl_spectral_trace(x, [&](double lam) { return std::pow(lam, c * t / 2.0); });

  Thm1ChainReport rep;
  rep.step1.record(tau_y2t, 2.0 * std::exp(-c * t) * tau_y + tau_hy, kCheckSlack);
  rep.step2.record(tau_hy, tau_hz, kCheckSlack);
  rep.step3.record(tau_y2t,
                   2.0 * tau_y * std::exp(-c * t) + c * t * std::exp(-c * t / 2.0) * tau_x + tau_xct2,
                   kCheckSlack);
  return rep;
}

// Random (x, y) with spectra in [0,1] and I - x <= C(I - y):
// y = I - D1, D2 = D1^{1/2} K D1^{1/2} rescaled into [0,1], x = I - D2.
inline std::pair<SpectralOperator, SpectralOperator> tl_random_ordered_pair(int dim, double C, Rng& rng) {
  if (C < 1.0) throw invariant_violation("tl_random_ordered_pair: C >= 1 required");
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_orthogonal = [&]() {
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    return q;
  };
  std::uniform_real_distribution<double> u01(0.01, 1.0);
  Eigen::MatrixXd q1 = random_orthogonal();
  Eigen::VectorXd d1(dim), d1sqrt(dim);
  for (int i = 0; i < dim; ++i) {
    d1[i] = u01(rng);
    d1sqrt[i] = std::sqrt(d1[i]);
  }
  Eigen::MatrixXd delta1 = q1 * d1.asDiagonal() * q1.transpose();
  Eigen::MatrixXd delta1_sqrt = q1 * d1sqrt.asDiagonal() * q1.transpose();
  Eigen::MatrixXd q2 = random_orthogonal();
  Eigen::VectorXd dk(dim);
  std::uniform_real_distribution<double> uk(0.0, C);
  for (int i = 0; i < dim; ++i) dk[i] = uk(rng);
  Eigen::MatrixXd kmat = q2 * dk.asDiagonal() * q2.transpose();
  Eigen::MatrixXd delta2 = delta1_sqrt * kmat * delta1_sqrt;
  delta2 = ((delta2 + delta2.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(delta2, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (top > 1.0) delta2 /= top;  // scaling down preserves delta2 <= C delta1
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
  auto y = SpectralOperator::from_matrix(eye - delta1);
  auto x = SpectralOperator::from_matrix(eye - delta2);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(C * delta1 - delta2, Eigen::EigenvaluesOnly);
    if (check.eigenvalues().minCoeff() < -kSpectrumSlack)
      throw invariant_violation("tl_random_ordered_pair: construction failed verification");
  }
  return {x, y};
}

}  // namespace rwlab
