#include "ringflux/markov.hpp"

#include <algorithm>
#include <cmath>

#include "ringflux/dynamics.hpp"
#include "ringflux/errors.hpp"

namespace ringflux {

namespace {

double stationarity_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
  const Eigen::RowVectorXd diff = pi.transpose() * P - pi.transpose();
  return diff.cwiseAbs().maxCoeff();
}

void require_open_unit_interval(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

}  // namespace

Eigen::MatrixXd TransitionMatrix::evaluate(double alpha) const {
  const auto n = static_cast<Eigen::Index>(order());
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      P(i, j) = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].evaluate(alpha);
  return P;
}

std::vector<std::vector<mpq_class>> TransitionMatrix::evaluate(const mpq_class& alpha) const {
  std::vector<std::vector<mpq_class>> P(order(), std::vector<mpq_class>(order()));
  for (std::size_t i = 0; i < order(); ++i)
    for (std::size_t j = 0; j < order(); ++j) P[i][j] = entries[i][j].evaluate(alpha);
  return P;
}

TransitionMatrix build_matrix(const OmegaSet& omega) {
  const auto rule = FluxRule::stochastic_v();
  const std::size_t n = omega.members.size();
  TransitionMatrix m{omega, std::vector<std::vector<AlphaPoly>>(n, std::vector<AlphaPoly>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& o : class_outcomes(omega.members[i].representative, rule)) {
      const auto j = omega.index_of(o.next);
      if (!j)
        throw InternalContradiction("outcome " + o.next.to_string() + " of " +
                                    omega.members[i].representative.to_string() +
                                    " lies outside the recurrent set");
      m.entries[i][*j] += o.probability;
    }
  }
  return m;
}

StationaryDistribution stationary(const TransitionMatrix& m, double alpha) {
  require_open_unit_interval(alpha);
  const Eigen::MatrixXd P = m.evaluate(alpha);
  const auto n = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd pi = A.colPivHouseholderQr().solve(b);

  StationaryDistribution out{alpha, std::vector<double>(pi.data(), pi.data() + n),
                             stationarity_residual(P, pi), "direct"};
  const bool clean = std::isfinite(out.residual) && out.residual <= kStationaryResidual &&
                     pi.minCoeff() >= -kNegativeSlack && std::abs(pi.sum() - 1.0) < 1e-12;
  if (clean) return out;
  auto power = stationary_power(m, alpha);
  if (power.residual <= kStationaryResidual) return power;
  throw NumericalFailure("stationary solve did not converge for a set of " + std::to_string(n) +
                             " classes",
                         std::min(out.residual, power.residual));
}

StationaryDistribution stationary_power(const TransitionMatrix& m, double alpha,
                                        std::size_t max_iterations) {
  require_open_unit_interval(alpha);
  const Eigen::MatrixXd P = m.evaluate(alpha);
  const auto n = P.rows();
  const Eigen::MatrixXd lazy = 0.5 * (P + Eigen::MatrixXd::Identity(n, n));
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Eigen::RowVectorXd next = pi * lazy;
    next /= next.sum();
    const double change = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (change < 1e-17) break;
  }
  const Eigen::VectorXd col = pi.transpose();
  return StationaryDistribution{alpha, std::vector<double>(pi.data(), pi.data() + n),
                                stationarity_residual(P, col), "power"};
}

std::vector<mpq_class> stationary_exact(const TransitionMatrix& m, const mpq_class& alpha) {
  if (alpha <= 0 || alpha >= 1) throw InvalidArgument("alpha must lie in (0, 1)");
  const auto P = m.evaluate(alpha);
  const std::size_t n = P.size();
  // Augmented system [(P^T - I) with last row replaced by ones | e_n].
  std::vector<std::vector<mpq_class>> A(n, std::vector<mpq_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1 : 0);
  for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1;
  A[n - 1][n] = 1;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && A[pivot][col] == 0) ++pivot;
    if (pivot == n) throw NumericalFailure("singular stationary system", 0.0);
    std::swap(A[pivot], A[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const mpq_class f = A[r][col] / A[col][col];
      for (std::size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
    }
  }
  std::vector<mpq_class> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
  return pi;
}

double ConjectureWeight::evaluate(double alpha) const {
  return static_cast<double>(orbit_size) * std::pow(alpha, exponents.m010) /
         std::pow(1.0 - alpha, exponents.m1110 + exponents.m010);
}

mpq_class ConjectureWeight::evaluate(const mpq_class& alpha) const {
  mpq_class w(orbit_size);
  const mpq_class beta = 1 - alpha;
  for (std::size_t j = 0; j < exponents.m010; ++j) w *= alpha / beta;
  for (std::size_t j = 0; j < exponents.m1110; ++j) w /= beta;
  return w;
}

std::vector<ConjectureWeight> conjecture_weights(const OmegaSet& omega) {
  std::vector<ConjectureWeight> out;
  out.reserve(omega.members.size());
  for (const auto& c : omega.members)
    out.push_back(ConjectureWeight{c.representative, c.orbit_size, flux_patterns(c.representative)});
  return out;
}

std::vector<double> conjecture_vector(const OmegaSet& omega, double alpha) {
  require_open_unit_interval(alpha);
  std::vector<double> v;
  for (const auto& w : conjecture_weights(omega)) v.push_back(w.evaluate(alpha));
  double total = 0.0;
  for (double x : v) total += x;
  for (double& x : v) x /= total;
  return v;
}

std::vector<mpq_class> conjecture_vector_exact(const OmegaSet& omega, const mpq_class& alpha) {
  std::vector<mpq_class> v;
  mpq_class total = 0;
  for (const auto& w : conjecture_weights(omega)) {
    v.push_back(w.evaluate(alpha));
    total += v.back();
  }
  for (auto& x : v) x /= total;
  return v;
}

ConjectureReport verify_conjecture(const OmegaSet& omega, std::span<const double> alphas,
                                   double tolerance) {
  const auto matrix = build_matrix(omega);
  ConjectureReport report{omega, tolerance, {}, true};
  for (double alpha : alphas) {
    const auto pi = stationary(matrix, alpha);
    const auto w = conjecture_vector(omega, alpha);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      worst = std::max(worst, std::abs(pi.probabilities[i] - w[i]) / w[i]);
    const bool pass = worst <= tolerance;
    report.checks.push_back(ConjectureCheck{alpha, worst, pi.residual, pass});
    report.pass = report.pass && pass;
  }
  return report;
}

double stationary_flux(const OmegaSet& omega, std::span<const double> pi, double alpha) {
  double q = 0.0;
  for (std::size_t i = 0; i < omega.members.size(); ++i) {
    const auto p = flux_patterns(omega.members[i].representative);
    q += pi[i] * (alpha * static_cast<double>(p.m1110) + static_cast<double>(p.m010));
  }
  return q / static_cast<double>(omega.length);
}

mpq_class stationary_flux(const OmegaSet& omega, std::span<const mpq_class> pi,
                          const mpq_class& alpha) {
  mpq_class q = 0;
  for (std::size_t i = 0; i < omega.members.size(); ++i) {
    const auto p = flux_patterns(omega.members[i].representative);
    q += pi[i] * (alpha * mpq_class(p.m1110) + mpq_class(p.m010));
  }
  return q / mpq_class(omega.length);
}

}  // namespace ringflux
