#include "qnmtrace/birman_krein.hpp"

#include <cmath>
#include <numbers>

#include "qnmtrace/errors.hpp"
#include "qnmtrace/quadrature.hpp"

namespace qnmtrace {

namespace {

double bump_shape(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

TestFunction::TestFunction(double center, double width, int quadrature_points) : center_(center), width_(width) {
  if (!(width > 0.0) || !(center - width > 0.0)) {
    throw DomainError("bump support must lie inside (0, inf)");
  }
  const QuadratureRule rule = gauss_legendre(quadrature_points);
  double mass = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    nodes_.push_back(center + width * rule.nodes[k]);
    weights_.push_back(width * rule.weights[k] * bump_shape(rule.nodes[k]));
    mass += weights_.back();
  }
  for (double& w : weights_) w /= mass;
  normalization_ = 1.0 / mass;
}

double TestFunction::operator()(double t) const { return normalization_ * bump_shape((t - center_) / width_); }

cplx TestFunction::fourier(cplx lambda) const {
  cplx total = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) total += weights_[k] * std::exp(cplx(0.0, 1.0) * lambda * nodes_[k]);
  return total;
}

double TestFunction::spectral(double mu) const {
  double total = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) total += weights_[k] * wave_symbol(nodes_[k], mu);
  return total;
}

TestFunction make_bump(double center, double width, int quadrature_points) {
  return TestFunction(center, width, quadrature_points);
}

double lhs_trace(const TestFunction& f, const Eigen::VectorXd& with_potential, const Eigen::VectorXd& free) {
  if (with_potential.size() != free.size()) throw GridMismatchError("spectra must come from the same grid");
  double total = 0.0;
  for (Eigen::Index k = 0; k < free.size(); ++k) total += f.spectral(with_potential[k]) - f.spectral(free[k]);
  return total;
}

double lhs_trace(const TestFunction& f, const Potential& pot, const Grid& grid) {
  return lhs_trace(f, eigendecompose(discretize(pot, grid), false).eigenvalues,
                   eigendecompose(discretize_free(grid), false).eigenvalues);
}

double choose_lambda_max(const TestFunction& f, double cutoff) {
  constexpr double step = 0.1;
  constexpr int window = 500;  // 50 units of λ
  constexpr int limit = 200000;
  int quiet = 0;
  for (int k = 1; k < limit; ++k) {
    const double lambda = k * step;
    quiet = std::abs(f.spectral(lambda * lambda)) < cutoff ? quiet + 1 : 0;
    if (quiet == window) return lambda - (window - 1) * step;
  }
  throw ConvergenceError("test function does not decay below the cutoff");
}

RhsResult rhs_bk(const TestFunction& f, const Potential& pot, std::span<const double> eigenvalues,
                 int zero_resonance_multiplicity, const BirmanKreinOptions& options) {
  RhsResult result;
  result.lambda_max = options.lambda_max ? *options.lambda_max : choose_lambda_max(f, options.f_cutoff);
  const double a = options.lambda_min;
  if (!(result.lambda_max > a)) throw DomainError("lambda_max must exceed the lower cutoff");

  auto integrand = [&](double lambda) {
    return f.spectral(lambda * lambda) * phase_derivative_total(pot, lambda, options.mode, options.scattering);
  };
  cplx integral = 0.0;
  const int panels = std::max(1, int(std::ceil((result.lambda_max - a) / options.panel_width)));
  const double width = (result.lambda_max - a) / panels;
  for (int p = 0; p < panels; ++p) {
    integral += integrate_adaptive(integrand, a + p * width, a + (p + 1) * width, options.abs_tol,
                                   options.max_depth, options.rel_tol);
  }
  // ∫_0^a by linear extrapolation of the integrand from a and 2a.
  const cplx g1 = integrand(a), g2 = integrand(2 * a);
  integral += a * (g1 - 0.5 * (g2 - g1));

  result.phase_integral = (integral / cplx(0.0, 2.0 * std::numbers::pi)).real();
  for (double E : eigenvalues) result.eigenvalue_sum += f.spectral(E);
  result.zero_energy_term = 0.5 * (zero_resonance_multiplicity - 1) * f.spectral(0.0);
  result.value = result.phase_integral + result.eigenvalue_sum + result.zero_energy_term;
  result.tail = std::abs(integrand(result.lambda_max));
  result.tail_warning = result.tail > 1e-8;
  return result;
}

BirmanKreinReport birman_krein_check(const TestFunction& f, const Potential& pot, const Grid& grid,
                                     int zero_resonance_multiplicity, const BirmanKreinOptions& options) {
  BirmanKreinReport report;
  const Eigen::VectorXd with_v = eigendecompose(discretize(pot, grid), false).eigenvalues;
  const Eigen::VectorXd free = eigendecompose(discretize_free(grid), false).eigenvalues;
  report.lhs = lhs_trace(f, with_v, free);
  for (Eigen::Index k = 0; k < with_v.size() && with_v[k] < 0.0; ++k) report.negative_eigenvalues.push_back(with_v[k]);
  report.rhs = rhs_bk(f, pot, report.negative_eigenvalues, zero_resonance_multiplicity, options);
  report.rel_error = std::abs(report.lhs - report.rhs.value) / std::max(std::abs(report.lhs), 1e-6);
  return report;
}

}  // namespace qnmtrace
