#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qnmtrace/errors.hpp"
#include "qnmtrace/trace_numerics.hpp"

using namespace qnmtrace;

namespace {

double max_error(const TraceCurve& a, const TraceCurve& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
  return worst;
}

std::vector<double> time_grid(double t0, double t1, int n) {
  std::vector<double> times;
  for (int k = 0; k < n; ++k) times.push_back(t0 + (t1 - t0) * k / (n - 1));
  return times;
}

}  // namespace

TEST_CASE("three-point stencil") {
  const Grid grid = make_grid(2.0, 3);
  CHECK(grid.spacing() == 1.0);
  CHECK(grid.node(1) == -1.0);
  const TridiagonalOperator op = discretize(make_zero_potential(), grid);
  CHECK(op.diagonal == Eigen::Vector3d(2, 2, 2));
  CHECK(op.offdiagonal == Eigen::Vector2d(-1, -1));
  CHECK_THROWS_AS(make_grid(2.0, 2), DomainError);
  CHECK_THROWS_AS(make_grid(0.0, 10), DomainError);
}

TEST_CASE("free Dirichlet spectrum") {
  const Grid grid = make_grid(5.0, 200);
  const double h = grid.spacing();
  const SpectralDecomposition s = eigendecompose(discretize_free(grid), false);
  for (int k = 1; k <= 200; ++k) {
    const double exact = 2.0 * (1.0 - std::cos(k * std::numbers::pi / 201)) / (h * h);
    CHECK(std::abs(s.eigenvalues[k - 1] - exact) <= 1e-9 * exact);
  }
}

TEST_CASE("eigendecomposition at N = 1500") {
  const Grid grid = make_grid(12.0, 1500);
  const TridiagonalOperator op = discretize(make_poschl_teller(1.0), grid);
  const SpectralDecomposition s = eigendecompose(op);
  CHECK(s.eigenvalues[0] > 0.0);
  const Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(1500, 1500)).cwiseAbs().maxCoeff() <= 1e-10);
  double worst = 0.0;
  for (int k = 0; k < 1500; ++k) {
    const Eigen::VectorXd& v = s.eigenvectors.col(k);
    Eigen::VectorXd Av = op.diagonal.cwiseProduct(v);
    Av.head(1499) += op.offdiagonal.cwiseProduct(v.tail(1499));
    Av.tail(1499) += op.offdiagonal.cwiseProduct(v.head(1499));
    worst = std::max(worst, (Av - s.eigenvalues[k] * v).norm() / (std::abs(s.eigenvalues[k]) + 1.0));
  }
  CHECK(worst <= 1e-8);
  CHECK(s.eigenvalues.sum() == doctest::Approx(op.diagonal.sum()).epsilon(1e-8));
}

TEST_CASE("closed-form Pöschl-Teller trace") {
  const std::vector<double> times = {1e-6, 1.0, 60.0};
  const TraceCurve c = pt_closed_form(1.0, times);
  CHECK(std::abs(c.values[0]) < 1e-5);
  CHECK(c.values[1] == doctest::Approx(-0.563547256276).epsilon(1e-11));
  CHECK(c.values[1] == doctest::Approx(0.5 * ((std::cos(1.0) - std::exp(-0.5)) / std::sinh(0.5) - 1.0)));
  CHECK(c.values[2] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(c.meta == "pt_closed_form");
}

TEST_CASE("wave symbol") {
  CHECK(wave_symbol(2.0, 0.25) == std::cos(1.0));
  CHECK(wave_symbol(2.0, -0.25) == std::cosh(1.0));
  CHECK(wave_symbol(2.0, 0.0) == 1.0);
}

TEST_CASE("effective support radius") {
  CHECK(effective_support_radius(make_poschl_teller(1.0)) == doctest::Approx(std::acosh(1000.0)).epsilon(2e-3));
  CHECK(effective_support_radius(make_zero_potential()) == 0.0);
}

TEST_CASE("spectral trace of the free problem vanishes") {
  const auto times = time_grid(0.5, 3.0, 6);
  const TraceCurve c = flat_trace_difference(make_zero_potential(), make_grid(12.0, 300), times);
  for (double v : c.values) CHECK(v == 0.0);
}

TEST_CASE("spectral mode is the cosine sum over both spectra") {
  const Potential pt = make_poschl_teller(1.0);
  const Grid grid = make_grid(12.0, 400);
  const std::vector<double> times = {0.7, 1.9};
  const TraceCurve c = flat_trace_difference(pt, grid, times);
  const auto sv = eigendecompose(discretize(pt, grid), false).eigenvalues;
  const auto s0 = eigendecompose(discretize_free(grid), false).eigenvalues;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double total = 0.0;
    for (int j = 0; j < 400; ++j) total += std::cos(times[k] * std::sqrt(sv[j])) - std::cos(times[k] * std::sqrt(s0[j]));
    CHECK(c.values[k] == doctest::Approx(total).epsilon(1e-12));
  }
  const TraceCurve again = flat_trace_difference(pt, grid, times);
  CHECK(again.values == c.values);
}

TEST_CASE("kernel-diagonal trace reproduces the closed form") {
  const Potential pt = make_poschl_teller(1.0);
  const auto times = time_grid(0.5, 3.0, 11);
  TraceOptions options;
  options.mode = TraceMode::kernel_diagonal;
  const TraceCurve numeric = flat_trace_difference(pt, make_grid(12.0, 1500), times, options);
  const TraceCurve exact = pt_closed_form(1.0, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(numeric.values[k] - exact.values[k]) <= 0.05 * std::abs(exact.values[k]));
  }
  CHECK(numeric.meta.find("kernel_diagonal") != std::string::npos);
}

TEST_CASE("kernel-diagonal trace converges at second order") {
  const Potential pt = make_poschl_teller(1.0);
  const std::vector<double> t1 = {1.0};
  TraceOptions options;
  options.mode = TraceMode::kernel_diagonal;
  const double exact = pt_closed_form(1.0, t1).values[0];
  const double coarse = flat_trace_difference(pt, make_grid(12.0, 375), t1, options).values[0] - exact;
  const double fine = flat_trace_difference(pt, make_grid(12.0, 751), t1, options).values[0] - exact;
  CHECK(std::abs(coarse / fine) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("kernel-diagonal trace does not degrade with a larger box") {
  const Potential pt = make_poschl_teller(1.0);
  const auto times = time_grid(0.5, 3.0, 6);
  TraceOptions options;
  options.mode = TraceMode::kernel_diagonal;
  const TraceCurve exact = pt_closed_form(1.0, times);
  const double small = max_error(flat_trace_difference(pt, make_grid(10.0, 624), times, options), exact);
  const double large = max_error(flat_trace_difference(pt, make_grid(14.0, 874), times, options), exact);
  CHECK(large <= small * (1.0 + 1e-3));
}

TEST_CASE("negative eigenvalues use cosh") {
  const Potential well = make_scaled_sech2(-2.0);
  const std::vector<double> times = {1.0};
  const TraceCurve c = flat_trace_difference(well, make_grid(12.0, 600), times);
  CHECK(c.meta.find("cosh") != std::string::npos);
  CHECK(std::isfinite(c.values[0]));
}

TEST_CASE("propagation window and time validation") {
  const Potential pt = make_poschl_teller(1.0);
  const std::vector<double> late = {1.0, 9.0};
  CHECK_THROWS_AS(flat_trace_difference(pt, make_grid(12.0, 200), late), PropagationWindowError);
  const std::vector<double> unordered = {1.0, 0.5};
  CHECK_THROWS_AS(flat_trace_difference(pt, make_grid(12.0, 200), unordered), DomainError);
  const std::vector<double> zero = {0.0};
  CHECK_THROWS_AS(pt_closed_form(1.0, zero), DomainError);
}
