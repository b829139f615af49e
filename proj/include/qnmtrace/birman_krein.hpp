#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qnmtrace/scattering.hpp"
#include "qnmtrace/trace_numerics.hpp"

namespace qnmtrace {

/// Smooth bump φ(t) ∝ exp(-1/(1 - s²)), s = (t - t0)/width, normalized to ∫φ = 1,
/// with its transforms computed by Gauss-Legendre quadrature on the support.
class TestFunction {
 public:
  TestFunction(double center, double width, int quadrature_points = 512);

  double center() const { return center_; }
  double width() const { return width_; }

  double operator()(double t) const;
  /// φ̂(λ) = ∫ e^{iλt} φ(t) dt.
  cplx fourier(cplx lambda) const;
  /// f(μ) = ½(φ̂(√μ) + φ̂(-√μ)) = ∫ c(t, μ) φ(t) dt, with cosh for μ < 0.
  double spectral(double mu) const;

 private:
  double center_;
  double width_;
  double normalization_ = 1.0;
  std::vector<double> nodes_;    ///< in t
  std::vector<double> weights_;  ///< quadrature weight times normalized φ
};

TestFunction make_bump(double center, double width, int quadrature_points = 512);

/// Σ_k f(μ_k^V) - f(μ_k^0).
double lhs_trace(const TestFunction& f, const Eigen::VectorXd& with_potential, const Eigen::VectorXd& free);
double lhs_trace(const TestFunction& f, const Potential& pot, const Grid& grid);

struct BirmanKreinOptions {
  PhaseMode mode = PhaseMode::direct;
  double lambda_min = 1e-4;
  std::optional<double> lambda_max;  ///< chosen from the decay of f when empty
  double f_cutoff = 1e-10;
  double panel_width = 4.0;
  double abs_tol = 1e-10;  ///< per panel
  double rel_tol = 1e-9;   ///< per panel, the noise floor of G
  int max_depth = 12;
  ScatteringOptions scattering;
};

/// Smallest λ beyond which |f(λ²)| stays below `cutoff`, checked every 0.1
/// over the following 50 units.
double choose_lambda_max(const TestFunction& f, double cutoff = 1e-10);

struct RhsResult {
  double value = 0.0;
  double phase_integral = 0.0;  ///< (1/2πi)∫ f(λ²) G(λ) dλ
  double eigenvalue_sum = 0.0;
  double zero_energy_term = 0.0;
  double lambda_max = 0.0;
  double tail = 0.0;  ///< |f(λmax²) G(λmax)|
  bool tail_warning = false;
};

/// (1/2πi)∫_0^λmax f(λ²) G(λ) dλ + Σ_j f(E_j) + ½(m_R(0) - 1) f(0).
RhsResult rhs_bk(const TestFunction& f, const Potential& pot, std::span<const double> eigenvalues,
                 int zero_resonance_multiplicity, const BirmanKreinOptions& options = {});

struct BirmanKreinReport {
  double lhs = 0.0;
  RhsResult rhs;
  double rel_error = 0.0;  ///< |lhs - rhs| / max(|lhs|, 1e-6)
  std::vector<double> negative_eigenvalues;
};

/// Both sides for one potential; negative eigenvalues come from the discretized operator.
BirmanKreinReport birman_krein_check(const TestFunction& f, const Potential& pot, const Grid& grid,
                                     int zero_resonance_multiplicity = 0, const BirmanKreinOptions& options = {});

}  // namespace qnmtrace
