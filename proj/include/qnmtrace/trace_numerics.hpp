#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "qnmtrace/potential.hpp"

namespace qnmtrace {

/// Uniform interior grid x_i = -L + i·h, i = 1..N, h = 2L/(N+1), Dirichlet at ±L.
struct Grid {
  double half_width;
  int points;

  double spacing() const { return 2.0 * half_width / (points + 1); }
  double node(int i) const { return -half_width + i * spacing(); }  ///< i = 1..N
};

Grid make_grid(double half_width, int points);

struct TridiagonalOperator {
  Eigen::VectorXd diagonal;
  Eigen::VectorXd offdiagonal;
};

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   ///< ascending
  Eigen::MatrixXd eigenvectors;  ///< orthonormal columns; empty when not requested
};

/// -d²/dx² + V by the three-point stencil.
TridiagonalOperator discretize(const Potential& pot, const Grid& grid);
TridiagonalOperator discretize_free(const Grid& grid);

SpectralDecomposition eigendecompose(const TridiagonalOperator& op, bool vectors = true);

enum class TraceMode { spectral, kernel_diagonal };

struct TraceCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::string meta;  ///< numeric | poisson_rhs | pt_closed_form | birman_krein, plus notes
};

struct TraceOptions {
  TraceMode mode = TraceMode::spectral;
  double kernel_width = 2.0;        ///< Gaussian σ in units of h
  double kernel_cutoff = 10.0;      ///< Gaussian truncated at this many σ
  double support_threshold = 1e-6;  ///< relative to max |V|
};

/// cos(t√μ) for μ ≥ 0, cosh(t√-μ) otherwise.
double wave_symbol(double t, double mu);

/// Smallest R with |V(x)| < threshold·max|V| for all sampled |x| > R (0 for V ≡ 0).
double effective_support_radius(const Potential& pot, double threshold = 1e-6, double x_limit = 400.0);

/// Σ_k c(t, μ_k^V) - c(t, μ_k^0) on a shared Dirichlet grid, or the Gaussian-mollified
/// diagonal of the same propagator difference. Throws PropagationWindowError if
/// t_max ≥ 2L - 2·(effective support radius).
TraceCurve flat_trace_difference(const Potential& pot, const Grid& grid, std::span<const double> times,
                                 const TraceOptions& options = {});

/// Trace from precomputed spectra, pairing eigenvalues in ascending order.
double spectral_trace(const Eigen::VectorXd& with_potential, const Eigen::VectorXd& free, double t);

/// ½((cos ℓt - e^{-t/2})/sinh(t/2) - 1).
TraceCurve pt_closed_form(double ell, std::span<const double> times);

}  // namespace qnmtrace
