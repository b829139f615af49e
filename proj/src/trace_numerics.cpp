#include "qnmtrace/trace_numerics.hpp"

#include <cmath>
#include <numbers>

#include "qnmtrace/errors.hpp"
#include "qnmtrace/tridiagonal.hpp"

namespace qnmtrace {

namespace {

void require_positive_increasing(std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0) || (k > 0 && !(times[k] > times[k - 1]))) {
      throw DomainError("trace times must be positive and strictly increasing");
    }
  }
}

// h·ψ_kᵀ G ψ_k for each k, where G(i,j) is the normalized Gaussian of width σ
// centred at x_i and sampled at x_j.
Eigen::VectorXd gaussian_weights(const Eigen::MatrixXd& vectors, double h, const TraceOptions& options) {
  const double sigma = options.kernel_width * h;
  const Eigen::Index n = vectors.rows();
  const Eigen::Index band = std::min<Eigen::Index>(n - 1, Eigen::Index(std::ceil(options.kernel_cutoff * sigma / h)));
  Eigen::MatrixXd smoothed = Eigen::MatrixXd::Zero(n, vectors.cols());
  for (Eigen::Index d = -band; d <= band; ++d) {
    const double x = d * h;
    const double g = std::exp(-x * x / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * std::numbers::pi));
    const Eigen::Index rows = n - std::abs(d);
    if (d >= 0) {
      smoothed.topRows(rows) += g * vectors.bottomRows(rows);
    } else {
      smoothed.bottomRows(rows) += g * vectors.topRows(rows);
    }
  }
  return h * vectors.cwiseProduct(smoothed).colwise().sum().transpose();
}

}  // namespace

Grid make_grid(double half_width, int points) {
  if (!(half_width > 0.0) || points < 3) throw DomainError("grid needs L > 0 and N >= 3");
  return {half_width, points};
}

TridiagonalOperator discretize(const Potential& pot, const Grid& grid) {
  TridiagonalOperator op = discretize_free(grid);
  for (int i = 1; i <= grid.points; ++i) op.diagonal[i - 1] += pot(grid.node(i));
  return op;
}

TridiagonalOperator discretize_free(const Grid& grid) {
  const double h = grid.spacing();
  return {Eigen::VectorXd::Constant(grid.points, 2.0 / (h * h)),
          Eigen::VectorXd::Constant(grid.points - 1, -1.0 / (h * h))};
}

SpectralDecomposition eigendecompose(const TridiagonalOperator& op, bool vectors) {
  auto result = tridiagonal_eigen<double>(op.diagonal, op.offdiagonal, vectors);
  return {std::move(result.values), std::move(result.vectors)};
}

double wave_symbol(double t, double mu) {
  return mu >= 0.0 ? std::cos(t * std::sqrt(mu)) : std::cosh(t * std::sqrt(-mu));
}

double effective_support_radius(const Potential& pot, double threshold, double x_limit) {
  constexpr double step = 0.01;
  const int samples = int(std::ceil(x_limit / step));
  double peak = 0.0;
  for (int k = -samples; k <= samples; ++k) peak = std::max(peak, std::abs(pot(k * step)));
  if (peak == 0.0) return 0.0;
  for (int k = samples; k >= 0; --k) {
    if (std::abs(pot(k * step)) >= threshold * peak || std::abs(pot(-k * step)) >= threshold * peak) {
      return (k + 1) * step;
    }
  }
  return 0.0;
}

double spectral_trace(const Eigen::VectorXd& with_potential, const Eigen::VectorXd& free, double t) {
  if (with_potential.size() != free.size()) throw GridMismatchError("spectra must come from the same grid");
  double total = 0.0;
  for (Eigen::Index k = 0; k < free.size(); ++k) total += wave_symbol(t, with_potential[k]) - wave_symbol(t, free[k]);
  return total;
}

TraceCurve flat_trace_difference(const Potential& pot, const Grid& grid, std::span<const double> times,
                                 const TraceOptions& options) {
  require_positive_increasing(times);
  TraceCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.meta = "numeric";
  if (times.empty()) return curve;
  const double radius = effective_support_radius(pot, options.support_threshold);
  if (!(times.back() < 2.0 * grid.half_width - 2.0 * radius)) {
    throw PropagationWindowError("t_max must be below 2L - 2R so that reflections from the walls stay out");
  }
  const bool vectors = options.mode == TraceMode::kernel_diagonal;
  const SpectralDecomposition with_v = eigendecompose(discretize(pot, grid), vectors);
  const SpectralDecomposition free = eigendecompose(discretize_free(grid), vectors);
  if (with_v.eigenvalues[0] < 0.0) curve.meta += "; negative eigenvalues continued as cosh";

  if (options.mode == TraceMode::spectral) {
    curve.meta += "; spectral";
    for (double t : times) curve.values.push_back(spectral_trace(with_v.eigenvalues, free.eigenvalues, t));
    return curve;
  }
  curve.meta += "; kernel_diagonal";
  const double h = grid.spacing();
  const Eigen::VectorXd wv = gaussian_weights(with_v.eigenvectors, h, options);
  const Eigen::VectorXd w0 = gaussian_weights(free.eigenvectors, h, options);
  for (double t : times) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < wv.size(); ++k) {
      total += wave_symbol(t, with_v.eigenvalues[k]) * wv[k] - wave_symbol(t, free.eigenvalues[k]) * w0[k];
    }
    curve.values.push_back(total);
  }
  return curve;
}

TraceCurve pt_closed_form(double ell, std::span<const double> times) {
  require_positive_increasing(times);
  TraceCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.meta = "pt_closed_form";
  for (double t : times) {
    curve.values.push_back(0.5 * ((std::cos(ell * t) - std::exp(-t / 2)) / std::sinh(t / 2) - 1.0));
  }
  return curve;
}

}  // namespace qnmtrace
