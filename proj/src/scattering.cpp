#include "qnmtrace/scattering.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qnmtrace/errors.hpp"
#include "qnmtrace/special_functions.hpp"

namespace qnmtrace {

namespace {

constexpr cplx I(0.0, 1.0);

WronskianSample wronskian_terms(const Potential& pot, cplx lambda, const ScatteringOptions& options,
                               Normalization normalization) {
  JostOptions jost = options.jost;
  jost.normalization = normalization;
  const double x = options.x_star.value_or(preferred_wronskian_point(pot));
  const Profile p = JostSolution(pot, lambda, Side::plus, x, jost).profile(x);
  const Profile m = JostSolution(pot, lambda, Side::minus, x, jost).profile(x);
  // u_± = e^{±iλx} v_±; the exponentials cancel in the Wronskian.
  const cplx a = p.dv * m.v;
  const cplx b = p.v * m.dv;
  const cplx c = 2.0 * I * lambda * p.v * m.v;
  return {a - b + c, std::abs(a) + std::abs(b) + std::abs(c)};
}

// log|1/Γ(1-α_+)| + log|1/Γ(1-α_-)|, the size of the factor between F and F̃.
double gamma_log_size(const Potential& pot, cplx lambda) {
  double total = 0.0;
  for (double A : {pot.plus.decay_rate, pot.minus.decay_rate}) {
    total += log_reciprocal_gamma(1.0 - series_exponent(A, lambda)).real();
  }
  return total;
}

// An exact zero of a Gamma factor gives -inf here and keeps the entire form,
// which is where the scaled form has its poles.
bool entire_is_safe(const Potential& pot, cplx lambda) {
  const double size = gamma_log_size(pot, lambda);
  return !std::isfinite(size) || std::abs(size) < 500.0;
}

cplx log_gamma_factors(const Potential& pot, cplx lambda) {
  return log_reciprocal_gamma(1.0 - series_exponent(pot.plus.decay_rate, lambda)) +
         log_reciprocal_gamma(1.0 - series_exponent(pot.minus.decay_rate, lambda));
}

double wrap(double angle) { return std::remainder(angle, 2.0 * std::numbers::pi); }

// Fourth-order central derivative of a complex logarithm sampled on a ladder,
// unwrapping the imaginary part between neighbouring samples. The step is
// halved while any phase increment exceeds π/4.
template <class LogFn>
cplx log_derivative(LogFn&& log_fn, double lambda) {
  // The stencil stays on one side of λ = 0.
  double h = std::min(1e-4 * std::max(1.0, std::abs(lambda)), std::abs(lambda) / 4);
  const double h_min = h * 1e-4;
  for (;;) {
    std::array<cplx, 5> values;
    for (int k = 0; k < 5; ++k) values[k] = log_fn(lambda + (k - 2) * h);
    double worst = 0.0;
    for (int k = 1; k < 5; ++k) {
      const double step = wrap(values[k].imag() - values[k - 1].imag());
      worst = std::max(worst, std::abs(step));
      values[k] = cplx(values[k].real(), values[k - 1].imag() + step);
    }
    const bool fine = worst < std::numbers::pi / 4;
    if (fine || h / 2 < h_min) {
      if (!fine && worst > std::numbers::pi / 2) {
        throw BranchTrackingError("phase of the scattering data jumps by more than pi/2 between samples");
      }
      return (values[0] - 8.0 * values[1] + 8.0 * values[3] - values[4]) / (12.0 * h);
    }
    h /= 2;
  }
}

}  // namespace

double preferred_wronskian_point(const Potential& pot) {
  if (!pot.radial) return 0.0;
  const SdSGeometry& g = pot.radial->geometry;
  return tortoise(g, g.r_plus - 0.88 * radial_series_radius(g, Side::plus));
}

cplx wronskian(const Potential& pot, cplx lambda, const ScatteringOptions& options) {
  return wronskian_terms(pot, lambda, options, options.jost.normalization).value;
}

WronskianSample wronskian_sample(const Potential& pot, cplx lambda, const ScatteringOptions& options) {
  return wronskian_terms(pot, lambda, options, options.jost.normalization);
}

cplx scaled_wronskian(const Potential& pot, cplx lambda, const ScatteringOptions& options) {
  return wronskian_terms(pot, lambda, options, Normalization::unit).value;
}

cplx log_wronskian(const Potential& pot, cplx lambda, const ScatteringOptions& options) {
  if (entire_is_safe(pot, lambda)) {
    return std::log(wronskian_terms(pot, lambda, options, Normalization::entire).value);
  }
  return std::log(scaled_wronskian(pot, lambda, options)) + log_gamma_factors(pot, lambda);
}

cplx transmission(const Potential& pot, cplx lambda, const ScatteringOptions& options) {
  const bool entire = entire_is_safe(pot, lambda);
  const WronskianSample F =
      wronskian_terms(pot, lambda, options, entire ? Normalization::entire : Normalization::unit);
  if (!(std::abs(F.value) > 1e-14 * F.scale)) {
    throw ResonanceHitError("Wronskian vanishes at the requested lambda");
  }
  if (!entire) return 2.0 * I * lambda / F.value;
  const cplx gammas = reciprocal_gamma(1.0 - series_exponent(pot.plus.decay_rate, lambda)) *
                      reciprocal_gamma(1.0 - series_exponent(pot.minus.decay_rate, lambda));
  return 2.0 * I * lambda * gammas / F.value;
}

std::pair<cplx, cplx> transmission_limits_at_zero(const Potential& pot, const ScatteringOptions& options) {
  return {transmission(pot, -1e-4, options), transmission(pot, 1e-4, options)};
}

cplx det_s(const Potential& pot, double lambda, const ScatteringOptions& options) {
  if (lambda == 0.0) throw DomainError("det S is evaluated at nonzero real lambda");
  return -scaled_wronskian(pot, -lambda, options) / scaled_wronskian(pot, lambda, options);
}

cplx gamma_phase_derivative(double decay_rate, double lambda) {
  const cplx alpha = series_exponent(decay_rate, lambda);
  return 2.0 * I / decay_rate * (digamma(1.0 + alpha) + digamma(1.0 - alpha));
}

namespace {

cplx forward_backward_log_derivative(const Potential& pot, double lambda, const ScatteringOptions& options) {
  return log_derivative(
      [&](double t) { return log_wronskian(pot, -t, options) - log_wronskian(pot, t, options); }, lambda);
}

cplx det_s_log_derivative(const Potential& pot, double lambda, const ScatteringOptions& options) {
  return log_derivative([&](double t) { return std::log(det_s(pot, t, options)); }, lambda);
}

}  // namespace

cplx phase_derivative_total(const Potential& pot, double lambda, PhaseMode mode, const ScatteringOptions& options) {
  if (lambda == 0.0) throw DomainError("the phase derivative is evaluated at nonzero real lambda");
  if (mode == PhaseMode::direct) return det_s_log_derivative(pot, lambda, options);
  return gamma_phase_derivative(pot.plus.decay_rate, lambda) + gamma_phase_derivative(pot.minus.decay_rate, lambda) +
         forward_backward_log_derivative(pot, lambda, options);
}

ScatteringPoint phase_derivative(const Potential& pot, double lambda, PhaseMode mode,
                                 const ScatteringOptions& options) {
  if (lambda == 0.0) throw DomainError("the phase derivative is evaluated at nonzero real lambda");
  ScatteringPoint point;
  point.lambda = lambda;
  point.F = entire_is_safe(pot, lambda) ? wronskian(pot, lambda, options)
                                        : cplx(std::numeric_limits<double>::quiet_NaN());
  point.T = transmission(pot, lambda, options);
  point.det_s = det_s(pot, lambda, options);

  if (mode == PhaseMode::decomposed) {
    point.G_gamma_plus = gamma_phase_derivative(pot.plus.decay_rate, lambda);
    point.G_gamma_minus = gamma_phase_derivative(pot.minus.decay_rate, lambda);
    point.G_F = forward_backward_log_derivative(pot, lambda, options);
    point.G_total = *point.G_gamma_plus + *point.G_gamma_minus + *point.G_F;
  } else {
    point.G_total = det_s_log_derivative(pot, lambda, options);
  }
  return point;
}

}  // namespace qnmtrace
