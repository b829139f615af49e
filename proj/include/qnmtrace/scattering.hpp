#pragma once

#include <optional>
#include <utility>

#include "qnmtrace/jost.hpp"

namespace qnmtrace {

struct ScatteringOptions {
  /// Evaluation point of the Wronskian; defaults to preferred_wronskian_point.
  std::optional<double> x_star;
  JostOptions jost;
};

/// F(λ) = u_+' u_- - u_+ u_-' at x*. Uses the normalization in `options.jost`.
cplx wronskian(const Potential& pot, cplx lambda, const ScatteringOptions& options = {});

/// x = 0, or for Regge–Wheeler potentials the point r = r_+ - 0.88ρ_+ reached by both
/// horizon series, where the outgoing solutions are far from cancelling.
double preferred_wronskian_point(const Potential& pot);

struct WronskianSample {
  cplx value;
  double scale;  ///< |u_+'u_-| + |u_+u_-'| + |2λu_+u_-|, the size F would have without cancellation
};

WronskianSample wronskian_sample(const Potential& pot, cplx lambda, const ScatteringOptions& options = {});

/// F(λ) with v_0 = 1 on both sides, i.e. F divided by the two 1/Γ factors.
/// Finite for large real λ where F itself overflows.
cplx scaled_wronskian(const Potential& pot, cplx lambda, const ScatteringOptions& options = {});

/// log F(λ), computed as log F̃ - log(1/Γ(1-α_+)) - log(1/Γ(1-α_-)) so it never overflows.
/// The imaginary part is not branch-tracked.
cplx log_wronskian(const Potential& pot, cplx lambda, const ScatteringOptions& options = {});

/// T(λ) = 2iλ /(Γ(1-α_+) Γ(1-α_-) F(λ)). Throws ResonanceHitError when F vanishes
/// relative to the size of its two terms.
cplx transmission(const Potential& pot, cplx lambda, const ScatteringOptions& options = {});

/// T at λ = -1e-4 and λ = +1e-4. The formula is 0/0 at λ = 0 when F(0) = 0,
/// so both one-sided values are reported rather than a limit.
std::pair<cplx, cplx> transmission_limits_at_zero(const Potential& pot, const ScatteringOptions& options = {});

/// det S(λ) = T(λ)/T(-λ) = -F̃(-λ)/F̃(λ) for real nonzero λ.
cplx det_s(const Potential& pot, double lambda, const ScatteringOptions& options = {});

enum class PhaseMode { decomposed, direct };

struct ScatteringPoint {
  cplx lambda;
  cplx F;
  cplx T;
  cplx det_s;
  std::optional<cplx> G_total;
  std::optional<cplx> G_gamma_plus;
  std::optional<cplx> G_gamma_minus;
  std::optional<cplx> G_F;
};

/// (2i/A)[Ψ(1+α) + Ψ(1-α)], the derivative of the Gamma factors in log det S.
cplx gamma_phase_derivative(double decay_rate, double lambda);

/// G(λ) alone, without the F, T and det S fields of phase_derivative.
cplx phase_derivative_total(const Potential& pot, double lambda, PhaseMode mode,
                            const ScatteringOptions& options = {});

/// G(λ) = d/dλ log det S(λ) at real nonzero λ.
/// `decomposed` returns the Gamma parts plus G_F = d/dλ[log F(-λ) - log F(λ)];
/// `direct` differentiates the unwrapped phase of det S.
/// F, T and det S are evaluated in whichever normalization stays finite;
/// F is NaN when it overflows.
ScatteringPoint phase_derivative(const Potential& pot, double lambda, PhaseMode mode,
                                 const ScatteringOptions& options = {});

}  // namespace qnmtrace
