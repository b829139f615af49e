#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qnmtrace/ode.hpp"
#include "qnmtrace/potential.hpp"

namespace qnmtrace {

/// How the profile series is scaled.
/// `entire`: v_0 = 1/Γ(1 - α), so u is entire in λ.
/// `unit`: v_0 = 1, which avoids overflow of the Gamma factor at large real λ
/// but has poles at α ∈ {1, 2, ...}.
enum class Normalization { entire, unit };

struct JostOptions {
  double rtol = 1e-10;
  double atol = 1e-12;  ///< relative to the size of the initial data
  double x_span = 40.0;
  int initial_terms = 24;
  int max_terms = 400;
  double series_tol = 1e-12;
  std::optional<double> match_point;  ///< overrides the tail's match point
  Normalization normalization = Normalization::entire;
  /// For potentials with a radial form, expand the profile around the horizon in r
  /// out to this fraction of the convergence radius instead of shooting. An explicit
  /// match_point selects the tail series instead.
  bool radial_series = true;
  double radial_ratio = 0.92;
  int radial_max_terms = 8192;
};

/// α = 2iλ/A.
cplx series_exponent(double decay_rate, cplx lambda);

/// Profile coefficients v_0..v_J with v_0 = 1/Γ(1-α). Within 1e-3 of α ∈ {1..J}
/// the coefficients are averaged over λ + 1e-4·max(1,|λ|)·{±1, ±i}.
std::vector<cplx> series_coefficients(const AsymptoticTail& tail, cplx lambda, int terms);

/// The bare recursion v_j = Σ_l V_l v_{j-l} / (j A² (j - α)) from a given v_0.
std::vector<cplx> series_coefficients_from(const AsymptoticTail& tail, cplx lambda, int terms,
                                           cplx leading);

/// Profile coefficients b_n of v = Σ b_n z^n with z = (r - r_h)/ρ around the horizon
/// r_h on the given side, ρ the distance to the nearest other singular point.
/// `extended` runs the recursion in 113-bit arithmetic where available.
std::vector<cplx> radial_series_coefficients(const RadialForm& form, Side side, cplx lambda,
                                             int terms, Normalization normalization,
                                             bool extended = false);

/// ρ above: the convergence radius in r of the horizon expansion.
double radial_series_radius(const SdSGeometry& geom, Side side);

/// Factor by which rounding in the recursion is amplified at z: the other
/// horizon's solution (r - r_other)^(-α_other) dominates the recessive one.
double radial_rounding_growth(const SdSGeometry& geom, Side side, cplx lambda, double z);

/// Index where the envelope n^a (z/d)^n of that solution's coefficients peaks.
double radial_envelope_peak(const SdSGeometry& geom, Side side, cplx lambda, double z);

struct JostValue {
  cplx u;
  cplx du;
};

struct Profile {
  cplx v;
  cplx dv;
};

/// Outgoing solution u = e^{±iλx} v(x) on one side, built from the tail series
/// and continued by the profile ODE down to `x_inner`. Immutable once built.
class JostSolution {
 public:
  JostSolution(const Potential& pot, cplx lambda, Side side, double x_inner,
               const JostOptions& options = {});

  cplx lambda() const { return lambda_; }
  Side side() const { return side_; }
  double match_point() const { return match_point_; }
  double decay_rate() const { return decay_rate_; }
  const std::vector<cplx>& coefficients() const { return coefficients_; }
  std::size_t ode_steps() const { return trajectory_.empty() ? 0 : trajectory_.size() - 1; }

  Profile profile(double x) const;
  JostValue evaluate(double x) const;

 private:
  Profile series_profile(double x) const;
  Profile radial_profile(double x) const;

  cplx lambda_;
  Side side_;
  double decay_rate_;
  double match_point_;
  double x_span_;
  std::vector<cplx> coefficients_;
  std::shared_ptr<const RadialForm> radial_;  ///< set when coefficients_ are in z
  double radial_radius_ = 0.0;
  HermiteTrajectory<cplx> trajectory_;
};

JostValue evaluate_outgoing(const Potential& pot, cplx lambda, Side side, double x,
                            const JostOptions& options = {});
JostValue evaluate_incoming(const Potential& pot, cplx lambda, Side side, double x,
                            const JostOptions& options = {});

}  // namespace qnmtrace
