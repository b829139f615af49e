#pragma once

#include <span>
#include <vector>

#include "qnmtrace/resonance_finder.hpp"
#include "qnmtrace/trace_numerics.hpp"

namespace qnmtrace {

/// -1/(2(e^{tA/2} - 1)).
double renormalization_term(double decay_rate, double t);

/// ½ Σ_{|λ_j| ≤ R} m_j e^{-iλ_j t}. Spurious zeros are skipped.
cplx resonance_sum(std::span<const ZeroResult> resonances, double radius, double t);

struct PoissonConfig {
  double truncation_radius = 40.0;
  std::vector<ZeroResult> resonances;
  double A_plus = 2.0;
  double A_minus = 2.0;
  std::vector<double> times;
  int zero_resonance_multiplicity = 0;  ///< m_R(0); adds ½m_R(0)
};

struct PoissonCurve {
  TraceCurve curve;
  double max_imaginary = 0.0;  ///< largest |Im resonance_sum| over the times
  bool symmetry_warning = false;
};

/// Re[resonance_sum] + A_+(t) + A_-(t) - ½ + ½m_R(0).
PoissonCurve poisson_rhs(const PoissonConfig& config);

/// Resonances ±ℓ - i(j + ½) with |λ| ≤ radius; ℓ = 0 gives double points.
std::vector<ZeroResult> poschl_teller_lattice(double ell, double radius);

struct CurveComparison {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;  ///< relative to max(|b|, 0.05)
  double worst_time = 0.0;
};

/// Compares a against the reference b on identical time grids.
CurveComparison compare_curves(const TraceCurve& a, const TraceCurve& b);

}  // namespace qnmtrace
