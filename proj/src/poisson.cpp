#include "qnmtrace/poisson.hpp"

#include <cmath>
#include <cstdio>

#include "qnmtrace/errors.hpp"

namespace qnmtrace {

double renormalization_term(double decay_rate, double t) {
  if (!(t > 0.0) || !(decay_rate > 0.0)) throw DomainError("renormalization term needs t > 0 and A > 0");
  return -0.5 / std::expm1(t * decay_rate / 2.0);
}

cplx resonance_sum(std::span<const ZeroResult> resonances, double radius, double t) {
  cplx total = 0.0;
  for (const ZeroResult& z : resonances) {
    if (z.classification == ZeroKind::spurious || std::abs(z.lambda) > radius) continue;
    total += double(z.multiplicity) * std::exp(cplx(0.0, -1.0) * z.lambda * t);
  }
  return 0.5 * total;
}

PoissonCurve poisson_rhs(const PoissonConfig& config) {
  if (!(config.truncation_radius > 0.0)) throw DomainError("truncation radius must be positive");
  PoissonCurve result;
  result.curve.times = config.times;
  double largest = 0.0;
  for (double t : config.times) {
    const cplx sum = resonance_sum(config.resonances, config.truncation_radius, t);
    const double value = sum.real() + renormalization_term(config.A_plus, t) +
                         renormalization_term(config.A_minus, t) - 0.5 + 0.5 * config.zero_resonance_multiplicity;
    result.curve.values.push_back(value);
    result.max_imaginary = std::max(result.max_imaginary, std::abs(sum.imag()));
    largest = std::max(largest, std::abs(value));
  }
  result.symmetry_warning = result.max_imaginary > 1e-6 * largest;
  char meta[160];
  std::snprintf(meta, sizeof meta, "poisson_rhs; R=%g; max_imag=%.3g%s", config.truncation_radius,
                result.max_imaginary, result.symmetry_warning ? "; symmetry warning" : "");
  result.curve.meta = meta;
  return result;
}

std::vector<ZeroResult> poschl_teller_lattice(double ell, double radius) {
  std::vector<ZeroResult> lattice;
  for (int j = 0;; ++j) {
    const double depth = j + 0.5;
    if (std::hypot(ell, depth) > radius) break;
    for (double re : ell == 0.0 ? std::vector<double>{0.0} : std::vector<double>{-ell, ell}) {
      ZeroResult z;
      z.lambda = cplx(re, -depth);
      z.multiplicity = ell == 0.0 ? 2 : 1;
      lattice.push_back(z);
    }
  }
  return lattice;
}

CurveComparison compare_curves(const TraceCurve& a, const TraceCurve& b) {
  if (a.times != b.times || a.values.size() != a.times.size() || b.values.size() != b.times.size()) {
    throw GridMismatchError("curves must share the same time grid");
  }
  CurveComparison report;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double error = std::abs(a.values[k] - b.values[k]);
    const double rel = error / std::max(std::abs(b.values[k]), 0.05);
    report.max_abs_error = std::max(report.max_abs_error, error);
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_time = a.times[k];
    }
  }
  return report;
}

}  // namespace qnmtrace
