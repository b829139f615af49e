#include "qnmtrace/resonance_finder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qnmtrace/errors.hpp"

namespace qnmtrace {

namespace {

constexpr double pi = std::numbers::pi;

struct EdgeResult {
  double phase = 0.0;
  bool clean = true;
  std::vector<double> magnitudes;
};

// Change of arg F along the segment a → b, doubling the sampling until every
// phase increment is below π/2.
EdgeResult edge_phase(const Potential& pot, cplx a, cplx b, const FinderOptions& options) {
  EdgeResult result;
  auto sample = [&](double s) { return wronskian_sample(pot, a + s * (b - a), options.scattering); };
  int n = options.initial_samples;
  std::vector<WronskianSample> values(n + 1);
  for (int k = 0; k <= n; ++k) values[k] = sample(double(k) / n);
  for (;;) {
    for (const auto& v : values) {
      if (!(std::abs(v.value) > options.boundary_tol * v.scale)) {
        result.clean = false;
        return result;
      }
    }
    double worst = 0.0, total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double step = std::arg(values[k + 1].value / values[k].value);
      worst = std::max(worst, std::abs(step));
      total += step;
    }
    if (worst < pi / 2) {
      result.phase = total;
      for (const auto& v : values) result.magnitudes.push_back(std::abs(v.value));
      return result;
    }
    if (2 * n > options.max_samples) {
      result.clean = false;
      return result;
    }
    std::vector<WronskianSample> refined(2 * n + 1);
    for (int k = 0; k <= n; ++k) refined[2 * k] = values[k];
    for (int k = 0; k < n; ++k) refined[2 * k + 1] = sample((k + 0.5) / n);
    values = std::move(refined);
    n *= 2;
  }
}

std::array<cplx, 4> corners(const SearchRegion& r) {
  return {cplx(r.re_min, r.im_min), cplx(r.re_max, r.im_min), cplx(r.re_max, r.im_max), cplx(r.re_min, r.im_max)};
}

struct BoxWinding {
  std::optional<int> winding;  ///< empty when an edge is unclean
  int dirty_edge = -1;         ///< 0 bottom, 1 right, 2 top, 3 left
  double median_abs = 0.0;
};

BoxWinding box_winding(const Potential& pot, const SearchRegion& region, const FinderOptions& options) {
  const auto c = corners(region);
  double total = 0.0;
  std::vector<double> magnitudes;
  for (int e = 0; e < 4; ++e) {
    EdgeResult edge = edge_phase(pot, c[e], c[(e + 1) % 4], options);
    if (!edge.clean) return {std::nullopt, e, 0.0};
    total += edge.phase;
    magnitudes.insert(magnitudes.end(), edge.magnitudes.begin(), edge.magnitudes.end());
  }
  const double turns = total / (2 * pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.1) return {std::nullopt, 0, 0.0};
  std::nth_element(magnitudes.begin(), magnitudes.begin() + magnitudes.size() / 2, magnitudes.end());
  return {int(rounded), -1, magnitudes[magnitudes.size() / 2]};
}

struct NewtonResult {
  cplx lambda;
  double residual;
  bool converged;
};

// Newton with a central-difference derivative.
NewtonResult newton(const Potential& pot, cplx start, double tol, const FinderOptions& options) {
  auto F = [&](cplx z) { return wronskian(pot, z, options.scattering); };
  cplx z = start;
  cplx value = F(z);
  for (int it = 0; it < options.max_newton; ++it) {
    const double h = 1e-6 * (1.0 + std::abs(z));
    const cplx derivative = (F(z + h) - F(z - h)) / (2.0 * h);
    if (derivative == 0.0) break;
    const cplx step = value / derivative;
    z -= step;
    value = F(z);
    if (!std::isfinite(std::abs(z))) break;
    if (std::abs(step) < tol) return {z, std::abs(value), true};
  }
  return {z, std::abs(value), false};
}

// Derivatives F^(k)(z), k = first..first+1, from the Cauchy integral on a circle.
std::array<cplx, 2> cauchy_derivatives(const Potential& pot, cplx z, int first, const FinderOptions& options) {
  constexpr int points = 16;
  const double radius = 1e-2 * (1.0 + std::abs(z));
  std::array<cplx, 2> sums{};
  for (int j = 0; j < points; ++j) {
    const double theta = 2 * pi * j / points;
    const cplx value = wronskian(pot, z + std::polar(radius, theta), options.scattering);
    for (int d = 0; d < 2; ++d) sums[d] += value * std::polar(1.0, -(first + d) * theta);
  }
  for (int d = 0; d < 2; ++d) sums[d] *= std::tgamma(first + d + 1.0) / (points * std::pow(radius, first + d));
  return sums;
}

// A zero of multiplicity m is a simple zero of F^(m-1).
NewtonResult cluster_newton(const Potential& pot, cplx start, int multiplicity, double tol,
                            const FinderOptions& options) {
  cplx z = start;
  for (int it = 0; it < options.max_newton; ++it) {
    const auto [f, df] = cauchy_derivatives(pot, z, multiplicity - 1, options);
    if (df == 0.0) break;
    const cplx step = f / df;
    z -= step;
    if (!std::isfinite(std::abs(z))) break;
    if (std::abs(step) < tol) return {z, std::abs(wronskian(pot, z, options.scattering)), true};
  }
  return {z, std::abs(wronskian(pot, z, options.scattering)), false};
}

class Subdivider {
 public:
  Subdivider(const Potential& pot, double tol, const FinderOptions& options)
      : pot_(pot), tol_(tol), options_(options) {}

  void run(const SearchRegion& box, int winding, int depth) {
    if (winding == 0) return;
    if (depth > options_.max_depth) {
      throw MaxDepthError("zero search exceeded the maximum subdivision depth");
    }
    const double size = box.diameter();
    if (winding == 1) {
      const NewtonResult n = newton(pot_, box.center(), tol_, options_);
      if (n.converged && box.contains(n.lambda)) {
        push(n, 1, box);
        return;
      }
      if (size < tol_) {
        push({box.center(), std::abs(wronskian(pot_, box.center(), options_.scattering)), true}, 1, box);
        return;
      }
    } else if (size < std::max(tol_, options_.cluster_size * (1.0 + std::abs(box.center())))) {
      const NewtonResult n = cluster_newton(pot_, box.center(), winding, tol_, options_);
      const cplx z = (n.converged && box.contains(n.lambda, size)) ? n.lambda : box.center();
      push({z, std::abs(wronskian(pot_, z, options_.scattering)), true}, winding, box);
      return;
    }
    split(box, winding, depth);
  }

  std::vector<ZeroResult> take() { return std::move(found_); }

 private:
  void push(const NewtonResult& n, int multiplicity, const SearchRegion& box) {
    ZeroResult z;
    z.lambda = n.lambda;
    z.multiplicity = multiplicity;
    z.newton_residual = n.residual;
    z.box = box;
    found_.push_back(z);
  }

  // Split lines sit slightly off-centre so that zeros on round-number axes
  // do not land on them; other offsets are tried if an edge is unclean or the
  // children's windings do not add up.
  void split(const SearchRegion& box, int winding, int depth) {
    static constexpr std::array<double, 6> offsets = {0.5137, 0.4729, 0.5419, 0.4381, 0.5662, 0.4123};
    for (double offset : offsets) {
      const double re_cut = box.re_min + offset * (box.re_max - box.re_min);
      const double im_cut = box.im_min + (1.0 - offset) * (box.im_max - box.im_min);
      const std::array<SearchRegion, 4> children = {
          SearchRegion{box.re_min, re_cut, box.im_min, im_cut}, SearchRegion{re_cut, box.re_max, box.im_min, im_cut},
          SearchRegion{box.re_min, re_cut, im_cut, box.im_max}, SearchRegion{re_cut, box.re_max, im_cut, box.im_max}};
      std::array<BoxWinding, 4> windings;
      bool ok = true;
      int total = 0;
      for (int k = 0; k < 4 && ok; ++k) {
        windings[k] = box_winding(pot_, children[k], options_);
        ok = windings[k].winding.has_value();
        if (ok) total += *windings[k].winding;
      }
      if (!ok || total != winding) continue;
      for (int k = 0; k < 4; ++k) run(children[k], *windings[k].winding, depth + 1);
      return;
    }
    char where[160];
    std::snprintf(where, sizeof where, " [%.6g, %.6g] x [%.6g, %.6g] (winding %d)", box.re_min, box.re_max,
                  box.im_min, box.im_max, winding);
    throw BoundaryZeroError(std::string("could not split a search box without crossing a zero of F") + where);
  }

  const Potential& pot_;
  double tol_;
  const FinderOptions& options_;
  std::vector<ZeroResult> found_;
};

}  // namespace

const char* to_string(ZeroKind kind) {
  switch (kind) {
    case ZeroKind::resonance:
      return "resonance";
    case ZeroKind::bound_state:
      return "bound_state";
    case ZeroKind::spurious:
      return "spurious";
  }
  return "unknown";
}

WindingResult winding_number(const Potential& pot, const SearchRegion& region, const FinderOptions& options) {
  if (!(region.re_max > region.re_min) || !(region.im_max > region.im_min)) {
    throw DomainError("search region must be a nonempty rectangle");
  }
  SearchRegion current = region;
  for (int nudge = 0; nudge <= options.max_nudges; ++nudge) {
    const BoxWinding w = box_winding(pot, current, options);
    if (w.winding) return {*w.winding, current, w.median_abs};
    const double push = 1e-3 * current.diameter();
    switch (w.dirty_edge) {
      case 0: current.im_min -= push; break;
      case 1: current.re_max += push; break;
      case 2: current.im_max += push; break;
      default: current.re_min -= push; break;
    }
  }
  throw BoundaryZeroError("F vanishes on the search boundary after repeated nudging");
}

int count_zeros(const Potential& pot, const SearchRegion& region, const FinderOptions& options) {
  return winding_number(pot, region, options).winding;
}

std::vector<ZeroResult> find_zeros(const Potential& pot, const SearchRegion& region, double tol,
                                   const FinderOptions& options) {
  const WindingResult root = winding_number(pot, region, options);
  Subdivider subdivider(pot, tol, options);
  subdivider.run(root.region, root.winding, 0);
  std::vector<ZeroResult> zeros = subdivider.take();
  for (auto& z : zeros) z = classify_zero(pot, z, options);
  // Real parts within 1e-7 are treated as equal so that conjugate ladders sort by Im.
  auto key = [](const ZeroResult& z) { return std::pair{std::round(z.lambda.real() * 1e7), z.lambda.imag()}; };
  std::sort(zeros.begin(), zeros.end(), [&](const ZeroResult& a, const ZeroResult& b) { return key(a) < key(b); });
  return zeros;
}

ZeroResult classify_zero(const Potential& pot, ZeroResult zero, const FinderOptions& options) {
  const cplx lambda = zero.lambda;
  if (lambda.imag() > 0.0) {
    zero.classification = ZeroKind::bound_state;
    zero.energy = lambda * lambda;
    return zero;
  }
  zero.classification = ZeroKind::resonance;
  const int terms = options.scattering.jost.initial_terms;
  const cplx reference = lambda + 0.01 * (1.0 + std::abs(lambda));
  auto largest = [&](const AsymptoticTail& tail, cplx mu) {
    double m = 0.0;
    for (cplx v : series_coefficients(tail, mu, terms)) m = std::max(m, std::abs(v));
    return m;
  };
  for (const AsymptoticTail* tail : {&pot.plus, &pot.minus}) {
    if (largest(*tail, lambda) < 1e-12 * largest(*tail, reference)) zero.classification = ZeroKind::spurious;
    // v_0 = 0 at λ = -iA(k+1)/2.
    const double k = std::round(2.0 * -lambda.imag() / tail->decay_rate - 1.0);
    const cplx pole(0.0, -tail->decay_rate * (k + 1.0) / 2.0);
    if (k >= 0.0 && std::abs(lambda - pole) < 1e-6 * (1.0 + std::abs(lambda))) zero.near_false_pole = true;
  }
  return zero;
}

}  // namespace qnmtrace
