#include "qnmtrace/potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qnmtrace/errors.hpp"

namespace qnmtrace {
namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

Potential make_sech2_family(double strength, std::string name) {
  Potential pot;
  pot.name = std::move(name);
  pot.value = [strength](double x) {
    const double c = std::cosh(x);
    return strength / (c * c);
  };
  constexpr int terms = 96;
  std::vector<double> coefficients(terms);
  for (int j = 1; j <= terms; ++j) {
    coefficients[j - 1] = 4.0 * (j % 2 == 1 ? 1.0 : -1.0) * j * strength;
  }
  for (Side side : {Side::plus, Side::minus}) {
    AsymptoticTail tail;
    tail.side = side;
    tail.decay_rate = 2.0;
    tail.coefficients = coefficients;
    tail.fit_radius = 1.0;
    tail.growth_constant = growth_constant(coefficients);
    locate_match_point(pot.value, tail);
    (side == Side::plus ? pot.plus : pot.minus) = std::move(tail);
  }
  return pot;
}

// X(r) - X(r_ref) accumulated along a short step, branch-continuous.
cplx tortoise_increment(const SdSGeometry& geom, cplx from, cplx to) {
  const std::array<double, 3> roots = {geom.r_minus, geom.r_plus, geom.r_third};
  const std::array<double, 3> residues = {geom.residue_minus(), geom.residue_plus(),
                                          geom.residue_third()};
  cplx sum = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    sum += residues[i] * std::log((to - roots[i]) / (from - roots[i]));
  }
  return sum;
}

cplx regge_wheeler_value(const SdSGeometry& geom, int ell, cplx r) {
  const double angular = ell * (ell + 1.0);
  return geom.G(r) / (r * r) * (angular + r * geom.dG(r));
}

}  // namespace

double AsymptoticTail::w(double x) const {
  return std::exp(-side_sign(side) * decay_rate * x);
}

cplx AsymptoticTail::w(cplx x) const { return std::exp(-side_sign(side) * decay_rate * x); }

double AsymptoticTail::evaluate(double x) const {
  const double z = w(x);
  double sum = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    sum = (sum + *it) * z;
  }
  return sum;
}

bool AsymptoticTail::in_series_region(double x) const {
  return side == Side::plus ? x >= match_point : x <= match_point;
}

double SdSGeometry::G(double r) const {
  return 1.0 - 2.0 * mass / r - cosmological_constant * r * r / 3.0;
}

double SdSGeometry::dG(double r) const {
  return 2.0 * mass / (r * r) - 2.0 * cosmological_constant * r / 3.0;
}

cplx SdSGeometry::G(cplx r) const {
  return cosmological_constant / (3.0 * r) * (r - r_minus) * (r_plus - r) * (r - r_third);
}

cplx SdSGeometry::dG(cplx r) const {
  return 2.0 * mass / (r * r) - 2.0 * cosmological_constant * r / 3.0;
}

double SdSGeometry::residue_third() const { return 1.0 / dG(r_third); }

double SdSGeometry::tortoise_offset() const {
  return -(residue_minus() * std::log(r0 - r_minus) + residue_plus() * std::log(r_plus - r0) +
           residue_third() * std::log(r0 - r_third));
}

double growth_constant(std::span<const double> coefficients) {
  double best = 0.0;
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (coefficients[j] != 0.0) {
      best = std::max(best, std::pow(std::abs(coefficients[j]), 1.0 / double(j + 1)));
    }
  }
  return best;
}

Potential make_poschl_teller(double ell) {
  if (!(ell >= 0.0)) throw DomainError("make_poschl_teller: ell must be nonnegative");
  return make_sech2_family(ell * ell + 0.25, "poschl_teller");
}

Potential make_scaled_sech2(double strength) { return make_sech2_family(strength, "sech2"); }

Potential make_zero_potential(double decay_rate) {
  if (!(decay_rate > 0.0)) throw DomainError("make_zero_potential: decay rate must be positive");
  Potential pot;
  pot.name = "zero";
  pot.value = [](double) { return 0.0; };
  for (Side side : {Side::plus, Side::minus}) {
    AsymptoticTail tail;
    tail.side = side;
    tail.decay_rate = decay_rate;
    tail.fit_radius = infinity;
    locate_match_point(pot.value, tail);
    (side == Side::plus ? pot.plus : pot.minus) = std::move(tail);
  }
  return pot;
}

SdSGeometry make_sds_geometry(double mass, double cosmological_constant, std::optional<double> r0) {
  const double product = 9.0 * cosmological_constant * mass * mass;
  if (!(mass > 0.0) || !(cosmological_constant > 0.0) || !(product < 1.0)) {
    throw DomainError("make_sds_geometry: requires m > 0, Λ > 0 and 9Λm² < 1");
  }
  SdSGeometry geom;
  geom.mass = mass;
  geom.cosmological_constant = cosmological_constant;

  // r G(r) = -(Λ/3)(r³ - (3/Λ) r + 6m/Λ); trigonometric roots, then Newton polish.
  const double p = -3.0 / cosmological_constant;
  const double q = 6.0 * mass / cosmological_constant;
  const double amplitude = 2.0 / std::sqrt(cosmological_constant);
  const double phi = std::acos(-3.0 * mass * std::sqrt(cosmological_constant));
  auto polish = [&](double r) {
    for (int it = 0; it < 4; ++it) r -= (r * r * r + p * r + q) / (3.0 * r * r + p);
    return r;
  };
  constexpr double two_pi_third = 2.0 * std::numbers::pi / 3.0;
  geom.r_plus = polish(amplitude * std::cos(phi / 3.0));
  geom.r_minus = polish(amplitude * std::cos(phi / 3.0 - two_pi_third));
  geom.r_third = polish(amplitude * std::cos(phi / 3.0 - 2.0 * two_pi_third));
  geom.A_minus = std::abs(geom.dG(geom.r_minus));
  geom.A_plus = std::abs(geom.dG(geom.r_plus));
  geom.r0 = r0.value_or(std::cbrt(3.0 * mass / cosmological_constant));
  if (!(geom.r0 > geom.r_minus && geom.r0 < geom.r_plus)) {
    throw DomainError("make_sds_geometry: r0 must lie between the horizons");
  }
  return geom;
}

double tortoise(const SdSGeometry& geom, double r) {
  if (!(r > geom.r_minus && r < geom.r_plus)) {
    throw DomainError("tortoise: r must lie strictly between the horizons");
  }
  return geom.residue_minus() * std::log(r - geom.r_minus) +
         geom.residue_plus() * std::log(geom.r_plus - r) +
         geom.residue_third() * std::log(r - geom.r_third) + geom.tortoise_offset();
}

RadialPoint radial_point_from_tortoise(const SdSGeometry& geom, double x) {
  if (!std::isfinite(x)) throw DomainError("radius_from_tortoise: x must be finite");
  const double span = geom.r_plus - geom.r_minus;
  const double c_minus = geom.residue_minus();
  const double c_plus = geom.residue_plus();
  const double c_third = geom.residue_third();
  const double offset = geom.tortoise_offset();
  const double lambda = geom.cosmological_constant;

  // Unknown y = log of the distance to the nearer horizon.
  const bool outer = x >= 0.0;
  auto point = [&](double y) {
    const double d = std::exp(y);
    return outer ? RadialPoint{geom.r_plus - d, span - d, d}
                 : RadialPoint{geom.r_minus + d, d, span - d};
  };
  auto residual = [&](double y) {
    const RadialPoint p = point(y);
    return c_minus * std::log(p.to_minus) + c_plus * std::log(p.to_plus) +
           c_third * std::log(p.r - geom.r_third) + offset - x;
  };
  auto slope = [&](double y) {  // dX/dy
    const RadialPoint p = point(y);
    const double s = 3.0 * p.r / (lambda * (p.r - geom.r_third));
    return outer ? -s / p.to_minus : s / p.to_plus;
  };

  // Horizon asymptotics X ≈ c log d + b give the initial guess.
  const double c_near = outer ? c_plus : c_minus;
  const double near_root = outer ? geom.r_plus : geom.r_minus;
  const double b = (outer ? c_minus : c_plus) * std::log(span) +
                   c_third * std::log(near_root - geom.r_third) + offset;
  const double y_cap = std::log(outer ? geom.r_plus - geom.r0 : geom.r0 - geom.r_minus);
  const double f_cap = residual(y_cap);
  if (f_cap == 0.0) return point(y_cap);

  // The residual is monotone in y; bracket between y_cap and a far point.
  double y = std::min((x - b) / c_near, y_cap);
  double y_far = y - 1.0;
  while ((residual(y_far) > 0.0) == (f_cap > 0.0)) {
    y_far = y_cap - 2.0 * (y_cap - y_far);
    if (y_far < -740.0) throw ConvergenceError("radius_from_tortoise: failed to bracket");
  }
  double far = y_far;
  double near = y_cap;
  y = std::clamp(y, far, near);
  for (int it = 0; it < 200; ++it) {
    const double f = residual(y);
    if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(x))) return point(y);
    ((f > 0.0) == (f_cap > 0.0) ? near : far) = y;
    double next = y - f / slope(y);
    if (!(next > std::min(far, near) && next < std::max(far, near))) next = 0.5 * (far + near);
    if (std::abs(next - y) <= 1e-15 * std::max(1.0, std::abs(y))) return point(next);
    y = next;
  }
  throw ConvergenceError("radius_from_tortoise: Newton iteration did not converge");
}

double radius_from_tortoise(const SdSGeometry& geom, double x) {
  return radial_point_from_tortoise(geom, x).r;
}

double regge_wheeler_value(const SdSGeometry& geom, int ell, const RadialPoint& p) {
  const double r = p.r;
  const double g = geom.cosmological_constant / (3.0 * r) * p.to_minus * p.to_plus * (r - geom.r_third);
  return g / (r * r) * (ell * (ell + 1.0) + r * geom.dG(r));
}

double regge_wheeler_tail_radius(const SdSGeometry& geom, Side side) {
  const double offset = geom.tortoise_offset();
  const double at_origin = geom.residue_minus() * std::log(geom.r_minus) +
                           geom.residue_plus() * std::log(geom.r_plus) +
                           geom.residue_third() * std::log(-geom.r_third) + offset;
  // Re X at r = 0 and r = ∞; w = exp(∓A X).
  const double rate = side == Side::plus ? -geom.A_plus : geom.A_minus;
  return std::min(std::exp(rate * at_origin), std::exp(rate * offset));
}

std::vector<double> contour_tail_coefficients(const SdSGeometry& geom, int ell, Side side,
                                              double radius, int points, int terms) {
  const double rate = side == Side::plus ? geom.A_plus : geom.A_minus;
  const double sign = side_sign(side);
  // x on the circle |w| = radius: x = ∓(log radius + iθ)/A.
  auto target = [&](double theta) { return -sign * cplx(std::log(radius), theta) / rate; };

  cplx r = radius_from_tortoise(geom, target(0.0).real());
  cplx x = target(0.0).real();
  auto track = [&](cplx goal) {
    for (int it = 0; it < 100; ++it) {
      const cplx error = x - goal;
      if (std::abs(error) <= 1e-13 * (1.0 + std::abs(goal))) return;
      double damping = 1.0;
      for (int attempt = 0; attempt < 30; ++attempt, damping *= 0.5) {
        const cplx next = r - damping * error * geom.G(r);
        const cplx next_x = x + tortoise_increment(geom, r, next);
        if (std::abs(next_x - goal) < std::abs(error)) {
          r = next;
          x = next_x;
          break;
        }
      }
    }
    if (std::abs(x - goal) > 1e-10 * (1.0 + std::abs(goal))) {
      throw ConvergenceError("contour_tail_coefficients: complex radius tracking failed");
    }
  };

  // Continuation around the circle in small steps keeps Newton in its basin.
  constexpr int substeps = 4;
  auto advance_to = [&](int k) {
    for (int s = 1; s <= substeps; ++s) {
      track(target(2.0 * std::numbers::pi * (k - 1 + double(s) / substeps) / points));
    }
  };
  std::vector<cplx> samples(points);
  const cplx start = r;
  for (int k = 0; k < points; ++k) {
    if (k > 0) advance_to(k);
    samples[k] = regge_wheeler_value(geom, ell, r);
  }
  advance_to(points);
  if (std::abs(r - start) > 1e-8 * std::abs(start)) {
    throw IllConditionedError("contour_tail_coefficients: contour encloses a branch point");
  }

  std::vector<double> coefficients(terms);
  for (int j = 1; j <= terms; ++j) {
    cplx sum = 0.0;
    for (int k = 0; k < points; ++k) {
      sum += samples[k] * std::polar(1.0, -2.0 * std::numbers::pi * double(j) * k / points);
    }
    coefficients[j - 1] = (sum / double(points)).real() * std::pow(radius, -double(j));
  }
  return coefficients;
}

std::vector<double> default_fit_grid(Side side, double decay_rate, int points) {
  const double x_max = std::log(20.0) / (0.3 * decay_rate);
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) {
    const double x = 0.3 * x_max + (x_max - 0.3 * x_max) * k / (points - 1);
    grid[k] = side_sign(side) * x;
  }
  return grid;
}

TailFit fit_tail_coefficients(const std::function<double(double)>& evaluator, Side side,
                              double decay_rate, int terms, std::span<const double> grid) {
  if (terms < 1) throw DomainError("fit_tail_coefficients: need at least one term");
  if (grid.size() < static_cast<std::size_t>(terms)) {
    throw DomainError("fit_tail_coefficients: grid has fewer points than terms");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd values(n), weights(n), w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    values[k] = evaluator(grid[k]);
    w[k] = std::exp(-side_sign(side) * decay_rate * grid[k]);
    weights[k] = values[k] != 0.0 ? 1.0 / std::abs(values[k]) : 1.0;
  }
  if (values.cwiseAbs().maxCoeff() == 0.0) return {std::vector<double>(terms, 0.0), 0.0};

  Eigen::MatrixXd design(n, terms);
  for (Eigen::Index k = 0; k < n; ++k) {
    double power = w[k];
    for (int j = 0; j < terms; ++j, power *= w[k]) design(k, j) = power * weights[k];
  }
  const Eigen::VectorXd scale = design.colwise().norm().cwiseInverse();
  const Eigen::MatrixXd scaled = design * scale.asDiagonal();
  const Eigen::VectorXd singular = Eigen::JacobiSVD<Eigen::MatrixXd>(scaled).singularValues();
  const double condition = std::pow(singular[0] / singular[singular.size() - 1], 2);
  if (!(condition <= 1e12)) {
    throw IllConditionedError("fit_tail_coefficients: normal equations condition estimate " +
                              std::to_string(condition) + " exceeds 1e12");
  }
  const Eigen::VectorXd solution =
      scale.asDiagonal() * scaled.colPivHouseholderQr().solve(values.cwiseProduct(weights));

  TailFit fit{std::vector<double>(solution.data(), solution.data() + terms), 0.0};
  for (Eigen::Index k = 0; k < n; ++k) {
    double series = 0.0;
    for (int j = terms - 1; j >= 0; --j) series = (series + fit.coefficients[j]) * w[k];
    fit.residual = std::max(fit.residual, std::abs(series - values[k]) * weights[k]);
  }
  return fit;
}

void locate_match_point(const std::function<double(double)>& evaluator, AsymptoticTail& tail,
                        double rel_tol, double x_limit) {
  const double sign = side_sign(tail.side);
  const double radius_bound = -std::log(0.6 * tail.fit_radius) / tail.decay_rate;
  const double nearest = std::max(radius_bound, -x_limit);
  constexpr double step = 0.02;
  double accepted = x_limit;
  double worst = 0.0;
  for (double distance = x_limit; distance >= nearest; distance -= step) {
    const double x = sign * distance;
    const double v = evaluator(x);
    const double error = std::abs(tail.evaluate(x) - v);
    if (error > rel_tol * std::abs(v) + 1e-300) break;
    if (v != 0.0) worst = std::max(worst, error / std::abs(v));
    accepted = distance;
  }
  if (accepted == x_limit && nearest < x_limit) {
    const double v = evaluator(sign * x_limit);
    if (std::abs(tail.evaluate(sign * x_limit) - v) > rel_tol * std::abs(v) + 1e-300) {
      throw ConvergenceError("locate_match_point: tail series never matches the potential");
    }
  }
  tail.match_point = sign * accepted;
  tail.residual = worst;
}

Potential make_regge_wheeler(const SdSGeometry& geom, int ell, const ReggeWheelerOptions& options) {
  if (ell < 0) throw DomainError("make_regge_wheeler: ell must be nonnegative");
  Potential pot;
  pot.name = "regge_wheeler";
  pot.radial = std::make_shared<const RadialForm>(RadialForm{geom, ell});
  pot.value = [geom, ell](double x) {
    return regge_wheeler_value(geom, ell, radial_point_from_tortoise(geom, x));
  };
  for (Side side : {Side::plus, Side::minus}) {
    AsymptoticTail tail;
    tail.side = side;
    tail.decay_rate = side == Side::plus ? geom.A_plus : geom.A_minus;
    tail.fit_radius = regge_wheeler_tail_radius(geom, side);
    double match_tol = 1e-9;
    if (options.tail_method == TailMethod::contour) {
      tail.coefficients = contour_tail_coefficients(geom, ell, side, 0.8 * tail.fit_radius,
                                                    options.contour_points, options.tail_terms);
    } else {
      const auto grid = default_fit_grid(side, tail.decay_rate);
      TailFit fit = fit_tail_coefficients(pot.value, side, tail.decay_rate,
                                          options.least_squares_terms, grid);
      tail.coefficients = std::move(fit.coefficients);
      match_tol = std::max(match_tol, 10.0 * fit.residual);
    }
    tail.growth_constant = growth_constant(tail.coefficients);
    locate_match_point(pot.value, tail, match_tol);
    (side == Side::plus ? pot.plus : pot.minus) = std::move(tail);
  }
  return pot;
}

}  // namespace qnmtrace
