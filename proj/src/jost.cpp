#include "qnmtrace/jost.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>

#include "qnmtrace/errors.hpp"

namespace qnmtrace {
namespace {

constexpr cplx I(0.0, 1.0);

bool near_positive_integer(cplx alpha, int terms) {
  const double k = std::round(alpha.real());
  return k >= 1.0 && k <= terms && std::abs(alpha - k) < 1e-3;
}

std::vector<cplx> normalized_coefficients(const AsymptoticTail& tail, cplx lambda, int terms,
                                          Normalization normalization) {
  if (normalization == Normalization::unit) {
    return series_coefficients_from(tail, lambda, terms, 1.0);
  }
  return series_coefficients(tail, lambda, terms);
}

// Largest of the last few terms |v_j| w^j relative to the series magnitude.
bool series_converged(const std::vector<cplx>& v, double w, double tol) {
  double total = 0.0;
  double tail = 0.0;
  const std::size_t n = v.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (v[j] == 0.0) continue;
    const double term = std::abs(v[j]) * std::pow(w, double(j));
    total += term;
    if (j + 4 >= n) tail = std::max(tail, term);
  }
  return tail <= tol * total;
}

#ifdef __SIZEOF_FLOAT128__
using ExtendedReal = __float128;
#else
using ExtendedReal = long double;
#endif

// Coefficients of p(center + scale·z) from those of p(r), both ascending.
template <typename T, typename Real>
std::vector<T> shift_polynomial(std::vector<T> c, Real center, Real scale) {
  const std::size_t n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = n - 1; j > k; --j) c[j - 1] += center * c[j];
  }
  Real power = 1;
  for (auto& value : c) {
    value *= power;
    power *= scale;
  }
  return c;
}

template <typename Real>
std::vector<cplx> radial_recursion(const RadialForm& form, Side side, cplx lambda, int terms,
                                   cplx leading) {
  using Complex = std::complex<Real>;
  const SdSGeometry& g = form.geometry;
  const Real m = g.mass;
  const Real third = Real(g.cosmological_constant) / 3;
  const Real angular = form.ell * (form.ell + 1.0);
  const Real center = side == Side::plus ? g.r_plus : g.r_minus;
  const Real rho = radial_series_radius(g, side);
  const Complex drift = Complex(0, 2 * side_sign(side)) * Complex(lambda.real(), lambda.imag());
  // r³G v'' + r³(G' + drift) v' - r³(V/G) v = 0 in z = (r - center)/ρ, times ρ².
  auto P = shift_polynomial<Real>({0, 0, -2 * m, 1, 0, -third}, center, rho);
  auto Q = shift_polynomial<Complex>({0, 2 * m, 0, drift, -2 * third}, center, rho);
  auto R = shift_polynomial<Real>({-2 * m, -angular, 0, 2 * third}, center, rho);
  P[0] = 0;
  for (auto& q : Q) q *= rho;
  for (auto& r : R) r *= rho * rho;

  std::vector<Complex> b(terms + 1, Complex(0));
  b[0] = Complex(leading.real(), leading.imag());
  for (int n = 0; n < terms; ++n) {
    Complex sum = 0;
    for (int k = 2; k < static_cast<int>(P.size()) && n - k + 2 >= 0; ++k) {
      sum += P[k] * Real(n - k + 2) * Real(n - k + 1) * b[n - k + 2];
    }
    for (int k = 1; k < static_cast<int>(Q.size()) && n - k + 1 >= 0; ++k) {
      sum += Q[k] * Real(n - k + 1) * b[n - k + 1];
    }
    for (int k = 0; k < static_cast<int>(R.size()) && n - k >= 0; ++k) sum += R[k] * b[n - k];
    b[n + 1] = -sum / (Real(n + 1) * (P[1] * Real(n) + Q[0]));
  }
  std::vector<cplx> out(terms + 1);
  for (int n = 0; n <= terms; ++n) out[n] = cplx(double(b[n].real()), double(b[n].imag()));
  return out;
}

std::vector<cplx> radial_recursion(const RadialForm& form, Side side, cplx lambda, int terms,
                                   cplx leading, bool extended) {
  return extended ? radial_recursion<ExtendedReal>(form, side, lambda, terms, leading)
                  : radial_recursion<double>(form, side, lambda, terms, leading);
}

}  // namespace

double radial_rounding_growth(const SdSGeometry& geom, Side side, cplx lambda, double z) {
  const Side other = side == Side::plus ? Side::minus : Side::plus;
  const double rate = other == Side::plus ? geom.A_plus : geom.A_minus;
  const double exponent = std::max(0.0, series_exponent(rate, lambda).real());
  const double distance = (geom.r_plus - geom.r_minus) / radial_series_radius(geom, side);
  return std::pow(distance / (distance - z), exponent);
}

double radial_envelope_peak(const SdSGeometry& geom, Side side, cplx lambda, double z) {
  const Side other = side == Side::plus ? Side::minus : Side::plus;
  const double rate = other == Side::plus ? geom.A_plus : geom.A_minus;
  const double exponent = std::max(0.0, series_exponent(rate, lambda).real());
  const double distance = (geom.r_plus - geom.r_minus) / radial_series_radius(geom, side);
  return exponent / std::log(distance / z);
}

double radial_series_radius(const SdSGeometry& geom, Side side) {
  const double gap = geom.r_plus - geom.r_minus;
  if (side == Side::minus) return std::min({geom.r_minus, gap, geom.r_minus - geom.r_third});
  return std::min({geom.r_plus, gap, geom.r_plus - geom.r_third});
}

std::vector<cplx> radial_series_coefficients(const RadialForm& form, Side side, cplx lambda,
                                             int terms, Normalization normalization, bool extended) {
  if (terms < 0) throw DomainError("radial_series_coefficients: negative number of terms");
  if (normalization == Normalization::unit) return radial_recursion(form, side, lambda, terms, 1.0, extended);
  const double rate = side == Side::plus ? form.geometry.A_plus : form.geometry.A_minus;
  const cplx alpha = series_exponent(rate, lambda);
  if (!near_positive_integer(alpha, terms)) {
    return radial_recursion(form, side, lambda, terms, reciprocal_gamma(1.0 - alpha), extended);
  }
  const double radius = 1e-4 * std::max(1.0, std::abs(lambda));
  std::vector<cplx> mean(terms + 1, 0.0);
  for (cplx direction : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
    const cplx shifted = lambda + radius * direction;
    const auto b = radial_recursion(form, side, shifted, terms,
                                    reciprocal_gamma(1.0 - series_exponent(rate, shifted)), extended);
    for (int j = 0; j <= terms; ++j) mean[j] += 0.25 * b[j];
  }
  return mean;
}

cplx series_exponent(double decay_rate, cplx lambda) { return 2.0 * I * lambda / decay_rate; }

std::vector<cplx> series_coefficients_from(const AsymptoticTail& tail, cplx lambda, int terms,
                                           cplx leading) {
  if (terms < 0) throw DomainError("series_coefficients: negative number of terms");
  const double a2 = tail.decay_rate * tail.decay_rate;
  const cplx alpha = series_exponent(tail.decay_rate, lambda);
  const auto& V = tail.coefficients;
  std::vector<cplx> v(terms + 1);
  v[0] = leading;
  for (int j = 1; j <= terms; ++j) {
    cplx sum = 0.0;
    const int upper = std::min<int>(j, static_cast<int>(V.size()));
    for (int l = 1; l <= upper; ++l) sum += V[l - 1] * v[j - l];
    v[j] = sum / (double(j) * a2 * (double(j) - alpha));
  }
  return v;
}

std::vector<cplx> series_coefficients(const AsymptoticTail& tail, cplx lambda, int terms) {
  const cplx alpha = series_exponent(tail.decay_rate, lambda);
  if (!near_positive_integer(alpha, terms)) {
    return series_coefficients_from(tail, lambda, terms, reciprocal_gamma(1.0 - alpha));
  }
  const double radius = 1e-4 * std::max(1.0, std::abs(lambda));
  std::vector<cplx> mean(terms + 1, 0.0);
  for (cplx direction : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
    const cplx shifted = lambda + radius * direction;
    const cplx shifted_alpha = series_exponent(tail.decay_rate, shifted);
    const auto v = series_coefficients_from(tail, shifted, terms, reciprocal_gamma(1.0 - shifted_alpha));
    for (int j = 0; j <= terms; ++j) mean[j] += 0.25 * v[j];
  }
  return mean;
}

JostSolution::JostSolution(const Potential& pot, cplx lambda, Side side, double x_inner,
                           const JostOptions& options)
    : lambda_(lambda), side_(side), x_span_(options.x_span) {
  if (!(std::abs(x_inner) <= options.x_span)) {
    throw DomainError("JostSolution: x outside the evaluation window");
  }
  const AsymptoticTail& tail = pot.tail(side);
  decay_rate_ = tail.decay_rate;
  match_point_ = options.match_point.value_or(tail.match_point);

  const double sigma = side_sign(side);
  if (pot.radial && options.radial_series && !options.match_point) {
    const SdSGeometry& g = pot.radial->geometry;
    radial_ = pot.radial;
    radial_radius_ = radial_series_radius(g, side);
    const double reach = options.radial_ratio * radial_radius_;
    match_point_ = tortoise(g, side == Side::plus ? g.r_plus - reach : g.r_minus + reach);
    // Converge at the evaluation point, but never check closer in than 0.8ρ.
    const RadialPoint inner = radial_point_from_tortoise(g, x_inner);
    const double z_inner = (side == Side::plus ? inner.to_plus : inner.to_minus) / radial_radius_;
    const double z_check = std::clamp(z_inner, std::min(0.8, options.radial_ratio), options.radial_ratio);
    const bool extended = radial_rounding_growth(g, side, lambda, z_check) > 1e3;
    // The part growing towards the other horizon can be invisible in the first
    // terms (near -iA(k+1)/2 the low orders nearly cancel), so pass its peak first.
    const double min_terms = 2.0 * radial_envelope_peak(g, side, lambda, z_check);
    int terms = 64;
    while (true) {
      coefficients_ =
          radial_series_coefficients(*pot.radial, side, lambda, terms, options.normalization, extended);
      if (terms >= options.radial_max_terms ||
          (terms >= min_terms && series_converged(coefficients_, z_check, options.series_tol))) {
        break;
      }
      terms = std::min(2 * terms, options.radial_max_terms);
    }
  }
  if (!radial_) {
    double w_check = std::exp(-sigma * decay_rate_ * match_point_);
    if (std::isfinite(tail.fit_radius)) w_check = std::max(w_check, 0.5 * tail.fit_radius);
    int terms = options.initial_terms;
    while (true) {
      coefficients_ = normalized_coefficients(tail, lambda, terms, options.normalization);
      if (terms >= options.max_terms || series_converged(coefficients_, w_check, options.series_tol)) {
        break;
      }
      terms = std::min(2 * terms, options.max_terms);
    }
  }

  if (sigma * x_inner >= sigma * match_point_) return;

  using State = Eigen::Matrix<cplx, 2, 1>;
  const Profile start = series_profile(match_point_);
  const double size = std::max(std::abs(start.v), std::abs(start.dv));
  const cplx drift = -2.0 * I * sigma * lambda;
  auto rhs = [&](double x, const State& y) {
    return State(y[1], drift * y[1] + pot(x) * y[0]);
  };
  auto record = [&](double x, const State& y, const State& f) {
    trajectory_.push_back({x, y[0], y[1], f[1]});
  };
  if (size == 0.0) {
    record(match_point_, State::Zero(), State::Zero());
    record(x_inner, State::Zero(), State::Zero());
    return;
  }
  StepControl control;
  control.rtol = options.rtol;
  control.atol = options.atol * size;
  control.initial_step = std::min(0.05, 0.5 / std::max(1.0, std::abs(lambda)));
  integrate_dopri5<cplx, 2>(rhs, match_point_, State(start.v, start.dv), x_inner, control, record);
}

Profile JostSolution::radial_profile(double x) const {
  const SdSGeometry& g = radial_->geometry;
  const RadialPoint p = radial_point_from_tortoise(g, x);
  const double z = (side_ == Side::plus ? -p.to_plus : p.to_minus) / radial_radius_;
  cplx v = 0.0;
  cplx dz = 0.0;
  for (std::size_t n = coefficients_.size(); n-- > 0;) {
    v = v * z + coefficients_[n];
    if (n > 0) dz = dz * z + double(n) * coefficients_[n];
  }
  const double metric = g.cosmological_constant / (3.0 * p.r) * p.to_minus * p.to_plus * (p.r - g.r_third);
  return {v, metric * dz / radial_radius_};
}

Profile JostSolution::series_profile(double x) const {
  if (radial_) return radial_profile(x);
  const double sigma = side_sign(side_);
  const double w = std::exp(-sigma * decay_rate_ * x);
  cplx v = 0.0;
  cplx weighted = 0.0;
  for (std::size_t j = coefficients_.size(); j-- > 0;) {
    v = v * w + coefficients_[j];
    weighted = weighted * w + double(j) * coefficients_[j];
  }
  return {v, -sigma * decay_rate_ * weighted};
}

Profile JostSolution::profile(double x) const {
  const double sigma = side_sign(side_);
  if (sigma * x >= sigma * match_point_) return series_profile(x);
  if (std::abs(x) <= x_span_ && trajectory_.covers(x)) {
    const auto [v, dv] = trajectory_(x);
    return {v, dv};
  }
  throw DomainError("JostSolution: x outside the constructed range");
}

JostValue JostSolution::evaluate(double x) const {
  const double sigma = side_sign(side_);
  const Profile p = profile(x);
  const cplx phase = std::exp(I * sigma * lambda_ * x);
  return {phase * p.v, phase * (I * sigma * lambda_ * p.v + p.dv)};
}

JostValue evaluate_outgoing(const Potential& pot, cplx lambda, Side side, double x,
                            const JostOptions& options) {
  return JostSolution(pot, lambda, side, x, options).evaluate(x);
}

JostValue evaluate_incoming(const Potential& pot, cplx lambda, Side side, double x,
                            const JostOptions& options) {
  return evaluate_outgoing(pot, -lambda, side, x, options);
}

}  // namespace qnmtrace
