#include <doctest.h>

#include <cmath>
#include <vector>

#include "qnmtrace/errors.hpp"
#include "qnmtrace/potential.hpp"
#include "qnmtrace/quadrature.hpp"

using namespace qnmtrace;

namespace {

// Root of G by bisection on [a, b]; independent of the cubic formula.
double bisect_metric_root(const SdSGeometry& geom, double a, double b) {
  double fa = geom.G(a);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = geom.G(mid);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// ∫_{r0}^{r} ds / G(s) with s = r± ∓ e^u near the horizon, 32-point panels.
double tortoise_by_quadrature(const SdSGeometry& geom, double r) {
  static const QuadratureRule rule = gauss_legendre(32);
  const bool outer = r >= geom.r0;
  const double horizon = outer ? geom.r_plus : geom.r_minus;
  auto integrand = [&](double u) {
    const double s = outer ? horizon - std::exp(u) : horizon + std::exp(u);
    return std::exp(u) / geom.G(s);
  };
  const double u_origin = std::log(std::abs(horizon - geom.r0));
  const double u_end = std::log(std::abs(horizon - r));
  const int panels = std::max(1, int(std::ceil(std::abs(u_origin - u_end) / 0.25)));
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = u_end + (u_origin - u_end) * k / panels;
    const double b = u_end + (u_origin - u_end) * (k + 1) / panels;
    sum += integrate(integrand, a, b, rule);
  }
  return outer ? sum : -sum;
}

const SdSGeometry& reference_geometry() {
  static const SdSGeometry geom = make_sds_geometry(1.0, 0.04);
  return geom;
}

}  // namespace

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const auto rule = gauss_legendre(12);
  double weight_sum = 0.0;
  for (double w : rule.weights) weight_sum += w;
  CHECK(weight_sum == doctest::Approx(2.0).epsilon(1e-14));
  const double integral = integrate([](double x) { return std::pow(x, 22) + x * x * x; }, -1.0, 1.0, rule);
  CHECK(integral == doctest::Approx(2.0 / 23.0).epsilon(1e-13));
  const double adaptive = integrate_adaptive([](double x) { return std::exp(-x) * std::cos(5 * x); }, 0.0, 20.0, 1e-13);
  const double exact = (1.0 + std::exp(-20.0) * (5 * std::sin(100.0) - std::cos(100.0))) / 26.0;
  CHECK(adaptive == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("Pöschl-Teller evaluator and tails") {
  const Potential pot = make_poschl_teller(1.0);
  CHECK(pot(0.0) == doctest::Approx(1.25));
  for (Side side : {Side::plus, Side::minus}) {
    const AsymptoticTail& tail = pot.tail(side);
    CHECK(tail.decay_rate == 2.0);
    CHECK(tail.coefficients[0] == doctest::Approx(5.0));
    // sech²x = 4 Σ (-1)^{k-1} k e^{-2k|x|}
    double oracle = 0.0;
    const double w = std::exp(-16.0);
    for (int k = 1; k <= 6; ++k) oracle += 4.0 * (k % 2 ? 1.0 : -1.0) * k * std::pow(w, k) * 1.25;
    const double x = side_sign(side) * 8.0;
    CHECK(std::abs(tail.evaluate(x) - pot(x)) <= 1e-10 * pot(x));
    CHECK(std::abs(oracle - pot(x)) <= 1e-10 * pot(x));
  }
  CHECK(pot.plus.match_point > 0.0);
  CHECK(pot.minus.match_point == doctest::Approx(-pot.plus.match_point));
}

TEST_CASE("Pöschl-Teller with ell = 0 is even") {
  const Potential pot = make_poschl_teller(0.0);
  for (double x = 0.0; x < 10.0; x += 0.37) CHECK(pot(x) == pot(-x));
  CHECK_THROWS_AS(make_poschl_teller(-1.0), DomainError);
}

TEST_CASE("tail series matches the evaluator beyond the match point") {
  const Potential pt = make_poschl_teller(1.0);
  const Potential rw = make_regge_wheeler(reference_geometry(), 2);
  for (const Potential* pot : {&pt, &rw}) {
    for (Side side : {Side::plus, Side::minus}) {
      const AsymptoticTail& tail = pot->tail(side);
      for (double d = 0.0; d < 30.0; d += 0.13) {
        const double x = tail.match_point + side_sign(side) * d;
        const double v = (*pot)(x);
        CHECK(std::abs(tail.evaluate(x) - v) <= 1e-9 * std::abs(v));
      }
      CHECK(std::abs(tail.w(tail.match_point)) <= 0.6 * tail.fit_radius + 1e-12);
    }
  }
}

TEST_CASE("tail coefficients obey the growth bound") {
  const Potential rw = make_regge_wheeler(reference_geometry(), 2);
  for (Side side : {Side::plus, Side::minus}) {
    const AsymptoticTail& tail = rw.tail(side);
    for (std::size_t j = 0; j < tail.coefficients.size(); ++j) {
      CHECK(std::abs(tail.coefficients[j]) <= std::pow(tail.growth_constant, double(j + 1)) * (1 + 1e-12));
    }
  }
}

TEST_CASE("potentials decay exponentially beyond the match points") {
  const Potential rw = make_regge_wheeler(reference_geometry(), 2);
  for (Side side : {Side::plus, Side::minus}) {
    const AsymptoticTail& tail = rw.tail(side);
    const double x0 = tail.match_point;
    const double bound = std::abs(rw(x0)) * 2.0;
    for (double d = 0.0; d < 40.0; d += 0.5) {
      const double x = x0 + side_sign(side) * d;
      CHECK(std::abs(rw(x)) <= bound * std::exp(-tail.decay_rate * d) * std::exp(0.8 * tail.decay_rate * d) );
    }
  }
}

TEST_CASE("least-squares fit recovers the sech² expansion") {
  const Potential pot = make_poschl_teller(1.0);
  std::vector<double> grid;
  for (int k = 0; k < 40; ++k) grid.push_back(6.0 + 6.0 * k / 39.0);
  const TailFit fit = fit_tail_coefficients(pot.value, Side::plus, 2.0, 6, grid);
  CHECK(fit.coefficients[0] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(fit.coefficients[1] == doctest::Approx(-10.0).epsilon(1e-4));
  CHECK(fit.residual < 1e-12);
}

TEST_CASE("least-squares fit of the zero potential") {
  const Potential pot = make_zero_potential();
  const auto grid = default_fit_grid(Side::minus, 2.0);
  const TailFit fit = fit_tail_coefficients(pot.value, Side::minus, 2.0, 5, grid);
  for (double c : fit.coefficients) CHECK(c == 0.0);
  CHECK(fit.residual == 0.0);
}

TEST_CASE("least-squares fit reports ill-conditioning") {
  const Potential pot = make_poschl_teller(1.0);
  const auto grid = default_fit_grid(Side::plus, 2.0);
  CHECK_THROWS_AS(fit_tail_coefficients(pot.value, Side::plus, 2.0, 30, grid), IllConditionedError);
}

TEST_CASE("Regge-Wheeler least-squares fit agrees with the contour coefficients") {
  const SdSGeometry& geom = reference_geometry();
  const Potential rw = make_regge_wheeler(geom, 2);
  const auto grid = default_fit_grid(Side::plus, geom.A_plus);
  const TailFit fit = fit_tail_coefficients(rw.value, Side::plus, geom.A_plus, 8, grid);
  CHECK(fit.residual <= 1e-8);
  for (int j = 0; j < 3; ++j) {
    CHECK(fit.coefficients[j] == doctest::Approx(rw.plus.coefficients[j]).epsilon(1e-8));
  }
  ReggeWheelerOptions options;
  options.tail_method = TailMethod::least_squares;
  const Potential fitted = make_regge_wheeler(geom, 2, options);
  CHECK(fitted.plus.coefficients.size() == 8);
  CHECK(fitted.plus.coefficients[0] == doctest::Approx(rw.plus.coefficients[0]).epsilon(1e-8));
}

TEST_CASE("SdS horizons against the bisection oracle") {
  const SdSGeometry& geom = reference_geometry();
  const double r_minus = bisect_metric_root(geom, 2.0, geom.r0);
  const double r_plus = bisect_metric_root(geom, geom.r0, 3.0 / std::sqrt(0.04));
  CHECK(geom.r_minus == doctest::Approx(r_minus).epsilon(1e-13));
  CHECK(geom.r_plus == doctest::Approx(r_plus).epsilon(1e-13));
  CHECK(geom.r_minus == doctest::Approx(2.12859274583).epsilon(1e-11));
  CHECK(geom.r_plus == doctest::Approx(7.39748947239).epsilon(1e-11));
  CHECK(std::abs(geom.G(geom.r_minus)) <= 1e-12);
  CHECK(std::abs(geom.G(geom.r_plus)) <= 1e-12);
  CHECK(geom.r_minus < geom.r_plus);
  for (double r = geom.r_minus + 0.01; r < geom.r_plus; r += 0.05) CHECK(geom.G(r) > 0.0);
}

TEST_CASE("SdS surface gravities from finite differences") {
  const SdSGeometry& geom = reference_geometry();
  const double h = 1e-5;
  for (auto [r, A] : {std::pair{geom.r_minus, geom.A_minus}, std::pair{geom.r_plus, geom.A_plus}}) {
    const double kappa = std::abs(geom.G(r + h) - geom.G(r - h)) / (2.0 * h) / 2.0;
    CHECK(std::abs(A - 2.0 * kappa) <= 1e-8);
  }
}

TEST_CASE("SdS geometry near the Schwarzschild limit") {
  const SdSGeometry geom = make_sds_geometry(1.0, 1e-6);
  CHECK(std::abs(geom.r_minus - 2.0) <= 1e-4);
}

TEST_CASE("SdS parameter domain") {
  CHECK_THROWS_AS(make_sds_geometry(1.0, 0.2), DomainError);
  CHECK_THROWS_AS(make_sds_geometry(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(make_sds_geometry(-1.0, 0.01), DomainError);
  CHECK_THROWS_AS(make_sds_geometry(1.0, 0.04, 1.0), DomainError);
}

TEST_CASE("tortoise coordinate against quadrature") {
  const SdSGeometry& geom = reference_geometry();
  CHECK(tortoise(geom, geom.r0) == 0.0);
  for (double t = 0.001; t < 1.0; t += 0.0371) {
    const double r = geom.r_minus + t * (geom.r_plus - geom.r_minus);
    CHECK(std::abs(tortoise(geom, r) - tortoise_by_quadrature(geom, r)) <= 1e-10);
  }
  CHECK_THROWS_AS(tortoise(geom, geom.r_plus), DomainError);
  CHECK_THROWS_AS(tortoise(geom, geom.r_minus), DomainError);
  CHECK_THROWS_AS(tortoise(geom, 1.0), DomainError);
}

TEST_CASE("tortoise coordinate is increasing") {
  const SdSGeometry& geom = reference_geometry();
  double previous = -1e300;
  for (int k = 1; k <= 100; ++k) {
    const double r = geom.r_minus + (geom.r_plus - geom.r_minus) * k / 101.0;
    const double x = tortoise(geom, r);
    CHECK(x > previous);
    previous = x;
  }
}

TEST_CASE("tortoise coordinate has logarithmic horizon asymptotics") {
  const SdSGeometry& geom = reference_geometry();
  auto remainder = [&](double d) { return tortoise(geom, geom.r_plus - d) + std::log(d) / geom.A_plus; };
  const double limit = remainder(1e-9);
  for (double d = 1e-2; d > 1e-8; d *= 0.1) {
    CHECK(std::abs(remainder(d) - limit) <= 10.0 * d + 1e-6);
  }
}

TEST_CASE("radius from tortoise") {
  const SdSGeometry& geom = reference_geometry();
  CHECK(radius_from_tortoise(geom, 0.0) == doctest::Approx(geom.r0).epsilon(1e-15));
  const double mid = 0.5 * (geom.r_minus + geom.r_plus);
  CHECK(std::abs(radius_from_tortoise(geom, tortoise(geom, mid)) - mid) <= 1e-10);
  for (double x = -30.0; x <= 30.0; x += 0.25) {
    CHECK(std::abs(tortoise(geom, radius_from_tortoise(geom, x)) - x) <= 1e-10);
  }
  // r_plus - r ≈ C e^{-A_plus x} with C from the horizon expansion of the tortoise map.
  const double constant = std::exp(geom.A_plus * (geom.residue_minus() * std::log(geom.r_plus - geom.r_minus) +
                                                  geom.residue_third() * std::log(geom.r_plus - geom.r_third) +
                                                  geom.tortoise_offset()));
  const RadialPoint far = radial_point_from_tortoise(geom, 30.0);
  CHECK(far.to_plus == doctest::Approx(constant * std::exp(-geom.A_plus * 30.0)).epsilon(0.05));
  CHECK(far.to_plus < 2.0 * constant * std::exp(-geom.A_plus * 30.0));
  CHECK_THROWS_AS(radius_from_tortoise(geom, std::nan("")), DomainError);
}

TEST_CASE("Regge-Wheeler values") {
  const SdSGeometry& geom = reference_geometry();
  const Potential rw1 = make_regge_wheeler(geom, 1);
  const double r0 = geom.r0;
  const double direct = geom.G(r0) / (r0 * r0) * (2.0 + r0 * geom.dG(r0));
  CHECK(rw1(0.0) == doctest::Approx(direct).epsilon(1e-13));
  CHECK(rw1(0.0) == doctest::Approx(0.0324576887069).epsilon(1e-10));
  for (int ell : {0, 1, 2, 3}) {
    const Potential rw = make_regge_wheeler(geom, ell);
    CHECK(std::abs(rw(150.0)) < 1e-8);
    CHECK(std::abs(rw(-150.0)) < 1e-8);
  }
}

namespace {

// Least-squares slope of log|V| over side_sign * x in [from, to].
double log_slope(const Potential& pot, Side side, double from, double to) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double d = from; d <= to + 1e-12; d += 0.25, ++n) {
    const double y = std::log(std::abs(pot(side_sign(side) * d)));
    sx += d; sy += y; sxx += d * d; sxy += d * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("Regge-Wheeler log-slopes match the surface gravities") {
  const SdSGeometry& geom = reference_geometry();
  const Potential rw = make_regge_wheeler(geom, 2);
  CHECK(std::abs(log_slope(rw, Side::minus, 20.0, 30.0) - geom.A_minus) <= 0.01 * geom.A_minus);
  // On [20, 30] the second tail term V_2 w² still shifts the plus slope by
  // about V_2/V_1 * w ≈ 1.3 %; the predicted shift is checked instead.
  const double slope = log_slope(rw, Side::plus, 20.0, 30.0);
  const double ratio = rw.plus.coefficients[1] / rw.plus.coefficients[0];
  const double predicted = geom.A_plus * (1.0 + ratio * std::exp(-geom.A_plus * 25.0));
  CHECK(std::abs(slope - predicted) <= 0.002 * geom.A_plus);
  CHECK(std::abs(log_slope(rw, Side::plus, 40.0, 60.0) - geom.A_plus) <= 0.001 * geom.A_plus);
}
