#include <doctest.h>

#include <cmath>

#include "qnmtrace/errors.hpp"
#include "qnmtrace/jost.hpp"

using namespace qnmtrace;

namespace {

constexpr cplx I(0.0, 1.0);

// Pole-free form of the profile recursion: v_j = w_j / Γ(j + 1 - α) with
// w_j = (1/(j A²)) Σ_l V_l w_{j-l} Π_{m=j-l+1}^{j-1} (m - α).
std::vector<cplx> pole_free_coefficients(const AsymptoticTail& tail, cplx lambda, int terms) {
  const cplx alpha = series_exponent(tail.decay_rate, lambda);
  const double a2 = tail.decay_rate * tail.decay_rate;
  std::vector<cplx> w(terms + 1);
  w[0] = 1.0;
  for (int j = 1; j <= terms; ++j) {
    cplx sum = 0.0;
    for (int l = 1; l <= std::min<int>(j, tail.coefficients.size()); ++l) {
      cplx product = 1.0;
      for (int m = j - l + 1; m <= j - 1; ++m) product *= double(m) - alpha;
      sum += tail.coefficients[l - 1] * w[j - l] * product;
    }
    w[j] = sum / (double(j) * a2);
  }
  std::vector<cplx> v(terms + 1);
  for (int j = 0; j <= terms; ++j) v[j] = w[j] * reciprocal_gamma(double(j + 1) - alpha);
  return v;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (cplx c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("series coefficients of the zero potential") {
  const Potential zero = make_zero_potential();
  const cplx lambda(0.7, -0.2);
  const auto v = series_coefficients(zero.plus, lambda, 10);
  CHECK(v[0] == reciprocal_gamma(1.0 - series_exponent(2.0, lambda)));
  for (int j = 1; j <= 10; ++j) CHECK(v[j] == 0.0);
}

TEST_CASE("first recursion step for Pöschl-Teller") {
  const Potential pt = make_poschl_teller(1.0);
  const auto v = series_coefficients(pt.plus, 1.0, 3);
  const cplx v0 = reciprocal_gamma(1.0 - I);
  CHECK(std::abs(v[0] - v0) < 1e-15);
  const cplx v1 = 5.0 * v0 / (4.0 * (1.0 - I));
  CHECK(std::abs(v[1] - v1) < 1e-15);
  CHECK(std::abs(v[1] - cplx(1.500220023517, 0.788210472221152)) < 1e-12);
}

TEST_CASE("series coefficients match the pole-free oracle") {
  const Potential pt = make_poschl_teller(1.0);
  for (cplx lambda : {cplx(0.4, -0.3), cplx(-2.0, -1.5), cplx(0.0, -1.0), cplx(0.0, -3.0),
                      cplx(1e-4, -2.0 + 3e-4), cplx(0.0, -0.5)}) {
    const auto v = series_coefficients(pt.plus, lambda, 40);
    const auto oracle = pole_free_coefficients(pt.plus, lambda, 40);
    const double scale = std::max(max_abs(oracle), 1e-300);
    for (int j = 0; j <= 40; ++j) CHECK(std::abs(v[j] - oracle[j]) <= 1e-8 * scale);
  }
}

TEST_CASE("near-integer exponents give finite coefficients") {
  const Potential pt = make_poschl_teller(1.0);
  // α = 2iλ/2 = 3 at λ = -3i
  const auto v = series_coefficients(pt.plus, cplx(0.0, -3.0), 30);
  for (cplx c : v) CHECK(std::isfinite(std::abs(c)));
  CHECK(std::abs(v[0]) < 1e-12);
}

TEST_CASE("coefficient growth bound") {
  const Potential pt = make_poschl_teller(1.0);
  const double A = 2.0;
  const double eps = std::min(1.0, 1.0 / (A * A)) / 2.0;
  const double Ac = pt.plus.growth_constant;
  for (cplx lambda : {cplx(1.0, 0.0), cplx(0.3, -0.6), cplx(-2.0, 0.5)}) {
    const auto v = series_coefficients(pt.plus, lambda, 30);
    for (int j = 0; j <= 30; ++j) {
      CHECK(std::abs(v[j]) <= std::abs(v[0]) * std::pow(Ac / (eps * A * A), j) * (1 + 1e-12));
    }
  }
}

TEST_CASE("outgoing solution of the zero potential") {
  const Potential zero = make_zero_potential();
  const JostValue out = evaluate_outgoing(zero, 1.0, Side::plus, 3.0);
  const cplx expected = std::exp(3.0 * I) * reciprocal_gamma(1.0 - I);
  CHECK(std::abs(out.u - expected) < 1e-14);
  CHECK(std::abs(out.du - I * expected) < 1e-14);
  const JostValue in = evaluate_incoming(zero, 1.0, Side::plus, 3.0);
  CHECK(std::abs(in.u - std::exp(-3.0 * I) * reciprocal_gamma(1.0 + I)) < 1e-14);
}

TEST_CASE("two match points give the same solution") {
  const Potential pt = make_poschl_teller(1.0);
  const cplx lambda(1.0, -0.3);
  JostOptions near, far;
  near.match_point = 8.0;
  far.match_point = 12.0;
  const cplx a = evaluate_outgoing(pt, lambda, Side::plus, -2.0, near).u;
  const cplx b = evaluate_outgoing(pt, lambda, Side::plus, -2.0, far).u;
  CHECK(std::abs(a - b) <= 1e-7 * std::abs(a));
  const cplx c = evaluate_outgoing(pt, lambda, Side::plus, -2.0).u;
  CHECK(std::abs(a - c) <= 1e-7 * std::abs(a));
}

TEST_CASE("outgoing solution at imaginary lambda is positive and decreasing") {
  const Potential pt = make_poschl_teller(1.0);
  const JostSolution solution(pt, cplx(0.0, 5.0), Side::plus, -5.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double x = -5.0; x <= 5.0; x += 0.05) {
    const double u = solution.evaluate(x).u.real();
    CHECK(u > 0.0);
    CHECK(u < previous);
    previous = u;
  }
}

TEST_CASE("incoming is the conjugate of outgoing for real lambda") {
  const Potential pt = make_poschl_teller(1.0);
  for (double x : {-1.0, 0.0, 1.0}) {
    for (Side side : {Side::plus, Side::minus}) {
      const JostValue out = evaluate_outgoing(pt, 2.0, side, x);
      const JostValue in = evaluate_incoming(pt, 2.0, side, x);
      CHECK(std::abs(in.u - std::conj(out.u)) <= 1e-9 * std::abs(out.u));
      CHECK(std::abs(in.du - std::conj(out.du)) <= 1e-9 * std::abs(out.du));
    }
  }
}

TEST_CASE("Wronskian of outgoing and incoming solutions") {
  for (const Potential& pot : {make_zero_potential(), make_poschl_teller(1.0)}) {
    const double lambda = 1.3;
    for (double x : {-1.5, 0.0, 2.0}) {
      const JostSolution out(pot, lambda, Side::plus, x);
      const JostSolution in(pot, -lambda, Side::plus, x);
      const JostValue a = out.evaluate(x);
      const JostValue b = in.evaluate(x);
      const cplx wronskian = a.du * b.u - a.u * b.du;
      const cplx expected = 2.0 * I * lambda * out.coefficients()[0] * in.coefficients()[0];
      CHECK(std::abs(wronskian - expected) <= 1e-9 * std::abs(expected));
    }
  }
}

TEST_CASE("profile satisfies the ODE") {
  const Potential pt = make_poschl_teller(1.0);
  for (Side side : {Side::plus, Side::minus}) {
    const cplx lambda(0.8, -0.7);
    const double sigma = side_sign(side);
    const JostSolution solution(pt, lambda, side, -sigma * 3.0);
    const double h = 1e-3;
    for (double x = -2.9; x <= 2.9; x += 0.1) {
      const Profile p = solution.profile(x);
      const cplx second = (solution.profile(x + h).v - 2.0 * p.v + solution.profile(x - h).v) / (h * h);
      const cplx rhs = -2.0 * I * sigma * lambda * p.dv + pt(x) * p.v;
      CHECK(std::abs(second - rhs) <= 1e-5 * (std::abs(p.v) + std::abs(p.dv)));
      const cplx first = (solution.profile(x + h).v - solution.profile(x - h).v) / (2 * h);
      CHECK(std::abs(first - p.dv) <= 1e-6 * (std::abs(p.v) + std::abs(p.dv)));
    }
  }
}

TEST_CASE("series and ODE data agree at the match point") {
  const Potential pt = make_poschl_teller(1.0);
  const cplx lambda(-1.1, -0.4);
  const JostSolution solution(pt, lambda, Side::minus, 2.0);
  const double M = solution.match_point();
  const Profile at = solution.profile(M);
  const Profile inside = solution.profile(M + 1e-10);
  CHECK(std::abs(at.v - inside.v) <= 1e-8 * std::abs(at.v));
  CHECK(std::abs(at.dv - inside.dv) <= 1e-8 * std::abs(at.dv) + 1e-8 * std::abs(at.v));
}

TEST_CASE("outgoing solutions are holomorphic in lambda") {
  const Potential pt = make_poschl_teller(1.0);
  const double h = 1e-4;
  for (cplx lambda : {cplx(0.5, -0.5), cplx(-1.7, 0.3), cplx(2.2, -1.4)}) {
    auto u = [&](cplx l) { return evaluate_outgoing(pt, l, Side::plus, -1.0).u; };
    const cplx along_real = (u(lambda + h) - u(lambda - h)) / (2.0 * h);
    const cplx along_imag = (u(lambda + I * h) - u(lambda - I * h)) / (2.0 * I * h);
    CHECK(std::abs(along_real - along_imag) <= 1e-5 * std::abs(along_real));
  }
}

TEST_CASE("unit normalization divides out the Gamma factor") {
  const Potential pt = make_poschl_teller(1.0);
  const cplx lambda(1.4, -0.2);
  JostOptions unit;
  unit.normalization = Normalization::unit;
  const cplx a = evaluate_outgoing(pt, lambda, Side::minus, 1.0).u;
  const cplx b = evaluate_outgoing(pt, lambda, Side::minus, 1.0, unit).u;
  CHECK(std::abs(a - b * reciprocal_gamma(1.0 - series_exponent(2.0, lambda))) <= 1e-10 * std::abs(a));
}

TEST_CASE("evaluation window and step-size errors") {
  const Potential pt = make_poschl_teller(1.0);
  CHECK_THROWS_AS(evaluate_outgoing(pt, 1.0, Side::plus, -41.0), DomainError);
  JostOptions strict;
  strict.rtol = 1e-30;
  strict.atol = 1e-32;
  CHECK_THROWS_AS(evaluate_outgoing(pt, 1.0, Side::plus, -3.0, strict), StepSizeUnderflow);
  const JostSolution solution(pt, 1.0, Side::plus, 0.0);
  CHECK_THROWS_AS(solution.profile(-1.0), DomainError);
}

TEST_CASE("horizon series matches the tail series and shooting") {
  const Potential rw = make_regge_wheeler(make_sds_geometry(1.0, 0.04), 2);
  JostOptions tail;
  tail.radial_series = false;
  for (Side side : {Side::plus, Side::minus}) {
    const double x = side == Side::plus ? -4.0 : 4.0;
    for (cplx lambda : {cplx(0.5, 0.0), cplx(0.38, -0.08), cplx(0.3, -0.75)}) {
      const JostValue a = evaluate_outgoing(rw, lambda, side, x);
      const JostValue b = evaluate_outgoing(rw, lambda, side, x, tail);
      CHECK(std::abs(a.u - b.u) <= 1e-7 * std::abs(b.u));
      CHECK(std::abs(a.du - b.du) <= 1e-7 * (std::abs(b.u) + std::abs(b.du)));
    }
  }
}

TEST_CASE("horizon series profile satisfies the ODE") {
  const Potential rw = make_regge_wheeler(make_sds_geometry(1.0, 0.04), 1);
  const cplx lambda(0.3, -0.4);
  for (Side side : {Side::plus, Side::minus}) {
    const double sigma = side_sign(side);
    const double M = JostSolution(rw, lambda, side, 0.0).match_point();
    const JostSolution solution(rw, lambda, side, M - sigma * 2.0);
    const double h = 1e-3;
    for (double x : {M - sigma * 1.0, M + sigma * 0.5, M + sigma * 3.0}) {
      const Profile p = solution.profile(x);
      const cplx second = (solution.profile(x + h).v - 2.0 * p.v + solution.profile(x - h).v) / (h * h);
      const cplx rhs = -2.0 * I * sigma * lambda * p.dv + rw(x) * p.v;
      CHECK(std::abs(second - rhs) <= 1e-5 * (std::abs(p.v) + std::abs(p.dv)));
    }
  }
}

TEST_CASE("extended precision recursion agrees where double is stable") {
  const SdSGeometry g = make_sds_geometry(1.0, 0.04);
  const RadialForm form{g, 2};
  for (Side side : {Side::plus, Side::minus}) {
    const cplx lambda(0.4, -0.1);
    const auto a = radial_series_coefficients(form, side, lambda, 200, Normalization::entire, false);
    const auto b = radial_series_coefficients(form, side, lambda, 200, Normalization::entire, true);
    for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(a[n] - b[n]) <= 1e-12 * max_abs(b));
  }
}

TEST_CASE("rounding growth of the horizon recursion") {
  const SdSGeometry g = make_sds_geometry(1.0, 0.04);
  CHECK(radial_rounding_growth(g, Side::plus, cplx(0.4, 0.5), 0.9) == 1.0);
  const double shallow = radial_rounding_growth(g, Side::plus, cplx(0.4, -0.5), 0.9);
  const double deep = radial_rounding_growth(g, Side::plus, cplx(0.4, -3.0), 0.9);
  CHECK(shallow > 1.0);
  CHECK(deep > shallow);
  CHECK(radial_series_radius(g, Side::minus) == doctest::Approx(g.r_minus));
}
