#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnmtrace/special_functions.hpp"

namespace qnmtrace {

enum class Side { plus, minus };

/// Sign of x on the given side: +1 for plus, -1 for minus.
constexpr double side_sign(Side side) { return side == Side::plus ? 1.0 : -1.0; }

/// Convergent expansion V(x) = Σ_{j≥1} V_j w^j with w = exp(∓A x) at ±∞.
struct AsymptoticTail {
  Side side = Side::plus;
  double decay_rate = 2.0;
  std::vector<double> coefficients;  ///< V_1, V_2, ...
  double fit_radius = 1.0;           ///< radius in w inside which the expansion converges
  double match_point = 0.0;          ///< series used for x >= M (plus) or x <= M (minus)
  double growth_constant = 0.0;      ///< A_c with |V_j| <= A_c^j
  double residual = 0.0;             ///< max relative deviation from the evaluator beyond M

  double w(double x) const;
  cplx w(cplx x) const;
  double evaluate(double x) const;
  bool in_series_region(double x) const;
};

/// Regge–Wheeler data that lets the profile equation be written with polynomial
/// coefficients in r and expanded around either horizon.
struct RadialForm;

struct Potential {
  std::string name;
  std::function<double(double)> value;
  AsymptoticTail plus;
  AsymptoticTail minus;
  std::shared_ptr<const RadialForm> radial;  ///< null unless the potential comes from SdS

  double operator()(double x) const { return value(x); }
  const AsymptoticTail& tail(Side side) const { return side == Side::plus ? plus : minus; }
};

/// Schwarzschild–de Sitter metric function G(r) = 1 - 2m/r - Λr²/3 and its horizons.
struct SdSGeometry {
  double mass = 1.0;
  double cosmological_constant = 0.04;
  double r_minus = 0.0;  ///< event horizon
  double r_plus = 0.0;   ///< cosmological horizon
  double r_third = 0.0;  ///< negative root of r G(r)
  double A_minus = 0.0;  ///< |G'(r_minus)|
  double A_plus = 0.0;   ///< |G'(r_plus)|
  double r0 = 0.0;       ///< tortoise origin

  double G(double r) const;
  double dG(double r) const;
  cplx G(cplx r) const;
  cplx dG(cplx r) const;
  /// 1/G'(r_i) for the roots r_minus, r_plus, r_third: 1/G = Σ c_i / (r - r_i).
  double residue_minus() const { return 1.0 / A_minus; }
  double residue_plus() const { return -1.0 / A_plus; }
  double residue_third() const;
  double tortoise_offset() const;
};

struct RadialForm {
  SdSGeometry geometry;
  int ell = 0;
};

/// A radius together with its distances to both horizons, kept separately so
/// that points exponentially close to a horizon keep full relative precision.
struct RadialPoint {
  double r;
  double to_minus;  ///< r - r_minus
  double to_plus;   ///< r_plus - r
};

Potential make_poschl_teller(double ell);
/// V = strength / cosh²x. Negative strengths give bound states.
Potential make_scaled_sech2(double strength);
/// V ≡ 0 with formal tails of rate A.
Potential make_zero_potential(double decay_rate = 2.0);

SdSGeometry make_sds_geometry(double mass, double cosmological_constant,
                              std::optional<double> r0 = std::nullopt);

double tortoise(const SdSGeometry& geom, double r);
double radius_from_tortoise(const SdSGeometry& geom, double x);
RadialPoint radial_point_from_tortoise(const SdSGeometry& geom, double x);

/// Regge–Wheeler potential as a function of the radial point.
double regge_wheeler_value(const SdSGeometry& geom, int ell, const RadialPoint& p);

enum class TailMethod { contour, least_squares };

struct ReggeWheelerOptions {
  TailMethod tail_method = TailMethod::contour;
  int contour_points = 512;
  int tail_terms = 96;
  int least_squares_terms = 8;
};

Potential make_regge_wheeler(const SdSGeometry& geom, int ell, const ReggeWheelerOptions& options = {});

struct TailFit {
  std::vector<double> coefficients;
  double residual;
};

/// Least-squares fit of V(x_k) ≈ Σ_{j=1}^{J} V_j w_k^j, rows weighted by 1/|V(x_k)|.
TailFit fit_tail_coefficients(const std::function<double(double)>& evaluator, Side side,
                              double decay_rate, int terms, std::span<const double> grid);

/// 40 equally spaced points x in [0.3 x_max, x_max] (mirrored for minus) with w <= 0.05.
std::vector<double> default_fit_grid(Side side, double decay_rate, int points = 40);

/// Taylor coefficients of V in w for the Regge–Wheeler tail, by the trapezoid rule
/// on the circle |w| = radius traced in the complex r plane.
std::vector<double> contour_tail_coefficients(const SdSGeometry& geom, int ell, Side side,
                                              double radius, int points, int terms);

/// Radius in w of the largest disc on which the Regge–Wheeler tail is holomorphic.
double regge_wheeler_tail_radius(const SdSGeometry& geom, Side side);

/// Smallest |x| beyond which the tail series matches the evaluator to rel_tol,
/// restricted to |w| <= 0.6 fit_radius. Also fills tail.residual.
void locate_match_point(const std::function<double(double)>& evaluator, AsymptoticTail& tail,
                        double rel_tol = 1e-9, double x_limit = 40.0);

double growth_constant(std::span<const double> coefficients);

}  // namespace qnmtrace
