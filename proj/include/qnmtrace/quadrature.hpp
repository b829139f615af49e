#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qnmtrace {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1].
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double weight = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = weight;
    rule.weights[n - 1 - i] = weight;
  }
  return rule;
}

/// Integral of f over [a, b] with a fixed rule.
template <class F>
auto integrate(const F& f, double a, double b, const QuadratureRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  decltype(f(a)) sum{};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  }
  return sum * half;
}

/// Recursive bisection comparing one panel against its two halves. A panel is
/// accepted when the difference is below its share of `abs_tol` or below
/// `rel_tol` times the panel value, which keeps noisy integrands from recursing
/// to `max_depth`.
template <class F>
auto integrate_adaptive(const F& f, double a, double b, double abs_tol, int max_depth = 30, double rel_tol = 1e-13) {
  static const QuadratureRule rule = gauss_legendre(10);
  auto recurse = [&](auto&& self, double lo, double hi, decltype(f(a)) whole, double tol,
                     int depth) -> decltype(f(a)) {
    const double mid = 0.5 * (lo + hi);
    const auto left = integrate(f, lo, mid, rule);
    const auto right = integrate(f, mid, hi, rule);
    const auto refined = left + right;
    const double error = std::abs(refined - whole);
    if (depth >= max_depth || error <= tol || error <= rel_tol * std::abs(refined)) return refined;
    return self(self, lo, mid, left, 0.5 * tol, depth + 1) +
           self(self, mid, hi, right, 0.5 * tol, depth + 1);
  };
  return recurse(recurse, a, b, integrate(f, a, b, rule), abs_tol, 0);
}

}  // namespace qnmtrace
