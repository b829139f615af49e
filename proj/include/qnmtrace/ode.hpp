#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "qnmtrace/errors.hpp"

namespace qnmtrace {

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.05;
  double max_step = 0.5;
  long max_steps = 1'000'000;
};

/// Accepted-step record for a second-order system written as y = (q, q').
template <class Scalar>
struct HermiteNode {
  double x;
  Scalar q, dq, ddq;
};

/// Piecewise quintic Hermite interpolant of q built from (q, q', q'') at the nodes.
template <class Scalar>
class HermiteTrajectory {
 public:
  void push_back(const HermiteNode<Scalar>& node) { nodes_.push_back(node); }
  bool empty() const { return nodes_.empty(); }
  double front_x() const { return nodes_.front().x; }
  double back_x() const { return nodes_.back().x; }
  std::size_t size() const { return nodes_.size(); }

  bool covers(double x) const {
    if (nodes_.empty()) return false;
    const double a = front_x();
    const double b = back_x();
    return x >= std::min(a, b) && x <= std::max(a, b);
  }

  /// (q(x), q'(x)).
  std::pair<Scalar, Scalar> operator()(double x) const {
    const bool ascending = back_x() >= front_x();
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x, [&](const HermiteNode<Scalar>& n, double v) {
      return ascending ? n.x < v : n.x > v;
    });
    if (it == nodes_.begin()) ++it;
    if (it == nodes_.end()) --it;
    const HermiteNode<Scalar>& a = *(it - 1);
    const HermiteNode<Scalar>& b = *it;
    const double h = b.x - a.x;
    const double s = (x - a.x) / h;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    const double h3 = 0.5 * (s3 - 2 * s4 + s5);
    const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double h5 = 10 * s3 - 15 * s4 + 6 * s5;
    const double d0 = -30 * s2 + 60 * s3 - 30 * s4;
    const double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    const double d2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    const double d3 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
    const double d4 = -12 * s2 + 28 * s3 - 15 * s4;
    const double d5 = 30 * s2 - 60 * s3 + 30 * s4;
    const Scalar q = a.q * h0 + a.dq * (h * h1) + a.ddq * (h * h * h2) + b.ddq * (h * h * h3) +
                     b.dq * (h * h4) + b.q * h5;
    const Scalar dq = (a.q * d0 + b.q * d5) / h + a.dq * d1 + b.dq * d4 + (a.ddq * d2 + b.ddq * d3) * h;
    return {q, dq};
  }

 private:
  std::vector<HermiteNode<Scalar>> nodes_;
};

/// Dormand–Prince 5(4) with FSAL and max-norm error control. `on_accept(x, y, f)`
/// is called at the start point and after every accepted step.
template <class Scalar, int Dim, class Rhs, class OnAccept>
Eigen::Matrix<Scalar, Dim, 1> integrate_dopri5(const Rhs& rhs, double x0,
                                               Eigen::Matrix<Scalar, Dim, 1> y, double x1,
                                               const StepControl& control, OnAccept&& on_accept) {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double direction = x1 >= x0 ? 1.0 : -1.0;
  double x = x0;
  State k1 = rhs(x, y);
  on_accept(x, y, k1);
  if (x0 == x1) return y;
  double h = direction * std::min(control.initial_step, std::abs(x1 - x0));
  for (long step = 0; step < control.max_steps; ++step) {
    if (std::abs(h) < 1e-12 * std::max(1.0, std::abs(x))) {
      throw StepSizeUnderflow("ODE step size underflow near x = " + std::to_string(x) +
                              "; raise the tolerance or lower |λ|");
    }
    bool last = false;
    if (direction * (x + h - x1) >= 0.0) {
      h = x1 - x;
      last = true;
    }
    const State k2 = rhs(x + c2 * h, y + h * (a21 * k1));
    const State k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = rhs(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(x + h, y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double scale = control.atol + control.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      norm = std::max(norm, std::abs(err[i]) / scale);
    }
    if (norm <= 1.0) {
      x = last ? x1 : x + h;
      y = y_new;
      k1 = k7;
      on_accept(x, y, k1);
      if (last) return y;
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h = direction * std::min(std::abs(h) * (norm <= 1.0 ? factor : std::min(factor, 1.0)),
                             control.max_step);
  }
  throw ConvergenceError("ODE integration exceeded the maximum number of steps");
}

}  // namespace qnmtrace
