#include "qnmtrace/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qnmtrace/errors.hpp"

namespace qnmtrace {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Γ(z) for Re z >= 1/2.
cplx log_gamma_lanczos(cplx z) {
  z -= 1.0;
  cplx sum = lanczos_coefficients[0];
  for (std::size_t k = 1; k < lanczos_coefficients.size(); ++k) {
    sum += lanczos_coefficients[k] / (z + static_cast<double>(k));
  }
  const cplx t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

// Splits z = n + r with n the nearest integer to Re z.
struct Reduced {
  double n;
  cplx r;
};

Reduced reduce(cplx z) {
  const double n = std::round(z.real());
  return {n, z - n};
}

bool is_odd(double n) { return std::fmod(std::abs(n), 2.0) == 1.0; }

// log sin(πz), modulo 2πi; the real part is -inf at the integers.
cplx log_sin_pi(cplx z) {
  const auto [n, r] = reduce(z);
  const cplx parity = is_odd(n) ? cplx(0.0, pi) : cplx(0.0);
  const cplx i(0.0, 1.0);
  if (std::abs(r.imag()) < 15.0) {
    return std::log(std::sin(pi * r)) + parity;
  }
  if (r.imag() > 0.0) {
    return std::log(0.5 * i) - i * pi * r + std::log(1.0 - std::exp(2.0 * i * pi * r)) + parity;
  }
  return std::log(-0.5 * i) + i * pi * r + std::log(1.0 - std::exp(-2.0 * i * pi * r)) + parity;
}

cplx cot_pi(cplx z) {
  const cplx r = reduce(z).r;
  const cplx i(0.0, 1.0);
  if (std::abs(r.imag()) < 15.0) {
    return std::cos(pi * r) / std::sin(pi * r);
  }
  if (r.imag() > 0.0) {
    const cplx q = std::exp(2.0 * i * pi * r);
    return i * (q + 1.0) / (q - 1.0);
  }
  const cplx q = std::exp(-2.0 * i * pi * r);
  return i * (1.0 + q) / (1.0 - q);
}

bool at_nonpositive_integer(cplx z, double tol) {
  const auto [n, r] = reduce(z);
  return n <= 0.0 && std::abs(r) <= tol;
}

}  // namespace

cplx log_reciprocal_gamma(cplx z) {
  if (z.real() >= 0.5) {
    return -log_gamma_lanczos(z);
  }
  if (at_nonpositive_integer(z, 1e-300)) {
    return {-std::numeric_limits<double>::infinity(), 0.0};
  }
  return log_sin_pi(z) - std::log(pi) + log_gamma_lanczos(1.0 - z);
}

cplx reciprocal_gamma(cplx z) {
  if (z.real() < 0.5 && at_nonpositive_integer(z, 1e-300)) {
    return 0.0;
  }
  if (z.imag() == 0.0 && z.real() >= 1.0 && z.real() <= 20.0 && z.real() == std::round(z.real())) {
    double factorial = 1.0;
    for (double k = 2.0; k < z.real(); k += 1.0) factorial *= k;
    return 1.0 / factorial;
  }
  const cplx log_value = log_reciprocal_gamma(z);
  if (log_value.real() > std::log(std::numeric_limits<double>::max())) {
    throw DomainError("reciprocal_gamma: value overflows a double");
  }
  return std::exp(log_value);
}

cplx digamma(cplx z) {
  if (at_nonpositive_integer(z, 1e-12)) {
    throw PoleError("digamma: pole at a nonpositive integer");
  }
  if (z.real() < 0.5) {
    return digamma(1.0 - z) - pi * cot_pi(z);
  }
  cplx shift = 0.0;
  while (std::abs(z) <= 10.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  // ψ(z) ~ log z - 1/(2z) - Σ B_2k / (2k z^2k)
  constexpr std::array<double, 8> bernoulli_terms = {
      1.0 / 12.0,  -1.0 / 120.0,       1.0 / 252.0, -1.0 / 240.0,
      1.0 / 132.0, -691.0 / 32760.0,   1.0 / 12.0,  -3617.0 / 8160.0};
  const cplx inv_z2 = 1.0 / (z * z);
  cplx series = 0.0;
  for (auto it = bernoulli_terms.rbegin(); it != bernoulli_terms.rend(); ++it) {
    series = (series + *it) * inv_z2;
  }
  return std::log(z) - 0.5 / z - series + shift;
}

}  // namespace qnmtrace
