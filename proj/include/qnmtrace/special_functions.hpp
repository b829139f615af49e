#pragma once

#include <complex>

namespace qnmtrace {

using cplx = std::complex<double>;

/// Principal-branch-free logarithm of 1/Γ(z). The imaginary part is only
/// meaningful modulo 2π. Returns -inf real part at the zeros z = 0, -1, ...
cplx log_reciprocal_gamma(cplx z);

/// 1/Γ(z). Entire, exactly zero at nonpositive integers.
/// Throws DomainError if the value overflows a double.
cplx reciprocal_gamma(cplx z);

/// Γ'(z)/Γ(z). Throws PoleError within 1e-12 of a nonpositive integer.
cplx digamma(cplx z);

}  // namespace qnmtrace
