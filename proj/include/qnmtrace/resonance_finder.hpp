#pragma once

#include <optional>
#include <vector>

#include "qnmtrace/scattering.hpp"

namespace qnmtrace {

struct SearchRegion {
  double re_min;
  double re_max;
  double im_min;
  double im_max;

  cplx center() const { return {(re_min + re_max) / 2, (im_min + im_max) / 2}; }
  double diameter() const { return std::hypot(re_max - re_min, im_max - im_min); }
  bool contains(cplx z, double margin = 0.0) const {
    return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
           z.imag() <= im_max + margin;
  }
};

enum class ZeroKind { resonance, bound_state, spurious };

const char* to_string(ZeroKind kind);

struct ZeroResult {
  cplx lambda;
  int multiplicity = 1;
  double newton_residual = 0.0;  ///< |F| at the refined point
  ZeroKind classification = ZeroKind::resonance;
  SearchRegion box{};
  std::optional<cplx> energy;       ///< λ², set for bound states
  bool near_false_pole = false;     ///< within 1e-6 of a point -iA(k+1)/2 where v_0 = 0
};

struct FinderOptions {
  ScatteringOptions scattering;
  int initial_samples = 64;  ///< per edge
  int max_samples = 4096;
  int max_nudges = 5;
  double boundary_tol = 1e-10;  ///< relative to the Wronskian term scale
  int max_depth = 40;
  double cluster_size = 1e-3;   ///< boxes below cluster_size·(1+|λ|) with winding > 1 are clusters
  int max_newton = 60;
};

struct WindingResult {
  int winding;
  SearchRegion region;        ///< after nudging
  double median_abs;          ///< median |F| over the boundary samples
};

/// Winding number of F around the boundary of `region`, nudging edges outward when F
/// nearly vanishes on them. Throws BoundaryZeroError when nudging does not help.
WindingResult winding_number(const Potential& pot, const SearchRegion& region, const FinderOptions& options = {});

int count_zeros(const Potential& pot, const SearchRegion& region, const FinderOptions& options = {});

/// All zeros of F in `region` with |Δλ| < tol, sorted by (Re, Im) and classified.
std::vector<ZeroResult> find_zeros(const Potential& pot, const SearchRegion& region, double tol,
                                   const FinderOptions& options = {});

ZeroResult classify_zero(const Potential& pot, ZeroResult zero, const FinderOptions& options = {});

}  // namespace qnmtrace
