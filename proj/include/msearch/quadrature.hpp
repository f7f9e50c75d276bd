#pragma once

#include "msearch/bigfloat.hpp"

namespace msearch {

struct QuadratureResult {
  BigFloat value;
  BigFloat error_estimate;
};

/// J_{k1,k2,k3} = int_0^1 x^{k1-3/2} (1-x)^{k2-3/2} [x ln x + (1-x) ln(1-x)]^{k3} dx.
///
/// Evaluated after the substitution x = sin^2(theta), which turns the
/// integrand into 2 sin^{2k1-2} cos^{2k2-2} B^{k3}. The theta range is split
/// at pi/4 and each half is covered by a geometric mesh toward its outer
/// endpoint, integrated with adaptive Gauss-Kronrod (21 points) in long
/// double. Throws InvalidArgument for non-integrable triples
/// (k1 = k3 = 0 or k2 = k3 = 0) and NumericalError if the tolerance is missed.
QuadratureResult J_integral(int k1, int k2, int k3, double tolerance = 1e-15);

}  // namespace msearch
