#pragma once

#include <span>

#include "nlsepdf/grid.hpp"

namespace nlsepdf {

// Truncated frequency convolutions on an M-mode window. Every output mode k
// sums only index combinations that stay inside [0, M); products are formed
// on a zero-padded time grid long enough that no alias reaches the window.
// No delta factors are applied here.

/// out_k = sum_{j1 + j2 - j3 = k} a_{j1} b_{j2} conj(c_{j3})
cvec trilinear(std::span<const cplx> a, std::span<const cplx> b, std::span<const cplx> c);

/// Same as trilinear(a, a, a), one forward transform.
cvec cubic(std::span<const cplx> a);

/// out_k = sum_{j1 + j2 + j3 - j4 - j5 = k} a a a conj(a) conj(a)
cvec quintic(std::span<const cplx> a);

}  // namespace nlsepdf
