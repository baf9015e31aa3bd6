#pragma once

#include "twistl/types.hpp"

namespace twistl {

// Lanczos approximation, ~1e-13 relative on the strips used here.
// Throws GammaPole within 1e-8 of a pole.
cplx complex_gamma(cplx z);

cplx complex_log_gamma(cplx z);

}  // namespace twistl
