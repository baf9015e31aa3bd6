#pragma once

namespace twistl {

// K_{i r}(y) for real r and y > 0 (real-valued). Equispaced trapezoid on the
// integral representation K_{ir}(y) = int_0^inf exp(-y cosh t) cos(r t) dt;
// the integrand already decays doubly exponentially. Uniform for y >= 1e-3,
// |r| <= 100; absolute error <= 1e-10 * max(1, K).
double bessel_k_ir(double r, double y);

}  // namespace twistl
