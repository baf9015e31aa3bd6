#pragma once

#include <functional>
#include <vector>

#include "twistl/types.hpp"

namespace twistl {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1,1)
    std::vector<double> weights;
};

// Nodes/weights by Newton iteration on Legendre polynomials; cached per n.
const GaussLegendreRule& gauss_legendre(int n);

// Fixed-panel composite Gauss-Legendre.
cplx panel_integrate(const std::function<cplx(double)>& f, double a, double b,
                     double max_panel_width, int n = 16);

// Adaptive bisection, Gauss-Kronrod style error estimate from embedded
// low/high order rules. Throws QuadratureFailure if depth is exhausted.
cplx adaptive_integrate(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

}  // namespace twistl
