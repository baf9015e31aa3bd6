#include "twistl/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "twistl/errors.hpp"
#include "twistl/types.hpp"

namespace twistl {

double bessel_k_ir(double r, double y) {
    if (!(y > 0.0)) throw DomainError("bessel_k_ir requires y > 0");
    if (std::abs(r) > 100.0) throw DomainError("bessel_k_ir: |r| > 100 unsupported");
    r = std::abs(r);
    // cutoff: exp(-y cosh T) below 1e-20 * exp(-y)
    double target = 20.0 * std::log(10.0) / y + 1.0;
    double T = std::acosh(std::max(1.0 + 1e-12, target));
    T = std::max(T, 1.0);
    // step resolves both the cosh growth and the cos(rt) oscillation
    double h = std::min(0.05, 1.0 / (4.0 * r + 8.0));
    auto n = static_cast<long>(std::ceil(T / h));
    KahanSum acc;
    // trapezoid with t=0 half weight; integrand vanishes at the far end
    acc.add(0.5 * std::exp(-y));
    for (long i = 1; i <= n; ++i) {
        double t = h * static_cast<double>(i);
        acc.add(std::exp(-y * std::cosh(t)) * std::cos(r * t));
    }
    return h * acc.value();
}

}  // namespace twistl
