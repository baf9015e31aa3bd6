#include "twistl/cgamma.hpp"

#include <cmath>

#include "twistl/errors.hpp"

namespace twistl {

namespace {

// g = 7, n = 9 coefficients (Godfrey / Numerical Recipes set).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

cplx lanczos_positive(cplx z) {
    // valid for Re z > 0.5; argument shifted so z >= 1 effective
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    cplx t = z + kLanczosG + 0.5;
    return std::sqrt(two_pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

}  // namespace

cplx complex_gamma(cplx z) {
    if (z.imag() == 0.0) {
        double zr = z.real();
        if (zr <= 0.0 && std::abs(zr - std::nearbyint(zr)) < 1e-8)
            throw GammaPole("gamma evaluated at a pole");
    }
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        cplx s = std::sin(pi * z);
        if (std::abs(s) < 1e-14) throw GammaPole("gamma reflection near pole");
        return pi / (s * lanczos_positive(1.0 - z));
    }
    return lanczos_positive(z);
}

cplx complex_log_gamma(cplx z) { return std::log(complex_gamma(z)); }

}  // namespace twistl
