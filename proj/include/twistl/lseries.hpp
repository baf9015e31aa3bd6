#pragma once

#include <functional>
#include <vector>

#include "twistl/counters.hpp"
#include "twistl/dirichlet.hpp"
#include "twistl/modform.hpp"
#include "twistl/orbitsum.hpp"

namespace twistl {

struct PrecisionConfig {
    double gamma_prec = 4.0;  // target error ~ q^{-gamma}
    double eps = 0.45;        // in (0, 1/2]
    cplx s{0.5, 0.0};
};

// N' = min(12, ceil(kappa (1+gamma)/eps)) with kappa = 3.
int derivative_order_limit(const PrecisionConfig& cfg);

enum class ParityRoute { standard, dx_variant, zero };

// holomorphic -> standard; even Maass: chi(-1)=+1 -> standard, -1 -> the
// d/dx pipeline (the plain character sum cancels identically).
ParityRoute parity_route(const CuspForm& form, const DirichletCharacter& chi);

// smallest c with margin >= one grid cell beyond exponent 2 and c*q^eps*log q
// integral: c = ceil(2 q^eps log q + 1) / (q^eps log q)
double choose_c(std::int64_t q, double eps);

// same grid-integrality with c >= c_floor
double choose_c_at_least(std::int64_t q, double eps, double c_floor);

// smallest c making the discarded Mellin tails <= 10^{-gamma-2} relative at
// this q (the c > 2 guarantee is asymptotic; at desk scale the constant
// matters)
double tail_c_floor(std::int64_t q, double sigma_weight, double gamma_prec);

struct AssemblyConstants {
    double c = 0.0;
    double eps_eff = 0.0;   // cell = q^{-eps_eff}; eps raised so cells stay
                            // inside the Taylor convergence region when R > 1
    double cell = 0.0;
    std::int64_t grid_lo = 0, grid_hi = 0;  // x in [grid_lo, grid_hi)
    std::vector<double> d_weights;           // d_l = cell^{l+1}/(l+1)!
    int n_prime = 0;
    double c_prime = 0.0;   // sup |e^{t(s-1/2)}| = q^{c |Re(s-1/2)|}
    cplx c_doubleprime{0.0, 0.0};  // C'' = C' (2pi)^{s+(k-1)/2} / (Gamma(...) tau)
    cplx inv_constant{0.0, 0.0};   // L = inv_constant * bracket
};

AssemblyConstants make_constants(const CuspForm& form, const DirichletCharacter& chi,
                                 ParityRoute route, const PrecisionConfig& cfg);

// The grid/Taylor discretization of sum_j chibar(j) int f~(n(j/q)a(t))
// e^{t(s-1/2)} dt. provider(t, l) = sum_j chibar(j) d2^l f~(n(j/q)a(t))
// (the d1 variant under dx_variant); the Leibniz expansion folds the
// exponential factor into binomial weights so only pure lift-derivative
// orders are requested.
cplx discretized_integral(const AssemblyConstants& consts, const PrecisionConfig& cfg,
                          const std::function<cplx(double, int)>& provider);

// cross-validation path: Gauss-Legendre panels over the same window, l = 0 only
cplx quadrature_integral(const AssemblyConstants& consts, const PrecisionConfig& cfg,
                         const std::function<cplx(double, int)>& provider,
                         double panel_width = 0.35);

enum class Engine { fast, naive };

struct LValue {
    cplx value;
    double err_estimate = 0.0;
    ParityRoute route = ParityRoute::standard;
    AssemblyConstants consts;
};

struct AssembleOptions {
    Engine engine = Engine::fast;
    std::int64_t split_M = 0, split_N = 0;  // 0: auto
    bool use_gl_quadrature = false;
    int threads = 0;
    double orbit_gamma = 0.0;  // 0: max(8, gamma_prec + 3)
};

// L(s, f x chi) for primitive chi. The engine sums are weighted by the
// conjugate character (orthogonality gives sum_k chibar(k) e(nk/q) =
// chi(n) tau(chibar)), and the inversion constant divides by tau(chibar).
LValue assemble_L(const CuspForm& form, const DirichletCharacter& chi,
                  const PrecisionConfig& cfg, const AssembleOptions& opts = {},
                  EvalCounter* counter = nullptr);

// divisor pair q = M*N minimizing M^5 + N subject to M <= N, M1 | N,
// gcd(M2,N) = 1
std::pair<std::int64_t, std::int64_t> auto_split(std::int64_t q);

// divisor of q nearest q^{1/6} (valid splits only)
std::pair<std::int64_t, std::int64_t> split_near_sixth_root(std::int64_t q);

}  // namespace twistl
