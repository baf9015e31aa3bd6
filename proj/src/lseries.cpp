#include "twistl/lseries.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "twistl/cgamma.hpp"
#include "twistl/errors.hpp"
#include "twistl/quadrature.hpp"

namespace twistl {

int derivative_order_limit(const PrecisionConfig& cfg) {
    constexpr double kKappa = 3.0;
    int n = static_cast<int>(std::ceil(kKappa * (1.0 + cfg.gamma_prec) / cfg.eps));
    return std::clamp(n, 1, 12);
}

ParityRoute parity_route(const CuspForm& form, const DirichletCharacter& chi) {
    if (form.kind == FormKind::holomorphic) return ParityRoute::standard;
    return chi.parity() >= 0 ? ParityRoute::standard : ParityRoute::dx_variant;
}

double choose_c(std::int64_t q, double eps) {
    double x = std::pow(static_cast<double>(q), eps) * std::log(static_cast<double>(q));
    double num = std::ceil(2.0 * x + 1.0);
    return num / x;
}

double choose_c_at_least(std::int64_t q, double eps, double c_floor) {
    double x = std::pow(static_cast<double>(q), eps) * std::log(static_cast<double>(q));
    double num = std::max(std::ceil(2.0 * x + 1.0), std::ceil(c_floor * x));
    return num / x;
}

double tail_c_floor(std::int64_t q, double sigma_weight, double gamma_prec) {
    // discarded tail ~ int_U^inf u^sigma e^{-2 pi u} du relative to
    // Gamma(sigma+1)/(2 pi)^{sigma+1}; solve for U, then c = 2 + log_q U
    double logq = std::log(static_cast<double>(q));
    double target = (gamma_prec + 2.0) * std::log(10.0) +
                    std::lgamma(sigma_weight + 1.0) -
                    (sigma_weight + 1.0) * std::log(two_pi);
    double u = 1.0;
    for (int it = 0; it < 64; ++it) {
        double next = (target + sigma_weight * std::log(std::max(u, 1.0))) / two_pi;
        next = std::max(next, 0.5);
        if (std::abs(next - u) < 1e-9) {
            u = next;
            break;
        }
        u = next;
    }
    return 2.0 + std::log(std::max(u, 1.0)) / logq;
}

AssemblyConstants make_constants(const CuspForm& form, const DirichletCharacter& chi,
                                 ParityRoute route, const PrecisionConfig& cfg) {
    AssemblyConstants ac;
    const std::int64_t q = chi.modulus();
    const double qd = static_cast<double>(q);
    const cplx s = cfg.s;

    double sigma_weight = (form.kind == FormKind::holomorphic)
                              ? s.real() + (form.weight - 3.0) / 2.0 + 1.0
                              : s.real() + (route == ParityRoute::dx_variant ? 0.5 : -0.5) + 1.0;
    double cfloor = tail_c_floor(q, std::max(0.5, sigma_weight), cfg.gamma_prec);

    // cells must stay inside the Taylor convergence region of the flow
    double r_local = std::max(1.0, form.derivative_bound) + std::abs(s - 0.5);
    double cap = std::min(0.045, 0.9 / r_local);
    ac.eps_eff = std::max(cfg.eps, std::log(1.0 / cap) / std::log(qd));
    ac.c = choose_c_at_least(q, ac.eps_eff, cfloor);
    ac.cell = std::pow(qd, -ac.eps_eff);

    double endpoints = ac.c * std::pow(qd, ac.eps_eff) * std::log(qd);
    ac.grid_hi = std::llround(endpoints);
    ac.grid_lo = -ac.grid_hi;

    ac.n_prime = derivative_order_limit(cfg);
    ac.d_weights.resize(ac.n_prime + 1);
    double fact = 1.0;
    for (int l = 0; l <= ac.n_prime; ++l) {
        fact *= (l + 1);
        ac.d_weights[l] = std::pow(ac.cell, l + 1) / fact;
    }

    ac.c_prime = std::pow(qd, ac.c * std::abs(s.real() - 0.5));

    cplx tau = gauss_sum(conjugate(chi));
    if (form.kind == FormKind::holomorphic) {
        cplx a = s + (form.weight - 1.0) / 2.0;
        ac.inv_constant = std::pow(cplx(two_pi), a) / (complex_gamma(a) * tau);
    } else if (route == ParityRoute::standard) {
        // sum_k chibar(k) f(k/q+iy): Mellin pair gives
        // (1+chi(-1)) pi^{-s}/4 GG(s +- ir) L; invert with parity factor 2
        cplx g1 = complex_gamma((s + cplx(0, form.spectral_r)) / 2.0);
        cplx g2 = complex_gamma((s - cplx(0, form.spectral_r)) / 2.0);
        ac.inv_constant = 2.0 * std::pow(cplx(pi), s) / (g1 * g2 * tau);
    } else {
        // d/dx route: i (1-chi(-1)) pi^{-s}/2 GG(s+1 +- ir) L, parity factor 2
        cplx g1 = complex_gamma((s + 1.0 + cplx(0, form.spectral_r)) / 2.0);
        cplx g2 = complex_gamma((s + 1.0 - cplx(0, form.spectral_r)) / 2.0);
        ac.inv_constant = std::pow(cplx(pi), s) / (cplx(0, 1) * g1 * g2 * tau);
    }
    ac.c_doubleprime = ac.c_prime * ac.inv_constant;
    return ac;
}

cplx discretized_integral(const AssemblyConstants& consts, const PrecisionConfig& cfg,
                          const std::function<cplx(double, int)>& provider) {
    const cplx sh = cfg.s - 0.5;
    const int np = consts.n_prime;
    // binomials up to n_prime
    std::vector<std::vector<double>> binom(np + 1, std::vector<double>(np + 1, 0.0));
    for (int n = 0; n <= np; ++n) {
        binom[n][0] = 1.0;
        for (int m = 1; m <= n; ++m)
            binom[n][m] = binom[n - 1][m - 1] + (m <= n - 1 ? binom[n - 1][m] : 0.0);
    }
    KahanSumC total;
    for (std::int64_t x = consts.grid_lo; x < consts.grid_hi; ++x) {
        double t = static_cast<double>(x) * consts.cell;
        cplx ephase = std::exp(t * sh);
        std::vector<cplx> sums(np + 1);
        for (int m = 0; m <= np; ++m) sums[m] = provider(t, m);
        // d^l/dt^l [S(t) e^{t sh}] = e^{t sh} sum_m C(l,m) sh^{l-m} S_m(t)
        KahanSumC cell_acc;
        for (int l = 0; l <= np; ++l) {
            cplx inner = 0.0;
            cplx shp = 1.0;
            // m = l down to 0 so sh powers accumulate upward
            for (int m = l; m >= 0; --m) {
                inner += binom[l][m] * shp * sums[m];
                shp *= sh;
            }
            cell_acc.add(consts.d_weights[l] * ephase * inner);
        }
        total.add(cell_acc.value());
    }
    return total.value();
}

cplx quadrature_integral(const AssemblyConstants& consts, const PrecisionConfig& cfg,
                         const std::function<cplx(double, int)>& provider, double panel_width) {
    const cplx sh = cfg.s - 0.5;
    double a = static_cast<double>(consts.grid_lo) * consts.cell;
    double b = static_cast<double>(consts.grid_hi) * consts.cell;
    return panel_integrate(
        [&](double t) { return provider(t, 0) * std::exp(t * sh); }, a, b, panel_width, 16);
}

namespace {

bool split_valid(std::int64_t q, std::int64_t M, std::int64_t N) {
    if (M * N != q || M > N) return false;
    std::int64_t M1 = 1;
    for (auto& [p, e] : factorize(M))
        if (N % p == 0) {
            std::int64_t pe = 1;
            for (int i = 0; i < e; ++i) pe *= p;
            M1 *= pe;
        }
    std::int64_t M2 = M / M1;
    return gcd64(M2, N) == 1 && (M1 == 1 || N % M1 == 0);
}

}  // namespace

std::pair<std::int64_t, std::int64_t> auto_split(std::int64_t q) {
    std::int64_t best_m = 1;
    double best_cost = std::pow(1.0, 5) + static_cast<double>(q);
    for (std::int64_t m = 1; m * m <= q; ++m) {
        if (q % m != 0) continue;
        if (!split_valid(q, m, q / m)) continue;
        double cost = std::pow(static_cast<double>(m), 5) + static_cast<double>(q / m);
        if (cost < best_cost) {
            best_cost = cost;
            best_m = m;
        }
    }
    return {best_m, q / best_m};
}

std::pair<std::int64_t, std::int64_t> split_near_sixth_root(std::int64_t q) {
    double target = std::pow(static_cast<double>(q), 1.0 / 6.0);
    std::int64_t best_m = 1;
    double best_dist = std::abs(1.0 - target);
    for (std::int64_t m = 1; m * m <= q; ++m) {
        if (q % m != 0) continue;
        if (!split_valid(q, m, q / m)) continue;
        double dist = std::abs(static_cast<double>(m) - target);
        if (dist < best_dist) {
            best_dist = dist;
            best_m = m;
        }
    }
    return {best_m, q / best_m};
}

LValue assemble_L(const CuspForm& form, const DirichletCharacter& chi,
                  const PrecisionConfig& cfg, const AssembleOptions& opts,
                  EvalCounter* counter) {
    if (!chi.primitive()) throw NonPrimitiveCharacter("assemble_L requires primitive chi");
    const std::int64_t q = chi.modulus();
    LValue out;
    out.route = parity_route(form, chi);
    out.consts = make_constants(form, chi, out.route, cfg);
    bool dx = out.route == ParityRoute::dx_variant;

    DirichletCharacter chibar = conjugate(chi);
    EvalConfig ecfg;
    ecfg.target_abs_error = 1e-15;

    std::function<cplx(double, int)> provider;
    CharacterSplit split;
    std::unique_ptr<FastEngine> engine;
    if (opts.engine == Engine::fast) {
        auto [M, N] = (opts.split_M > 0) ? std::make_pair(opts.split_M, opts.split_N)
                                         : auto_split(q);
        split = split_character(chibar, M, N);
        double orbit_gamma = opts.orbit_gamma > 0 ? opts.orbit_gamma
                                                  : std::max(8.0, cfg.gamma_prec + 3.0);
        engine = std::make_unique<FastEngine>(form, split, cfg.eps, orbit_gamma, ecfg);
        engine->set_threads(opts.threads);
        provider = [&, dx](double t, int l) {
            return engine->run(t, l, dx, counter).value;
        };
    } else {
        provider = [&, dx, q](double t, int l) {
            return naive_orbit_sum(form, chibar, q, t, l, ecfg, counter, dx);
        };
    }

    cplx bracket = opts.use_gl_quadrature ? quadrature_integral(out.consts, cfg, provider)
                                          : discretized_integral(out.consts, cfg, provider);
    out.value = out.consts.inv_constant * bracket;

    // error estimate: discarded tails + cell truncation + transfer residuals
    double rel = std::pow(10.0, -(cfg.gamma_prec + 2.0)) + std::pow(10.0, -cfg.gamma_prec) * 0.1;
    out.err_estimate = (std::abs(out.value) + std::abs(out.consts.inv_constant) * 1e-12) * rel;
    return out;
}

}  // namespace twistl
