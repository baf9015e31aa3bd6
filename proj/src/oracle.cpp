#include "twistl/oracle.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "twistl/errors.hpp"
#include "twistl/quadrature.hpp"

namespace twistl {

LValue direct_integral_L(const CuspForm& form, const DirichletCharacter& chi, cplx s,
                         double gamma_prec, EvalCounter* counter) {
    const std::int64_t q = chi.modulus();
    if (q > 100000) throw TooLarge("direct integral oracle guarded to q <= 1e5");
    if (!chi.primitive()) throw NonPrimitiveCharacter("oracle requires primitive chi");
    PrecisionConfig cfg;
    cfg.s = s;
    cfg.gamma_prec = gamma_prec;
    LValue out;
    out.route = parity_route(form, chi);
    out.consts = make_constants(form, chi, out.route, cfg);
    bool dx = out.route == ParityRoute::dx_variant;

    DirichletCharacter chibar = conjugate(chi);
    EvalConfig ecfg;
    ecfg.target_abs_error = 1e-15;

    // its own window, slightly wider than the assembly's
    double tmax = (out.consts.c + 0.25) * std::log(static_cast<double>(q));
    const cplx sh = s - 0.5;
    KahanSumC acc;
    MultiIndex dx_beta{1, 0, 0};
    for (std::int64_t j = 0; j < q; ++j) {
        cplx w = chibar.eval(j, counter);
        if (w == cplx(0.0)) continue;
        Mat2 nj = sl2::translation(static_cast<double>(j) / static_cast<double>(q));
        auto integrand = [&](double t) -> cplx {
            Mat2 g = nj * sl2::dilation(t);
            cplx val;
            if (!dx) {
                val = lift_eval(form, g, ecfg, counter);
            } else {
                FlowEvalCache cache(form, g, ecfg.fd_step, ecfg, counter);
                val = word_derivative(cache, dx_beta, 0, false, counter);
            }
            return val * std::exp(t * sh);
        };
        cplx integral = adaptive_integrate(integrand, -tmax, tmax,
                                           std::pow(10.0, -(gamma_prec + 4.0)));
        acc.add(w * integral);
    }
    out.value = out.consts.inv_constant * acc.value();
    out.err_estimate = std::abs(out.value) * std::pow(10.0, -gamma_prec);
    return out;
}

cplx eval_near_cusp(const CuspForm& form, std::int64_t q, std::int64_t n, double y,
                    const EvalConfig& cfg) {
    n = mod_pos(n, q);
    if (gcd64(n, q) != 1) throw DomainError("n must be coprime to q");
    std::int64_t np = mod_inverse(n, q);
    // f(n/q + iy) = (-q i y)^{-k} f(-n'/q + i/(q^2 y))
    cplx zr(-static_cast<double>(np) / static_cast<double>(q),
            1.0 / (static_cast<double>(q) * static_cast<double>(q) * y));
    cplx base = eval_point(form, zr, cfg);
    cplx factor = std::pow(cplx(0.0, -static_cast<double>(q) * y),
                           -static_cast<double>(form.weight));
    return factor * base;
}

double truncation_check(const CuspForm& form, std::int64_t q, double c1, double c2,
                        int max_samples) {
    if (!(2.0 < c1 && c1 < c2)) throw DomainError("need 2 < c1 < c2");
    EvalConfig cfg;
    cfg.target_abs_error = 1e-16;
    const double sigma = 0.5 + (form.weight - 3.0) / 2.0;  // central-point weight
    const double qd = static_cast<double>(q);
    double worst = 0.0;
    int done = 0;
    for (std::int64_t n = 1; n < q && done < max_samples; ++n) {
        if (gcd64(n, q) != 1) continue;
        ++done;
        auto integrand = [&](double u) -> cplx {  // u = log y
            double y = std::exp(u);
            cplx f = (y < 1.0 / qd) ? eval_near_cusp(form, q, n, y, cfg)
                                    : eval_point(form, cplx(static_cast<double>(n) / qd, y), cfg);
            return f * std::exp(u * (sigma + 1.0));
        };
        auto window = [&](double c) {
            return adaptive_integrate(integrand, -c * std::log(qd), c * std::log(qd), 1e-12);
        };
        worst = std::max(worst, std::abs(window(c1) - window(c2)));
    }
    return worst;
}

bool BenchReport::passing() const {
    for (const auto& r : rows)
        if (r.rel_dev > tolerance) return false;
    return true;
}

std::string BenchReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "q,M,N,time_ms,lift_evals,lift_deriv_evals,char_evals,fast_re,fast_im,naive_re,"
          "naive_im,rel_dev\n";
    for (const auto& r : rows) {
        os << r.q << "," << r.M << "," << r.N << "," << r.time_ms << "," << r.lift_evals << ","
           << r.lift_deriv_evals << "," << r.char_evals << "," << r.fast_value.real() << ","
           << r.fast_value.imag() << "," << r.naive_value.real() << "," << r.naive_value.imag()
           << "," << r.rel_dev << "\n";
    }
    return os.str();
}

std::string BenchReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << (i ? "," : "") << "\n  {\"q\":" << r.q << ",\"M\":" << r.M << ",\"N\":" << r.N
           << ",\"time_ms\":" << r.time_ms << ",\"lift_evals\":" << r.lift_evals
           << ",\"lift_deriv_evals\":" << r.lift_deriv_evals << ",\"char_evals\":" << r.char_evals
           << ",\"fast_re\":" << r.fast_value.real() << ",\"fast_im\":" << r.fast_value.imag()
           << ",\"naive_re\":" << r.naive_value.real() << ",\"naive_im\":" << r.naive_value.imag()
           << ",\"rel_dev\":" << r.rel_dev << "}";
    }
    os << "\n]\n";
    return os.str();
}

BenchReport scaling_report(const CuspForm& form,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& splits,
                           const BenchConfig& cfg) {
    BenchReport rep;
    rep.tolerance = cfg.tolerance;
    for (auto [M, N] : splits) {
        std::int64_t q = M * N;
        BenchRow row;
        row.q = q;
        row.M = M;
        row.N = N;
        std::int64_t label = first_primitive_label(q);
        DirichletCharacter chi = char_from_label(q, label);
        CharacterSplit split = split_character(chi, M, N);
        EvalCounter counter;
        SumRequest req;
        req.form = &form;
        req.split = split;
        req.t = cfg.t;
        req.l = cfg.l;
        req.eps = cfg.eps;
        req.gamma_prec = cfg.gamma_prec;
        req.force_jtables = cfg.force_jtables;
        req.threads = cfg.threads;
        auto t0 = std::chrono::steady_clock::now();
        FastResult fast = fast_orbit_sum(req, {}, &counter);
        auto t1 = std::chrono::steady_clock::now();
        row.time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.lift_evals = counter.lift_evals.load();
        row.lift_deriv_evals = counter.lift_derivative_evals.load();
        row.char_evals = counter.char_evals.load();
        row.fast_value = fast.value;
        if (cfg.run_naive_limit && q <= 100000) {
            row.naive_value = naive_orbit_sum(form, chi, q, cfg.t, cfg.l);
            row.rel_dev = std::abs(fast.value - row.naive_value) /
                          (1.0 + std::abs(row.naive_value));
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace twistl
