#include "twistl/verify.hpp"

#include <cmath>
#include <sstream>

#include "twistl/bessel.hpp"
#include "twistl/dirichlet.hpp"
#include "twistl/hecke.hpp"
#include "twistl/lseries.hpp"
#include "twistl/modform.hpp"
#include "twistl/orbitsum.hpp"
#include "twistl/sl2.hpp"

namespace twistl {

namespace {

Mat2l random_unimodular(SplitMix64& rng, int steps = 6) {
    Mat2l a = mat2l(1, 0, 0, 1);
    for (int i = 0; i < steps; ++i) {
        std::int64_t t = rng.integer(-4, 4);
        a = a * mat2l(1, t, 0, 1);
        a = a * mat2l(0, 1, -1, t == 0 ? 1 : 0);
    }
    return a;
}

}  // namespace

std::vector<VerifyResult> run_verify(std::uint64_t seed) {
    std::vector<VerifyResult> out;
    auto push = [&](const std::string& name, double metric, double bound) {
        out.push_back({name, metric <= bound, metric, bound});
    };

    {  // Iwasawa round trip
        SplitMix64 rng(seed ^ 0x11);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            sl2::IwasawaCoords c{rng.uniform(-5, 5), rng.uniform(-5, 5),
                                 rng.uniform(-pi, pi)};
            auto d = sl2::iwasawa_decompose(sl2::from_iwasawa(c));
            worst = std::max({worst, std::abs(d.t - c.t), std::abs(d.v - c.v),
                              std::abs(d.theta - c.theta)});
        }
        push("iwasawa-round-trip", worst, 1e-9);
    }
    {  // reduction is Gamma-stable
        SplitMix64 rng(seed ^ 0x22);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            sl2::IwasawaCoords c{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-pi, pi)};
            Mat2 g = sl2::from_iwasawa(c);
            Mat2l gam = random_unimodular(rng, 4);
            Mat2 x1 = sl2::reduce(g).x;
            Mat2 x2 = sl2::reduce(to_real(gam) * g).x;
            worst = std::max(worst, (x1 - x2).cwiseAbs().maxCoeff());
        }
        push("reduce-gamma-stable", worst, 1e-9);
    }
    {  // box partition: disjoint cover + neighborhood bound
        SplitMix64 rng(seed ^ 0x33);
        std::vector<sl2::ReducedPoint> pts;
        for (int i = 0; i < 100; ++i) {
            sl2::IwasawaCoords c{rng.uniform(-0.5, 0.5), rng.uniform(-1, 3),
                                 rng.uniform(-pi, pi)};
            sl2::ReducedPoint rp;
            rp.x = sl2::from_iwasawa(c);
            rp.xc = c;
            rp.gamma = mat2l(1, 0, 0, 1);
            rp.source = i;
            pts.push_back(rp);
        }
        auto part = sl2::box_sort(pts, 0.1);
        std::size_t total = 0;
        double worst = 0.0;
        for (auto& [key, members] : part.boxes) {
            total += members.size();
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    auto u = sl2::offset_coords(pts[members[a]].x, pts[members[b]].x);
                    worst = std::max({worst, std::abs(u.t), std::abs(u.v), std::abs(u.theta)});
                }
        }
        push("box-partition-cover", total == pts.size() ? 0.0 : 1.0, 0.5);
        push("box-neighborhood", worst, 0.2);
    }

    CuspForm delta = make_delta(256);
    EvalConfig cfg;
    {  // automorphy of the lift
        SplitMix64 rng(seed ^ 0x44);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            sl2::IwasawaCoords c{rng.uniform(-1, 1), rng.uniform(-1, 2), rng.uniform(-pi, pi)};
            Mat2 g = sl2::from_iwasawa(c);
            Mat2l gam = random_unimodular(rng, 5);
            cplx v1 = lift_eval(delta, g, cfg);
            cplx v2 = lift_eval(delta, to_real(gam) * g, cfg);
            worst = std::max(worst, std::abs(v1 - v2) / std::max(1.0, std::abs(v1)));
        }
        push("lift-automorphy", worst, 1e-9);
    }
    {  // K-action phase and d3 = ik
        SplitMix64 rng(seed ^ 0x55);
        double worst = 0;
        for (int i = 0; i < 20; ++i) {
            sl2::IwasawaCoords c{rng.uniform(-0.5, 0.5), rng.uniform(0, 1.5),
                                 rng.uniform(-pi, pi)};
            Mat2 g = sl2::from_iwasawa(c);
            double th = rng.uniform(-1, 1);
            cplx lhs = lift_eval(delta, g * sl2::rotation(th), cfg);
            cplx rhs = std::exp(cplx(0, 12.0 * th)) * lift_eval(delta, g, cfg);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        push("lift-k-action", worst, 1e-9);
    }
    {  // degree-8 Taylor fidelity at small offsets
        SplitMix64 rng(seed ^ 0x66);
        double worst = 0;
        for (int i = 0; i < 6; ++i) {
            sl2::IwasawaCoords c{rng.uniform(-0.5, 0.5), rng.uniform(0, 1.0),
                                 rng.uniform(-1, 1)};
            Mat2 g = sl2::from_iwasawa(c);
            sl2::IwasawaCoords u{rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01),
                                 rng.uniform(-0.01, 0.01)};
            cplx direct = lift_eval(delta, g * sl2::from_iwasawa(u), cfg);
            KahanSumC acc;
            FlowEvalCache cache(delta, g, 0.0, cfg);
            for (const auto& b : multi_indices_up_to(8)) {
                cplx d = word_derivative(cache, b, 0, false);
                acc.add(d / b.factorial() * std::pow(u.t, b.b1) * std::pow(u.v, b.b2) *
                        std::pow(u.theta, b.b3));
            }
            worst = std::max(worst, std::abs(acc.value() - direct));
        }
        push("taylor-fidelity-deg8", worst, 1e-8);
    }
    {  // character multiplicativity and parity
        SplitMix64 rng(seed ^ 0x77);
        double worst = 0;
        for (std::int64_t q : {15, 16, 36, 45}) {
            std::int64_t label = first_primitive_label(q);
            auto chi = char_from_label(q, label);
            for (int i = 0; i < 50; ++i) {
                std::int64_t m = rng.integer(1, q - 1), n = rng.integer(1, q - 1);
                worst = std::max(worst, std::abs(chi(m * n) - chi(m) * chi(n)));
            }
            double par = std::abs(std::abs(chi(-1).real()) - 1.0) + std::abs(chi(-1).imag());
            worst = std::max(worst, par);
        }
        push("character-multiplicative", worst, 1e-12);
    }
    {  // gauss sums: CRT vs direct, |tau| = sqrt(q)
        double worst = 0, worst_abs = 0;
        for (std::int64_t q = 3; q <= 60; ++q) {
            for (std::int64_t a = 1; a < q; ++a) {
                if (gcd64(a, q) != 1) continue;
                auto chi = char_from_label(q, a);
                cplx t1 = gauss_sum(chi), t2 = gauss_sum_direct(chi);
                worst = std::max(worst, std::abs(t1 - t2) / std::sqrt(double(q)));
                if (chi.primitive())
                    worst_abs = std::max(worst_abs, std::abs(std::abs(t1) - std::sqrt(double(q))) /
                                                        std::sqrt(double(q)));
                if (a > 12) break;  // a few labels per modulus suffice here
            }
        }
        push("gauss-crt-vs-direct", worst, 1e-10);
        push("gauss-primitive-modulus", worst_abs, 1e-10);
    }
    {  // permutation congruence lemma (exact)
        SplitMix64 rng(seed ^ 0x88);
        double fails = 0;
        for (std::int64_t L = 2; L <= 8; ++L) {
            for (int i = 0; i < 25; ++i) {
                Mat2l a1 = random_unimodular(rng, 5);
                // a2 = a1 mod L with det 1: right-multiply by unipotents in L*Z
                std::int64_t r = rng.integer(-3, 3);
                std::int64_t u = rng.integer(-3, 3);
                Mat2l a2 = a1 * mat2l(1, L * r, 0, 1) * mat2l(1, 0, L * u, 1);
                for (const auto& idx : hecke::index_set(L)) {
                    auto n1 = hecke::act_and_normalize(L, idx, a1);
                    auto n2 = hecke::act_and_normalize(L, idx, a2);
                    if (!(n1.idx == n2.idx)) fails += 1;
                }
            }
        }
        push("permutation-congruence", fails, 0.5);
    }
    {  // fast vs naive orbit sums at q = 15 and q = 36
        double worst = 0;
        for (auto [q, M] : std::vector<std::pair<std::int64_t, std::int64_t>>{{15, 3}, {36, 6}}) {
            auto chi = char_from_label(q, first_primitive_label(q));
            auto split = split_character(chi, M, q / M);
            SumRequest req;
            req.form = &delta;
            req.split = split;
            req.t = 0.3;
            req.l = 1;
            req.gamma_prec = 8;
            FastResult f = fast_orbit_sum(req);
            cplx n = naive_orbit_sum(delta, chi, q, 0.3, 1);
            worst = std::max(worst, std::abs(f.value - n) / (1.0 + std::abs(n)));
        }
        push("orbit-fast-vs-naive", worst, 1e-6);
    }
    {  // bessel sanity
        double k0 = bessel_k_ir(0.0, 1.0);
        push("bessel-k0", std::abs(k0 - 0.42102443824070834), 1e-10);
        double ratio = bessel_k_ir(5.0, 20.0) / bessel_k_ir(5.0, 10.0);
        push("bessel-decay", ratio, std::exp(-9.0));
    }
    return out;
}

std::string format_verify(const std::vector<VerifyResult>& results) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific;
    for (const auto& r : results)
        os << (r.pass ? "ok   " : "FAIL ") << r.name << " metric=" << r.metric
           << " bound=" << r.bound << "\n";
    return os.str();
}

}  // namespace twistl
