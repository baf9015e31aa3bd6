#include "twistl/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "twistl/errors.hpp"

namespace twistl {

namespace {

GaussLegendreRule compute_rule(int n) {
    GaussLegendreRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

std::map<int, GaussLegendreRule> g_rules;
std::mutex g_rules_mutex;

cplx apply_rule(const GaussLegendreRule& r, const std::function<cplx(double)>& f, double a,
                double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    KahanSumC acc;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        acc.add(half * r.weights[i] * f(mid + half * r.nodes[i]));
    return acc.value();
}

cplx adaptive_rec(const std::function<cplx(double)>& f, double a, double b, double tol,
                  int depth, const GaussLegendreRule& lo, const GaussLegendreRule& hi) {
    cplx c1 = apply_rule(lo, f, a, b);
    cplx c2 = apply_rule(hi, f, a, b);
    if (std::abs(c1 - c2) <= tol) return c2;
    if (depth <= 0) throw QuadratureFailure("adaptive quadrature did not converge");
    double mid = 0.5 * (a + b);
    return adaptive_rec(f, a, mid, tol * 0.5, depth - 1, lo, hi) +
           adaptive_rec(f, mid, b, tol * 0.5, depth - 1, lo, hi);
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    std::scoped_lock lk(g_rules_mutex);
    auto it = g_rules.find(n);
    if (it == g_rules.end()) it = g_rules.emplace(n, compute_rule(n)).first;
    return it->second;
}

cplx panel_integrate(const std::function<cplx(double)>& f, double a, double b,
                     double max_panel_width, int n) {
    const GaussLegendreRule& r = gauss_legendre(n);
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel_width)));
    double w = (b - a) / panels;
    KahanSumC acc;
    for (int p = 0; p < panels; ++p) acc.add(apply_rule(r, f, a + p * w, a + (p + 1) * w));
    return acc.value();
}

cplx adaptive_integrate(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    const GaussLegendreRule& lo = gauss_legendre(7);
    const GaussLegendreRule& hi = gauss_legendre(15);
    return adaptive_rec(f, a, b, abs_tol, max_depth, lo, hi);
}

}  // namespace twistl
