#include "twistl/modform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "twistl/bessel.hpp"
#include "twistl/errors.hpp"

namespace twistl {

double MultiIndex::factorial() const {
    auto f = [](int n) {
        double r = 1;
        for (int i = 2; i <= n; ++i) r *= i;
        return r;
    };
    return f(b1) * f(b2) * f(b3);
}

std::vector<MultiIndex> multi_indices_up_to(int d) {
    std::vector<MultiIndex> out;
    for (int b1 = 0; b1 <= d; ++b1)
        for (int b2 = 0; b1 + b2 <= d; ++b2)
            for (int b3 = 0; b1 + b2 + b3 <= d; ++b3) out.push_back({b1, b2, b3});
    return out;
}

std::vector<std::int64_t> delta_coefficients(int n_max) {
    if (n_max < 1) throw DomainError("n_max >= 1 required");
    // poly = prod_{m} (1 - x^m)^24 mod x^{n_max}; tau(n) = poly[n-1]
    const int deg = n_max;  // coefficients of x^0..x^{deg-1}
    std::vector<std::int64_t> poly(deg, 0), factor(deg, 0), next(deg, 0);
    poly[0] = 1;
    std::int64_t binom[25];
    binom[0] = 1;
    for (int j = 1; j <= 24; ++j) binom[j] = binom[j - 1] * (25 - j) / j;
    for (int m = 1; m < deg; ++m) {
        std::fill(factor.begin(), factor.end(), 0);
        for (int j = 0; 1LL * m * j < deg && j <= 24; ++j)
            factor[m * j] = (j % 2 == 0) ? binom[j] : -binom[j];
        std::fill(next.begin(), next.end(), 0);
        for (int i = 0; i < deg; ++i) {
            if (poly[i] == 0) continue;
            for (int j = 0; i + j < deg; ++j) {
                if (factor[j] == 0) continue;
                __int128 acc = static_cast<__int128>(next[i + j]) +
                               static_cast<__int128>(poly[i]) * factor[j];
                if (acc > INT64_MAX || acc < INT64_MIN)
                    throw DomainError("tau expansion overflows 64 bits");
                next[i + j] = static_cast<std::int64_t>(acc);
            }
        }
        poly.swap(next);
    }
    std::vector<std::int64_t> tau(n_max);
    for (int n = 1; n <= n_max; ++n) tau[n - 1] = poly[n - 1];
    return tau;
}

namespace {

void set_coef_growth(CuspForm& f) {
    double p = (f.kind == FormKind::holomorphic) ? (f.weight - 1) / 2.0 + 0.6 : 0.6;
    double a = 0.0;
    for (int n = 1; n <= f.coefficient_count(); ++n)
        a = std::max(a, std::abs(f.coefficients[n - 1]) / std::pow(n, p));
    f.coef_growth_a = std::max(a, 1e-30);
    f.coef_growth_p = p;
}

double estimate_derivative_bound(CuspForm& f) {
    EvalConfig cfg;
    cfg.fd_step = 0.01;
    SplitMix64 rng(0x7515fd5u);
    double max_f = 0.0, max_d = 0.0;
    for (int i = 0; i < 240; ++i) {
        sl2::IwasawaCoords c;
        c.t = rng.uniform(-0.5, 0.5);
        c.v = rng.uniform(-0.14, 2.5);
        c.theta = rng.uniform(-pi, pi);
        Mat2 g = sl2::from_iwasawa(c);
        max_f = std::max(max_f, std::abs(lift_eval(f, g, cfg)));
        if (i % 8 == 0) {
            for (int axis = 0; axis < 3; ++axis) {
                MultiIndex b;
                (axis == 0 ? b.b1 : axis == 1 ? b.b2 : b.b3) = 1;
                max_d = std::max(max_d, std::abs(lift_derivative(f, g, b, 0, cfg)));
            }
        }
    }
    if (max_f <= 0.0) return 1.0;
    return std::max(1.0, max_d / max_f);
}

}  // namespace

CuspForm make_delta(int n_max) {
    CuspForm f;
    f.kind = FormKind::holomorphic;
    f.weight = 12;
    auto tau = delta_coefficients(n_max);
    f.coefficients.reserve(tau.size());
    for (auto t : tau) f.coefficients.emplace_back(static_cast<double>(t), 0.0);
    set_coef_growth(f);
    f.derivative_bound = estimate_derivative_bound(f);
    return f;
}

CuspForm load_maass(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    CuspForm f;
    f.kind = FormKind::maass_even;
    f.weight = 0;
    bool have_header = false, have_r = false;
    std::string line;
    int expect_n = 1;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (!have_header) {
            if (first != "maass-even") throw ParseError("expected 'maass-even' header");
            have_header = true;
            continue;
        }
        if (!have_r) {
            if (first != "r") throw MissingSpectralParameter("expected 'r <value>' line");
            if (!(ls >> f.spectral_r)) throw MissingSpectralParameter("bad spectral parameter");
            have_r = true;
            continue;
        }
        int n = 0;
        try {
            n = std::stoi(first);
        } catch (...) {
            throw ParseError("bad coefficient index: " + first);
        }
        if (n != expect_n) throw ParseError("coefficient indices must start at 1 with no gaps");
        double re = 0, im = 0;
        if (!(ls >> re)) throw ParseError("missing coefficient value");
        ls >> im;
        f.coefficients.emplace_back(re, im);
        ++expect_n;
    }
    if (!have_header) throw ParseError("empty file");
    if (!have_r) throw MissingSpectralParameter("no spectral parameter");
    if (f.coefficients.empty()) throw ParseError("no coefficients");
    set_coef_growth(f);
    f.derivative_bound = estimate_derivative_bound(f);
    return f;
}

void save_maass(const CuspForm& form, const std::string& path) {
    std::ofstream out(path);
    out << "maass-even\n";
    out.precision(17);
    out << "r " << form.spectral_r << "\n";
    for (int n = 1; n <= form.coefficient_count(); ++n) {
        cplx c = form.coefficients[n - 1];
        out << n << " " << c.real();
        if (c.imag() != 0.0) out << " " << c.imag();
        out << "\n";
    }
}

cplx eval_point(const CuspForm& form, cplx z, const EvalConfig& cfg) {
    double y = z.imag();
    if (!(y > 0)) throw DomainError("eval_point requires Im z > 0");
    double target = std::max(cfg.target_abs_error, 1e-16);
    KahanSumC acc;
    if (form.kind == FormKind::holomorphic) {
        cplx qz = std::exp(cplx(0, two_pi) * z);  // |qz| = e^{-2 pi y}
        cplx qn = 1.0;
        double decay = std::exp(-two_pi * y);
        for (int n = 1; n <= cfg.max_terms; ++n) {
            // bound on everything from term n on
            double head = form.coef_growth_a * std::pow(n, form.coef_growth_p) *
                          std::exp(-two_pi * y * n);
            double ratio = decay * std::pow(1.0 + 1.0 / n, form.coef_growth_p);
            if (ratio < 0.9 && head / (1.0 - ratio) <= target) break;
            if (n > form.coefficient_count())
                throw InsufficientCoefficients("need more Fourier coefficients");
            qn *= qz;
            acc.add(form.coefficients[n - 1] * qn);
        }
        return acc.value();
    }
    // even Maass: K_{i nu}(u) <= K_0(u) <= sqrt(pi/(2u)) e^{-u} for the tail
    for (int n = 1; n <= cfg.max_terms; ++n) {
        double u = two_pi * n * y;
        double kbound = (u > 0.5) ? std::sqrt(pi / (2 * u)) * std::exp(-u) * 1.1
                                  : 5.0 * std::exp(-u);
        double head = form.coef_growth_a * std::pow(n, form.coef_growth_p) * 2 *
                      std::sqrt(n * y) * kbound;
        double ratio = std::exp(-two_pi * y) * std::pow(1.0 + 1.0 / n, form.coef_growth_p + 1);
        if (ratio < 0.9 && head / (1.0 - ratio) <= target) break;
        if (n > form.coefficient_count())
            throw InsufficientCoefficients("need more Fourier coefficients");
        double w = 2 * std::sqrt(n * y) * bessel_k_ir(form.spectral_r, u) *
                   std::cos(two_pi * n * z.real());
        acc.add(form.coefficients[n - 1] * w);
    }
    return acc.value();
}

cplx lift_eval(const CuspForm& form, const Mat2& g, const EvalConfig& cfg,
               EvalCounter* counter) {
    if (counter) counter->lift_evals.fetch_add(1, std::memory_order_relaxed);
    sl2::ReducedPoint rp = sl2::reduce(g);
    const auto& c = rp.xc;
    cplx val = eval_point(form, cplx(c.t, std::exp(c.v)), cfg);
    if (form.weight == 0) return val;
    // (ci+d)^{-k} at n(t)a(v)K(theta) equals e^{k v/2} e^{i k theta}
    double k = form.weight;
    return val * std::exp(k * c.v / 2.0) * cplx(std::cos(k * c.theta), std::sin(k * c.theta));
}

int fd_half_width(int m) { return m == 0 ? 0 : (m + 1) / 2 + 2; }

const std::vector<double>& fd_weights(int m, int H) {
    static std::map<std::pair<int, int>, std::vector<double>> cache;
    static std::mutex mu;
    std::scoped_lock lk(mu);
    auto key = std::make_pair(m, H);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // Fornberg: weights for the m-th derivative at 0 on nodes -H..H
    const int n = 2 * H;  // highest node index
    std::vector<double> alpha(n + 1);
    for (int i = 0; i <= n; ++i) alpha[i] = static_cast<double>(i - H);
    std::vector<std::vector<double>> delta(m + 1, std::vector<double>(n + 1, 0.0));
    delta[0][0] = 1.0;
    double c1 = 1.0;
    for (int nn = 1; nn <= n; ++nn) {
        double c2 = 1.0;
        for (int nu = 0; nu < nn; ++nu) {
            double c3 = alpha[nn] - alpha[nu];
            c2 *= c3;
            for (int mm = std::min(nn, m); mm >= 0; --mm) {
                double dprev = (mm > 0) ? delta[mm - 1][nu] : 0.0;
                delta[mm][nu] = (alpha[nn] * delta[mm][nu] - mm * dprev) / c3;
            }
        }
        for (int mm = std::min(nn, m); mm >= 0; --mm) {
            double dprev = (mm > 0) ? delta[mm - 1][nn - 1] : 0.0;
            delta[mm][nn] = c1 / c2 * (mm * dprev - alpha[nn - 1] * delta[mm][nn - 1]);
        }
        c1 = c2;
    }
    // alpha[i] used above is the node value itself since x0 = 0
    auto [pos, ok] = cache.emplace(key, std::move(delta[m]));
    return pos->second;
}

double auto_fd_step(const CuspForm& form) {
    double r = std::max(1.0, form.derivative_bound);
    return std::clamp(0.25 / r, 1e-3, 0.02);
}

FlowEvalCache::FlowEvalCache(const CuspForm& form, const Mat2& base, double step,
                             const EvalConfig& cfg, EvalCounter* counter)
    : form_(&form), base_(base), h_(step > 0 ? step : auto_fd_step(form)), cfg_(cfg),
      counter_(counter) {}

cplx FlowEvalCache::node(int i1, int i2, int i3, int i4, int i5) {
    auto pack = [](int i) { return static_cast<std::uint64_t>(i + 64) & 0x7f; };
    std::uint64_t key = pack(i1) | (pack(i2) << 7) | (pack(i3) << 14) | (pack(i4) << 21) |
                        (pack(i5) << 28);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Mat2 g = base_;
    if (i1) g = g * sl2::translation(i1 * h_);
    if (i2) g = g * sl2::dilation(i2 * h_);
    if (i3) g = g * sl2::rotation(i3 * h_);
    if (i4) g = g * sl2::dilation(i4 * h_);
    if (i5) g = g * sl2::translation(i5 * h_);
    cplx v = lift_eval(*form_, g, cfg_, counter_);
    memo_.emplace(key, v);
    return v;
}

cplx word_derivative(FlowEvalCache& cache, const MultiIndex& beta, int l, bool leading_dx,
                     EvalCounter* counter) {
    if (counter) counter->lift_derivative_evals.fetch_add(1, std::memory_order_relaxed);
    if (beta.b1 < 0 || beta.b2 < 0 || beta.b3 < 0 || l < 0)
        throw DomainError("negative derivative order");
    if (beta.total() + l + (leading_dx ? 1 : 0) > 13)
        throw OrderTooHigh("derivative order exceeds 12");
    const CuspForm& form = cache.form();
    // canonical flow slots: n(s1) a(s2) K(s3) a(s4) n(s5)
    int ord[5] = {beta.b1, beta.b2, beta.b3, l, leading_dx ? 1 : 0};
    cplx factor = 1.0;
    if (ord[2] > 0 && ord[3] == 0 && ord[4] == 0) {
        // d3 acts directly on the lift: exact K-equivariance f~(gK) = e^{ik theta} f~(g)
        double k = form.weight;
        if (k == 0.0) return 0.0;
        cplx ik(0.0, k);
        for (int j = 0; j < ord[2]; ++j) factor *= ik;
        ord[2] = 0;
    }
    if (ord[2] == 0) {  // adjacent a-flows merge
        ord[1] += ord[3];
        ord[3] = 0;
    }
    int axes[5], orders[5], na = 0;
    for (int a = 0; a < 5; ++a)
        if (ord[a] > 0) {
            axes[na] = a;
            orders[na] = ord[a];
            ++na;
        }
    if (na == 0) return factor * cache.node(0, 0, 0, 0, 0);

    const std::vector<double>* w[5];
    int hw[5];
    double hscale = 1.0;
    for (int a = 0; a < na; ++a) {
        hw[a] = fd_half_width(orders[a]);
        w[a] = &fd_weights(orders[a], hw[a]);
        for (int j = 0; j < orders[a]; ++j) hscale /= cache.step();
    }
    // tensor product of the 1-d stencils over the active axes
    int idx[5] = {0, 0, 0, 0, 0};
    KahanSumC acc;
    std::function<void(int, double)> rec = [&](int a, double wt) {
        if (a == na) {
            int off[5] = {0, 0, 0, 0, 0};
            for (int b = 0; b < na; ++b) off[axes[b]] = idx[b];
            acc.add(wt * cache.node(off[0], off[1], off[2], off[3], off[4]));
            return;
        }
        for (int j = -hw[a]; j <= hw[a]; ++j) {
            double wj = (*w[a])[j + hw[a]];
            if (wj == 0.0) continue;
            idx[a] = j;
            rec(a + 1, wt * wj);
        }
    };
    rec(0, 1.0);
    return factor * hscale * acc.value();
}

cplx lift_derivative(const CuspForm& form, const Mat2& g, const MultiIndex& beta, int l,
                     const EvalConfig& cfg, EvalCounter* counter) {
    if (beta.total() + l > 12) throw OrderTooHigh("|beta| + l > 12");
    FlowEvalCache cache(form, g, cfg.fd_step, cfg, counter);
    return word_derivative(cache, beta, l, false, counter);
}

}  // namespace twistl
