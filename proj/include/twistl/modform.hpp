#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "twistl/counters.hpp"
#include "twistl/sl2.hpp"
#include "twistl/types.hpp"

namespace twistl {

enum class FormKind { holomorphic, maass_even };

// Cusp form given by its Fourier coefficients. Holomorphic forms use
// f(z) = sum f^(n) e(nz); even Maass forms use
// f(z) = sum f^(n) 2 sqrt(ny) K_{ir}(2 pi n y) cos(2 pi n x).
struct CuspForm {
    FormKind kind = FormKind::holomorphic;
    int weight = 0;          // k (even, >= 12); 0 for Maass
    double spectral_r = 0.0; // Maass spectral parameter
    std::vector<cplx> coefficients;  // coefficients[n-1] = f^(n)
    double derivative_bound = 1.0;   // R: sampled derivative growth rate (>= 1)

    // tail bound |f^(n)| <= coef_growth_a * n^coef_growth_p
    double coef_growth_a = 1.0;
    double coef_growth_p = 0.0;

    int coefficient_count() const { return static_cast<int>(coefficients.size()); }
};

struct EvalConfig {
    double target_abs_error = 1e-14;  // clamped to >= 1e-16 internally
    int max_terms = 1 << 20;
    double fd_step = 0.0;  // 0: auto = clamp(0.25/R, 1e-3, 0.02)
};

struct MultiIndex {
    int b1 = 0, b2 = 0, b3 = 0;
    int total() const { return b1 + b2 + b3; }
    double factorial() const;
    bool operator==(const MultiIndex&) const = default;
};

// all |beta| <= d in lexicographic (b1,b2,b3) order
std::vector<MultiIndex> multi_indices_up_to(int d);

// Ramanujan tau(n), n = 1..n_max, by expanding x prod (1-x^m)^24 exactly.
std::vector<std::int64_t> delta_coefficients(int n_max);

CuspForm make_delta(int n_max = 512);

CuspForm load_maass(const std::string& path);
void save_maass(const CuspForm& form, const std::string& path);

// Fourier evaluation at z = x+iy, y > 0; truncation error <= target_abs_error.
cplx eval_point(const CuspForm& form, cplx z, const EvalConfig& cfg);

// Lift to Gamma\SL(2,R): f~(g) = (ci+d)^{-k} f(g*i). Reduces g internally, so
// it is accurate arbitrarily close to the cusp.
cplx lift_eval(const CuspForm& form, const Mat2& g, const EvalConfig& cfg,
               EvalCounter* counter = nullptr);

// Shared evaluation grid for the flow s -> f~(g n(s1) a(s2) K(s3) a(s4) n(s5)).
// Nodes are memoized so stencils of different orders reuse them.
class FlowEvalCache {
public:
    FlowEvalCache(const CuspForm& form, const Mat2& base, double step, const EvalConfig& cfg,
                  EvalCounter* counter = nullptr);
    cplx node(int i1, int i2, int i3, int i4, int i5);
    double step() const { return h_; }
    const CuspForm& form() const { return *form_; }

private:
    const CuspForm* form_;
    Mat2 base_;
    double h_;
    EvalConfig cfg_;
    EvalCounter* counter_;
    std::unordered_map<std::uint64_t, cplx> memo_;
};

// Ordered derivative d1^b1 d2^b2 d3^b3 d2^l [d1 if leading_dx] f~ at the cache
// base point, by tensor-product central differences on the flow. d3 applied
// directly to f~ is exact (right K-action scales the lift by e^{ik theta}).
cplx word_derivative(FlowEvalCache& cache, const MultiIndex& beta, int l, bool leading_dx,
                     EvalCounter* counter = nullptr);

// d1^b1 d2^b2 d3^b3 d2^l f~ at g; |beta| + l <= 12.
cplx lift_derivative(const CuspForm& form, const Mat2& g, const MultiIndex& beta, int l,
                     const EvalConfig& cfg, EvalCounter* counter = nullptr);

double auto_fd_step(const CuspForm& form);

// central-difference weights for the m-th derivative on nodes -H..H (unit
// spacing), exact Fornberg construction; cached
const std::vector<double>& fd_weights(int m, int H);

// stencil half-width used for order m
int fd_half_width(int m);

}  // namespace twistl
