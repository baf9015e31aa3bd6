#pragma once

#include <string>
#include <vector>

#include "twistl/lseries.hpp"

namespace twistl {

// Independent O(q) path: per-j adaptive quadrature of the Mellin integrals,
// then the same inversion constants. No orbit decomposition, no grid/Taylor
// discretization. Guarded to q <= 1e5.
LValue direct_integral_L(const CuspForm& form, const DirichletCharacter& chi, cplx s,
                         double gamma_prec, EvalCounter* counter = nullptr);

// max over sampled n coprime to q of |I(c1) - I(c2)| where I(c) is the
// truncated Mellin integral of f(n/q + iy). The lower tail evaluates f
// through the cusp reflection (-qiy)^{-k} f(-n'/q + i/(q^2 y)).
double truncation_check(const CuspForm& form, std::int64_t q, double c1, double c2,
                        int max_samples = 6);

// reflection-based evaluation of f(n/q + iy), accurate for small y
cplx eval_near_cusp(const CuspForm& form, std::int64_t q, std::int64_t n, double y,
                    const EvalConfig& cfg);

struct BenchRow {
    std::int64_t q = 0, M = 0, N = 0;
    double time_ms = 0.0;
    std::uint64_t lift_evals = 0, lift_deriv_evals = 0, char_evals = 0;
    cplx fast_value, naive_value;
    double rel_dev = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double tolerance = 1e-3;
    bool passing() const;
    std::string to_csv() const;
    std::string to_json() const;
};

struct BenchConfig {
    double t = 0.0;
    int l = 0;
    double eps = 0.45;
    double gamma_prec = 1.0;
    double tolerance = 1e-3;
    bool run_naive_limit = true;  // naive only when q <= 1e5
    bool force_jtables = true;    // per-box tables even for singletons
    int threads = 0;
};

BenchReport scaling_report(const CuspForm& form,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& splits,
                           const BenchConfig& cfg);

}  // namespace twistl
