#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "twistl/counters.hpp"
#include "twistl/dirichlet.hpp"
#include "twistl/hecke.hpp"
#include "twistl/modform.hpp"
#include "twistl/sl2.hpp"

namespace twistl {

// Complex weights on T(M). The h-constructors produce functions supported on
// m = 1 (delta_1 factor); composed weights h \circ sigma spread over T(M).
struct OrbitWeightFunction {
    std::int64_t M = 1;
    std::vector<cplx> values;  // over index_set(M) order
};

// coprime case: values[(1,k)] = chi_M(l + kN)
OrbitWeightFunction h_coprime(const DirichletCharacter& chi_M, std::int64_t N, std::int64_t l);

// M | N case: values[(1,k)] = e(b l^{-1} k / M), inverse mod M
OrbitWeightFunction h_divides(std::int64_t b, std::int64_t M, std::int64_t l);

// mixed case, k = k0 + l0*M1: values[(1,k)] = e(b l^{-1} k/M1) chi_M2(l + k0 N + l0 M1 N)
OrbitWeightFunction h_mixed(std::int64_t b, std::int64_t M1, const DirichletCharacter& chi_M2,
                            std::int64_t N, std::int64_t M, std::int64_t l);

// J(beta, r, x) = sum_{(m,k) in T(M)} r((m,k)) d^beta (d2^l f~)(A(M,m,k) x)
cplx j_sum(const CuspForm& form, int l, const MultiIndex& beta, const OrbitWeightFunction& r,
           const Mat2& x, std::int64_t M, const EvalConfig& cfg, EvalCounter* counter = nullptr,
           bool leading_dx = false);

struct TaylorStencil {
    sl2::IwasawaCoords offsets;  // of x^{-1} y
    int degree = 0;
    std::vector<MultiIndex> betas;      // all |beta| <= degree
    std::vector<double> coefficients;   // c_beta = t^{b1} v^{b2} theta^{b3} / beta!
};

// expansion coefficients transporting J(., r, x) to y; requires offsets < 0.1
TaylorStencil taylor_stencil(const Mat2& x, const Mat2& y, int degree);

struct TransferResult {
    cplx value;
    double truncation_estimate = 0.0;  // magnitude of the top-degree layer
};

TransferResult taylor_transfer(const TaylorStencil& stencil,
                               const std::function<cplx(const MultiIndex&)>& j_values);

struct SumRequest {
    const CuspForm* form = nullptr;
    CharacterSplit split;
    double t = 0.0;
    int l = 0;
    double eps = 0.45;
    double gamma_prec = 8.0;
    int taylor_degree = 0;  // 0: from ceil((gamma+2) ln10 / (eps_eff ln q)), capped
    bool leading_dx = false;
    bool disable_caches = false;
    bool force_jtables = false;  // bench: no singleton shortcut
    int threads = 0;
};

struct FastResult {
    cplx value;
    double max_residual = 0.0;   // largest per-member truncation estimate
    std::size_t boxes = 0;
    std::size_t multi_boxes = 0;
    std::size_t weight_ids = 0;
    std::size_t fallbacks = 0;   // members recomputed directly after residual check
    int degree = 0;
    double box_side = 0.0;
};

// Direct O(q) reference: S = sum_k chi(k) d2^l f~(n(k/q) a(t)).
cplx naive_orbit_sum(const CuspForm& form, const DirichletCharacter& chi, std::int64_t q,
                     double t, int l, const EvalConfig& cfg = {},
                     EvalCounter* counter = nullptr, bool leading_dx = false);

// Orbit-decomposed engine: reduction, permutations, box-sorted Taylor
// transfer. chi must be primitive; M = 1 collapses to the direct sum.
FastResult fast_orbit_sum(const SumRequest& req, const EvalConfig& cfg = {},
                          EvalCounter* counter = nullptr);

// Geometry (reduction + boxes + weight ids) is reusable across derivative
// orders at fixed t; the engine object carries those caches.
class FastEngine {
public:
    FastEngine(const CuspForm& form, const CharacterSplit& split, double eps,
               double gamma_prec, const EvalConfig& cfg = {});

    FastResult run(double t, int l, bool leading_dx = false, EvalCounter* counter = nullptr);

    void set_taylor_degree(int d) { taylor_degree_ = d; }
    void set_disable_caches(bool v) { disable_caches_ = v; }
    void set_force_jtables(bool v) { force_jtables_ = v; }
    void set_threads(int t) { threads_ = t; }
    double box_side() const { return side_; }
    int default_degree() const;

private:
    struct PointData {
        std::int64_t j;
        sl2::ReducedPoint red;
        cplx outer;
        std::size_t weight_id;
    };
    void build_geometry(double t);
    std::size_t weight_id_for(std::int64_t c_res, const std::array<std::int64_t, 4>& gkey,
                              const Mat2l& gamma);

    const CuspForm* form_;
    CharacterSplit split_;
    double eps_, gamma_prec_, side_;
    EvalConfig cfg_;
    int taylor_degree_ = 0;
    bool disable_caches_ = false;
    bool force_jtables_ = false;
    int threads_ = 0;

    std::optional<double> geom_t_;
    std::vector<PointData> points_;
    sl2::BoxPartition part_;
    std::map<std::pair<std::int64_t, std::array<std::int64_t, 4>>, std::size_t> weight_key_map_;
    std::vector<OrbitWeightFunction> weights_;  // composed h∘sigma per id

    friend FastResult fast_orbit_sum(const SumRequest&, const EvalConfig&, EvalCounter*);
};

int thread_count(int requested);

}  // namespace twistl
