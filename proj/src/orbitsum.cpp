#include "twistl/orbitsum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "twistl/errors.hpp"

namespace twistl {

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TWISTL_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// index of (1,k) inside index_set(M): divisor m=1 block comes first
std::size_t slot_of_k(std::int64_t k) { return static_cast<std::size_t>(k); }

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    threads = std::min<std::size_t>(std::max(1, threads), n == 0 ? 1 : n);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

OrbitWeightFunction h_coprime(const DirichletCharacter& chi_M, std::int64_t N, std::int64_t l) {
    std::int64_t M = chi_M.modulus();
    if (gcd64(M, N) != 1) throw InvalidSplit("h_coprime requires gcd(M,N) = 1");
    OrbitWeightFunction h;
    h.M = M;
    h.values.assign(hecke::index_set(M).size(), cplx(0.0));
    for (std::int64_t k = 0; k < M; ++k) h.values[slot_of_k(k)] = chi_M(l + k * N);
    return h;
}

OrbitWeightFunction h_divides(std::int64_t b, std::int64_t M, std::int64_t l) {
    std::int64_t linv = mod_inverse(l, M);
    if (M > 1 && linv < 0) throw NonInvertibleResidue("l not invertible mod M");
    if (M == 1) linv = 0;
    OrbitWeightFunction h;
    h.M = M;
    h.values.assign(hecke::index_set(M).size(), cplx(0.0));
    for (std::int64_t k = 0; k < M; ++k)
        h.values[slot_of_k(k)] = unit_e_frac(mod_pos(b * linv, M) * k, M);
    return h;
}

OrbitWeightFunction h_mixed(std::int64_t b, std::int64_t M1, const DirichletCharacter& chi_M2,
                            std::int64_t N, std::int64_t M, std::int64_t l) {
    std::int64_t M2 = chi_M2.modulus();
    if (M1 * M2 != M) throw InvalidSplit("M != M1*M2");
    std::int64_t linv = 0;
    if (M1 > 1) {
        linv = mod_inverse(l, M1);
        if (linv < 0) throw NonInvertibleResidue("l not invertible mod M1");
    }
    OrbitWeightFunction h;
    h.M = M;
    h.values.assign(hecke::index_set(M).size(), cplx(0.0));
    for (std::int64_t k = 0; k < M; ++k) {
        std::int64_t k0 = k % M1, l0 = k / M1;
        cplx phase = (M1 > 1) ? unit_e_frac(mod_pos(b * linv, M1) * k, M1) : cplx(1.0);
        h.values[slot_of_k(k)] = phase * chi_M2(l + k0 * N + l0 * M1 * N);
    }
    return h;
}

cplx j_sum(const CuspForm& form, int l, const MultiIndex& beta, const OrbitWeightFunction& r,
           const Mat2& x, std::int64_t M, const EvalConfig& cfg, EvalCounter* counter,
           bool leading_dx) {
    auto set = hecke::index_set(M);
    if (r.values.size() != set.size()) throw InvalidIndex("weight function size mismatch");
    KahanSumC acc;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (r.values[i] == cplx(0.0)) continue;
        Mat2 pt = hecke::hecke_matrix(M, set[i].m, set[i].k) * x;
        FlowEvalCache cache(form, pt, cfg.fd_step, cfg, counter);
        acc.add(r.values[i] * word_derivative(cache, beta, l, leading_dx, counter));
    }
    return acc.value();
}

TaylorStencil taylor_stencil(const Mat2& x, const Mat2& y, int degree) {
    sl2::IwasawaCoords u = sl2::offset_coords(x, y);
    if (std::abs(u.t) >= 0.1 || std::abs(u.v) >= 0.1 || std::abs(u.theta) >= 0.1)
        throw TooFar("points not within U_0.1");
    TaylorStencil st;
    st.offsets = u;
    st.degree = degree;
    st.betas = multi_indices_up_to(degree);
    st.coefficients.reserve(st.betas.size());
    for (const auto& b : st.betas) {
        double c = std::pow(u.t, b.b1) * std::pow(u.v, b.b2) * std::pow(u.theta, b.b3) /
                   b.factorial();
        st.coefficients.push_back(c);
    }
    return st;
}

TransferResult taylor_transfer(const TaylorStencil& stencil,
                               const std::function<cplx(const MultiIndex&)>& j_values) {
    TransferResult out;
    KahanSumC acc;
    KahanSum top;
    for (std::size_t i = 0; i < stencil.betas.size(); ++i) {
        cplx term = stencil.coefficients[i] * j_values(stencil.betas[i]);
        acc.add(term);
        if (stencil.betas[i].total() == stencil.degree) top.add(std::abs(term));
    }
    out.value = acc.value();
    out.truncation_estimate = top.value();
    return out;
}

cplx naive_orbit_sum(const CuspForm& form, const DirichletCharacter& chi, std::int64_t q,
                     double t, int l, const EvalConfig& cfg, EvalCounter* counter,
                     bool leading_dx) {
    std::vector<cplx> slots(static_cast<std::size_t>(q), cplx(0.0));
    std::vector<std::int64_t> ks;
    for (std::int64_t k = 0; k < q; ++k)
        if (gcd64(k, q) == 1) ks.push_back(k);
    MultiIndex beta0;
    parallel_for(ks.size(), thread_count(0), [&](std::size_t i) {
        std::int64_t k = ks[i];
        cplx w = chi.eval(k, counter);
        Mat2 g = sl2::translation(static_cast<double>(k) / static_cast<double>(q)) *
                 sl2::dilation(t);
        FlowEvalCache cache(form, g, cfg.fd_step, cfg, counter);
        slots[static_cast<std::size_t>(k)] = w * word_derivative(cache, beta0, l, leading_dx,
                                                                 counter);
    });
    KahanSumC acc;
    for (std::int64_t k = 0; k < q; ++k) acc.add(slots[static_cast<std::size_t>(k)]);
    return acc.value();
}

FastEngine::FastEngine(const CuspForm& form, const CharacterSplit& split, double eps,
                       double gamma_prec, const EvalConfig& cfg)
    : form_(&form), split_(split), eps_(eps), gamma_prec_(gamma_prec), cfg_(cfg) {
    if (!split_.chi_q.primitive())
        throw NonPrimitiveCharacter("fast engine requires a primitive character");
    if (split_.M > split_.N) throw InvalidSplit("M <= N required");
    // box side q^{-eps}, capped so in-box Taylor expansions stay inside the
    // convergence region of the lift (derivative growth R > 1 at desk scale)
    double q = static_cast<double>(split_.q);
    side_ = std::min(std::pow(q, -eps_), 0.045);
}

int FastEngine::default_degree() const {
    double q = static_cast<double>(split_.q);
    double eps_eff = std::log(1.0 / side_) / std::log(q);
    int d = static_cast<int>(std::ceil((gamma_prec_ + 2.0) * std::log(10.0) /
                                       (eps_eff * std::log(q))));
    return std::clamp(d, 1, 12);
}

std::size_t FastEngine::weight_id_for(std::int64_t c_res,
                                      const std::array<std::int64_t, 4>& gkey,
                                      const Mat2l& gamma) {
    auto key = std::make_pair(c_res, gkey);
    if (!disable_caches_) {
        auto it = weight_key_map_.find(key);
        if (it != weight_key_map_.end()) return it->second;
    }
    // base h for this residue, then compose with sigma_gamma
    OrbitWeightFunction h;
    if (split_.coprime_case())
        h = h_coprime(split_.chi_M2, split_.N, c_res);
    else if (split_.divides_case())
        h = h_divides(split_.b, split_.M, c_res);
    else
        h = h_mixed(split_.b, split_.M1, split_.chi_M2, split_.N, split_.M, c_res);
    auto perm = hecke::permutation(split_.M, gamma);
    // Sum_k h(1,k) g(A(1,k) gamma x) = Sum_u h(sigma^{-1}(u)) g(A(u) x), so the
    // composed weight at slot sigma(i) is h at slot i.
    OrbitWeightFunction composed;
    composed.M = split_.M;
    composed.values.assign(h.values.size(), cplx(0.0));
    for (std::size_t i = 0; i < h.values.size(); ++i)
        composed.values[static_cast<std::size_t>(perm->map[i])] = h.values[i];
    weights_.push_back(std::move(composed));
    std::size_t id = weights_.size() - 1;
    weight_key_map_[key] = id;
    return id;
}

void FastEngine::build_geometry(double t) {
    if (geom_t_ && *geom_t_ == t && !disable_caches_) return;
    geom_t_ = t;
    points_.clear();
    weights_.clear();
    weight_key_map_.clear();
    const std::int64_t N = split_.N, M = split_.M;
    double t1 = t + std::log(static_cast<double>(split_.q));
    Mat2 x0 = sl2::dilation(t1);
    std::vector<sl2::ReducedPoint> reduced;
    std::vector<std::int64_t> js;
    for (std::int64_t j = 0; j < N; ++j) {
        // S_j = 0 off the coprime classes in every case (outer character is 0
        // in the coprime case; the weights vanish identically otherwise)
        if (gcd64(j, N) != 1) continue;
        js.push_back(j);
    }
    points_.resize(js.size());
    parallel_for(js.size(), thread_count(threads_), [&](std::size_t i) {
        std::int64_t j = js[i];
        Mat2 vj = hecke::hecke_matrix(N, 1, j) * x0;
        PointData pd;
        pd.j = j;
        pd.red = sl2::reduce(vj);
        pd.red.source = i;
        points_[i] = std::move(pd);
    });
    // weight ids and outer factors (sequential: touches shared caches)
    for (std::size_t i = 0; i < points_.size(); ++i) {
        PointData& pd = points_[i];
        std::int64_t c = mod_pos(pd.j, M);
        const Mat2l& gamma = pd.red.gamma;
        std::array<std::int64_t, 4> gkey{mod_pos(gamma(0, 0), M), mod_pos(gamma(0, 1), M),
                                         mod_pos(gamma(1, 0), M), mod_pos(gamma(1, 1), M)};
        pd.weight_id = weight_id_for(c, gkey, gamma);
        pd.outer = split_.chi_M1N(pd.j);
    }
    std::vector<sl2::ReducedPoint> pts;
    pts.reserve(points_.size());
    for (auto& pd : points_) pts.push_back(pd.red);
    part_ = sl2::box_sort(pts, side_);
}

FastResult FastEngine::run(double t, int l, bool leading_dx, EvalCounter* counter) {
    const std::int64_t M = split_.M;
    FastResult out;
    if (M == 1) {
        // degenerate split: T(1) = {(1,0)}, same code path as the direct sum
        out.value = naive_orbit_sum(*form_, split_.chi_q, split_.q, t, l, cfg_, counter,
                                    leading_dx);
        out.degree = 0;
        out.box_side = side_;
        return out;
    }
    build_geometry(t);
    int d = taylor_degree_ > 0 ? taylor_degree_ : default_degree();
    d = std::min(d, 12 - l - (leading_dx ? 1 : 0));
    d = std::max(d, 0);
    out.degree = d;
    out.box_side = side_;
    out.boxes = part_.count();
    out.weight_ids = weights_.size();

    const auto index = hecke::index_set(M);
    const auto betas = multi_indices_up_to(d);
    const double residual_tol = std::pow(10.0, -gamma_prec_);

    std::vector<cplx> sj(points_.size(), cplx(0.0));
    std::vector<double> residuals(part_.count(), 0.0);
    std::vector<std::size_t> fallback_count(part_.count(), 0);
    std::vector<std::size_t> multi_flag(part_.count(), 0);

    // box keys in deterministic order
    std::vector<const std::vector<std::size_t>*> box_members;
    std::vector<std::size_t> box_reps;
    for (auto& [key, members] : part_.boxes) {
        box_members.push_back(&members);
        box_reps.push_back(part_.representatives.at(key));
    }

    parallel_for(box_members.size(), thread_count(threads_), [&](std::size_t bix) {
        const auto& members = *box_members[bix];
        std::size_t rep = box_reps[bix];
        auto direct = [&](std::size_t pix) {
            const PointData& pd = points_[pix];
            sj[pix] = j_sum(*form_, l, MultiIndex{}, weights_[pd.weight_id], pd.red.x, M, cfg_,
                            counter, leading_dx);
        };
        if ((members.size() == 1 && !force_jtables_) || d == 0) {
            for (std::size_t pix : members) direct(pix);
            return;
        }
        multi_flag[bix] = 1;
        if (disable_caches_) {
            // no shared derivative table: every member re-derives its J values
            // through j_sum calls at the representative
            const Mat2& xr0 = points_[rep].red.x;
            for (std::size_t pix : members) {
                const PointData& pd = points_[pix];
                TaylorStencil st = taylor_stencil(xr0, pd.red.x, d);
                TransferResult tr = taylor_transfer(st, [&](const MultiIndex& b) {
                    return j_sum(*form_, l, b, weights_[pd.weight_id], xr0, M, cfg_, counter,
                                 leading_dx);
                });
                double scale = 1.0 + std::abs(tr.value);
                if (tr.truncation_estimate > residual_tol * scale) {
                    ++fallback_count[bix];
                    direct(pix);
                } else {
                    sj[pix] = tr.value;
                    residuals[bix] = std::max(residuals[bix], tr.truncation_estimate / scale);
                }
            }
            return;
        }
        // derivative table at the representative: D[beta][(m,k)]; J(beta,r)
        // is then a dot product for every weight function in the box
        const Mat2& xr = points_[rep].red.x;
        std::vector<std::vector<cplx>> deriv(betas.size(),
                                             std::vector<cplx>(index.size(), cplx(0.0)));
        for (std::size_t p = 0; p < index.size(); ++p) {
            Mat2 pt = hecke::hecke_matrix(M, index[p].m, index[p].k) * xr;
            FlowEvalCache cache(*form_, pt, cfg_.fd_step, cfg_, counter);
            for (std::size_t b = 0; b < betas.size(); ++b)
                deriv[b][p] = word_derivative(cache, betas[b], l, leading_dx, counter);
        }
        // J values per weight id present in the box, lazily
        std::map<std::size_t, std::vector<cplx>> jtab;
        auto j_of = [&](std::size_t wid) -> const std::vector<cplx>& {
            auto it = jtab.find(wid);
            if (it != jtab.end()) return it->second;
            std::vector<cplx> row(betas.size());
            const auto& w = weights_[wid].values;
            for (std::size_t b = 0; b < betas.size(); ++b) {
                KahanSumC acc;
                for (std::size_t p = 0; p < index.size(); ++p)
                    if (w[p] != cplx(0.0)) acc.add(w[p] * deriv[b][p]);
                row[b] = acc.value();
            }
            return jtab.emplace(wid, std::move(row)).first->second;
        };
        std::map<std::pair<int, int>, std::size_t> beta_pos;
        for (std::size_t b = 0; b < betas.size(); ++b)
            beta_pos[{betas[b].b1 * 16 + betas[b].b2, betas[b].b3}] = b;
        for (std::size_t pix : members) {
            const PointData& pd = points_[pix];
            TaylorStencil st = taylor_stencil(xr, pd.red.x, d);
            const auto& jrow = j_of(pd.weight_id);
            TransferResult tr = taylor_transfer(st, [&](const MultiIndex& b) {
                return jrow[beta_pos.at({b.b1 * 16 + b.b2, b.b3})];
            });
            double scale = 1.0 + std::abs(tr.value);
            if (tr.truncation_estimate > residual_tol * scale) {
                ++fallback_count[bix];
                direct(pix);
            } else {
                sj[pix] = tr.value;
                residuals[bix] = std::max(residuals[bix],
                                          tr.truncation_estimate / scale);
            }
        }
    });

    for (std::size_t bix = 0; bix < box_members.size(); ++bix) {
        out.max_residual = std::max(out.max_residual, residuals[bix]);
        out.fallbacks += fallback_count[bix];
        out.multi_boxes += multi_flag[bix];
    }
    // outer character factors, fixed j order
    KahanSumC acc;
    for (std::size_t i = 0; i < points_.size(); ++i) acc.add(points_[i].outer * sj[i]);
    out.value = acc.value();
    return out;
}

FastResult fast_orbit_sum(const SumRequest& req, const EvalConfig& cfg, EvalCounter* counter) {
    if (!req.form) throw DomainError("missing form");
    FastEngine eng(*req.form, req.split, req.eps, req.gamma_prec, cfg);
    if (req.taylor_degree > 0) eng.set_taylor_degree(req.taylor_degree);
    eng.set_disable_caches(req.disable_caches);
    eng.set_force_jtables(req.force_jtables);
    eng.set_threads(req.threads);
    return eng.run(req.t, req.l, req.leading_dx, counter);
}

}  // namespace twistl
