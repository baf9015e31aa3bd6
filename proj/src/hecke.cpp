#include "twistl/hecke.hpp"

#include <algorithm>
#include <cmath>

#include "twistl/errors.hpp"

namespace twistl::hecke {

std::vector<HeckeIndex> index_set(std::int64_t L) {
    if (L < 1) throw InvalidIndex("L >= 1 required");
    std::vector<HeckeIndex> out;
    for (std::int64_t m = 1; m <= L; ++m) {
        if (L % m != 0) continue;
        for (std::int64_t k = 0; k < L / m; ++k) out.push_back({m, k});
    }
    return out;
}

IndexLookup::IndexLookup(std::int64_t L) : L_(L), set_(index_set(L)) {
    for (std::size_t i = 0; i < set_.size(); ++i) pos_[{set_[i].m, set_[i].k}] = i;
}

std::size_t IndexLookup::at(const HeckeIndex& idx) const {
    auto it = pos_.find({idx.m, idx.k});
    if (it == pos_.end()) throw InvalidIndex("index not in T(L)");
    return it->second;
}

Mat2 hecke_matrix(std::int64_t L, std::int64_t m, std::int64_t k) {
    if (L < 1 || m < 1 || L % m != 0 || k < 0 || k >= L / m)
        throw InvalidIndex("not an element of T(L)");
    double s = 1.0 / std::sqrt(static_cast<double>(L));
    return mat2(s * m, s * k, 0.0, s * (L / m));
}

NormalizeResult act_and_normalize(std::int64_t L, const HeckeIndex& idx, const Mat2l& a) {
    if (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) != 1) throw NonUnimodular("det a != 1");
    if (L % idx.m != 0 || idx.k < 0 || idx.k >= L / idx.m)
        throw InvalidIndex("not an element of T(L)");
    // B = [[m,k],[0,L/m]] * a, det B = L
    Mat2l B = mat2l(idx.m, idx.k, 0, L / idx.m) * a;
    // left SL(2,Z) reduction to [[m1,k1],[0,L/m1]]
    std::int64_t u = B(0, 0), v = B(1, 0);
    Mat2l C;
    if (v == 0) {
        C = mat2l(1, 0, 0, 1);
        if (u < 0) C = mat2l(-1, 0, 0, -1);
    } else {
        std::int64_t x, y;
        std::int64_t g = ext_gcd(u, v, x, y);  // u x + v y = g > 0
        // bottom row (-v/g, u/g), top row (x, y): det = x u/g + y v/g = 1
        C = mat2l(x, y, -v / g, u / g);
    }
    Mat2l Bp = C * B;
    if (Bp(1, 0) != 0) throw InvalidIndex("reduction failed");
    if (Bp(0, 0) < 0) {
        C = mat2l(-1, 0, 0, -1) * C;
        Bp = -Bp;
    }
    std::int64_t m1 = Bp(0, 0);
    std::int64_t lm1 = Bp(1, 1);
    if (m1 <= 0 || m1 * lm1 != L) throw InvalidIndex("normal form degenerate");
    // reduce k1 into [0, L/m1) by a left translation
    std::int64_t k1 = Bp(0, 1);
    std::int64_t r = k1 % lm1;
    if (r < 0) r += lm1;
    std::int64_t j = (r - k1) / lm1;
    if (j != 0) C = mat2l(1, j, 0, 1) * C;
    NormalizeResult out;
    out.idx = {m1, r};
    out.cofactor = C;
    return out;
}

namespace {

std::map<std::pair<std::int64_t, std::array<std::int64_t, 4>>,
         std::shared_ptr<const OrbitPermutation>>
    g_perm_cache;
std::mutex g_perm_mutex;

}  // namespace

std::shared_ptr<const OrbitPermutation> permutation(std::int64_t L, const Mat2l& a) {
    std::array<std::int64_t, 4> key{mod_pos(a(0, 0), L), mod_pos(a(0, 1), L),
                                    mod_pos(a(1, 0), L), mod_pos(a(1, 1), L)};
    {
        std::scoped_lock lk(g_perm_mutex);
        auto it = g_perm_cache.find({L, key});
        if (it != g_perm_cache.end()) return it->second;
    }
    IndexLookup lookup(L);
    auto perm = std::make_shared<OrbitPermutation>();
    perm->L = L;
    perm->key = key;
    perm->built_from = a;
    perm->map.resize(lookup.size());
    perm->cofactors.resize(lookup.size());
    for (std::size_t i = 0; i < lookup.size(); ++i) {
        NormalizeResult nr = act_and_normalize(L, lookup.set()[i], a);
        perm->map[i] = static_cast<std::int32_t>(lookup.at(nr.idx));
        perm->cofactors[i] = nr.cofactor;
    }
    std::scoped_lock lk(g_perm_mutex);
    auto [it, inserted] = g_perm_cache.emplace(std::make_pair(L, key), perm);
    return it->second;
}

std::size_t permutation_cache_size() {
    std::scoped_lock lk(g_perm_mutex);
    return g_perm_cache.size();
}

void permutation_cache_clear() {
    std::scoped_lock lk(g_perm_mutex);
    g_perm_cache.clear();
}

}  // namespace twistl::hecke
