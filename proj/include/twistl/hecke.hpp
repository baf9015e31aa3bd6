#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "twistl/types.hpp"

namespace twistl::hecke {

struct HeckeIndex {
    std::int64_t m = 1, k = 0;
    bool operator==(const HeckeIndex&) const = default;
};

// T(L) = {(m,k): m|L, 0 <= k < L/m}, lexicographic; |T(L)| = sigma(L)
std::vector<HeckeIndex> index_set(std::int64_t L);

// position of (m,k) within index_set(L) order
class IndexLookup {
public:
    explicit IndexLookup(std::int64_t L);
    std::size_t at(const HeckeIndex& idx) const;
    std::size_t size() const { return set_.size(); }
    const std::vector<HeckeIndex>& set() const { return set_; }

private:
    std::int64_t L_;
    std::vector<HeckeIndex> set_;
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> pos_;
};

// A(L,m,k) = L^{-1/2} [[m,k],[0,L/m]]
Mat2 hecke_matrix(std::int64_t L, std::int64_t m, std::int64_t k);

struct NormalizeResult {
    HeckeIndex idx;     // (m1,k1) with m1 > 0, 0 <= k1 < L/m1
    Mat2l cofactor;     // integral, det 1, cofactor * [[m,k],[0,L/m]] * a = [[m1,k1],[0,L/m1]]
};

// Left-reduce [[m,k],[0,L/m]]*a by SL(2,Z) to Hermite form; exact integers.
NormalizeResult act_and_normalize(std::int64_t L, const HeckeIndex& idx, const Mat2l& a);

struct OrbitPermutation {
    std::int64_t L = 1;
    std::array<std::int64_t, 4> key{};      // a mod L
    std::vector<std::int32_t> map;          // position -> position in index_set order
    std::vector<Mat2l> cofactors;           // certifying matrices for the a that built this
    Mat2l built_from;                       // that a
};

std::shared_ptr<const OrbitPermutation> permutation(std::int64_t L, const Mat2l& a);

// cache statistics / reset (tests)
std::size_t permutation_cache_size();
void permutation_cache_clear();

}  // namespace twistl::hecke
