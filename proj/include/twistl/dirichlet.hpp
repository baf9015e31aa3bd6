#pragma once

#include <cstdint>
#include <vector>

#include "twistl/counters.hpp"
#include "twistl/types.hpp"

namespace twistl {

// One CRT factor p^e of the modulus, with discrete-log tables.
// Odd p: (Z/p^e)* = <g>, value on n is e(a*ind(n)/phi).
// p=2, e>=3: (Z/2^e)* = <-1> x <5>, n = (-1)^eps 5^iota.
struct CharComponent {
    std::int64_t prime = 0;
    int power = 0;
    std::int64_t pe = 1;    // prime^power
    std::int64_t phi = 1;
    std::int64_t gen = 0;   // least primitive root (odd p)
    std::int64_t exp_a = 0; // Conrey exponent of the label (odd p / the 5-part for p=2)
    std::int64_t exp_eps = 0;  // p=2: the (-1)-part exponent of the label
    std::vector<std::int32_t> ind;      // dlog table; -1 for non-units
    std::vector<std::int32_t> eps_tab;  // p=2,e>=3
};

class DirichletCharacter {
public:
    DirichletCharacter() = default;  // modulus 1 (everywhere 1)

    std::int64_t modulus() const { return q_; }
    std::int64_t label() const { return label_; }
    bool primitive() const { return primitive_; }
    int parity() const;  // chi(-1) as +1/-1

    cplx operator()(std::int64_t n) const;
    cplx eval(std::int64_t n, EvalCounter* counter) const;

    const std::vector<CharComponent>& components() const { return comps_; }

    friend DirichletCharacter char_from_label(std::int64_t q, std::int64_t label);
    friend DirichletCharacter char_from_components(const std::vector<CharComponent>& comps);

private:
    std::int64_t q_ = 1;
    std::int64_t label_ = 1;
    bool primitive_ = false;
    std::vector<CharComponent> comps_;
};

// Conrey character chi_q(label, .); gcd(label, q) = 1.
DirichletCharacter char_from_label(std::int64_t q, std::int64_t label);

DirichletCharacter conjugate(const DirichletCharacter& chi);

inline cplx eval_char(const DirichletCharacter& chi, std::int64_t n) { return chi(n); }

// tau(chi) = sum_k chi(k) e(k/q), via prime-power factors and the CRT twist
// tau(chi1 chi2) = chi1(q2) chi2(q1) tau(chi1) tau(chi2).
cplx gauss_sum(const DirichletCharacter& chi);

// direct O(q) reference
cplx gauss_sum_direct(const DirichletCharacter& chi);

// chi_q = chi_M2 * chi_M1N with q = MN, M = M1*M2, M1 | N, gcd(M2, N) = 1,
// and chi_M1N(1 + kN) = e(b k / M1).
struct CharacterSplit {
    std::int64_t q = 1, M = 1, N = 1, M1 = 1, M2 = 1;
    std::int64_t b = 0;
    DirichletCharacter chi_q;
    DirichletCharacter chi_M2;
    DirichletCharacter chi_M1N;
    bool coprime_case() const { return M1 == 1; }
    bool divides_case() const { return M2 == 1; }
};

CharacterSplit split_character(const DirichletCharacter& chi, std::int64_t M, std::int64_t N);

// smallest-first prime factorization
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n);

// first primitive label for modulus q at or after `from` (throws if none)
std::int64_t first_primitive_label(std::int64_t q, std::int64_t from = 2);

}  // namespace twistl
