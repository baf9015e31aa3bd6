#include "twistl/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "twistl/errors.hpp"

namespace twistl {

namespace {

std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t m) {
    std::int64_t r = 1 % m;
    b = mod_pos(b, m);
    while (e > 0) {
        if (e & 1) r = mod_mul(r, b, m);
        b = mod_mul(b, b, m);
        e >>= 1;
    }
    return r;
}

std::int64_t least_primitive_root(std::int64_t p, std::int64_t pe, std::int64_t phi) {
    auto fac = factorize(phi);
    for (std::int64_t g = 2; g < pe; ++g) {
        if (g % p == 0) continue;
        bool ok = true;
        for (auto& [f, e] : fac)
            if (pow_mod(g, phi / f, pe) == 1) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    throw DomainError("no primitive root found");
}

CharComponent make_component(std::int64_t p, int e, std::int64_t label) {
    CharComponent c;
    c.prime = p;
    c.power = e;
    c.pe = 1;
    for (int i = 0; i < e; ++i) c.pe *= p;
    c.phi = c.pe / p * (p - 1);
    std::int64_t a = mod_pos(label, c.pe);
    if (p == 2) {
        if (e == 1) return c;  // only the principal character mod 2
        if (e == 2) {
            c.exp_eps = (a == 3) ? 1 : 0;
            return c;
        }
        // tables over odd residues: n = (-1)^eps 5^iota mod 2^e
        std::int64_t half = c.pe / 4;  // order of 5
        c.ind.assign(c.pe, -1);
        c.eps_tab.assign(c.pe, 0);
        std::int64_t v = 1;
        for (std::int64_t i = 0; i < half; ++i) {
            c.ind[v] = static_cast<std::int32_t>(i);
            c.eps_tab[v] = 0;
            std::int64_t w = c.pe - v;  // -v
            c.ind[w] = static_cast<std::int32_t>(i);
            c.eps_tab[w] = 1;
            v = mod_mul(v, 5, c.pe);
        }
        c.exp_eps = c.eps_tab[a];
        c.exp_a = c.ind[a];
        return c;
    }
    c.gen = least_primitive_root(p, c.pe, c.phi);
    c.ind.assign(c.pe, -1);
    std::int64_t v = 1;
    for (std::int64_t i = 0; i < c.phi; ++i) {
        c.ind[v] = static_cast<std::int32_t>(i);
        v = mod_mul(v, c.gen, c.pe);
    }
    c.exp_a = c.ind[a];
    return c;
}

cplx component_value(const CharComponent& c, std::int64_t n) {
    std::int64_t m = mod_pos(n, c.pe);
    if (c.prime == 0) return 1.0;  // modulus 1
    if (m % c.prime == 0) return 0.0;
    if (c.prime == 2) {
        if (c.power == 1) return 1.0;
        if (c.power == 2) return (c.exp_eps && m == 3) ? -1.0 : 1.0;
        std::int64_t half = c.pe / 4;
        // e(eps_a*eps_n/2 + a*iota_n/2^{e-2}) over the common denominator 2*half
        std::int64_t num = c.exp_eps * c.eps_tab[m] * half + 2 * c.exp_a * c.ind[m];
        return unit_e_frac(num, 2 * half);
    }
    return unit_e_frac(c.exp_a * c.ind[m], c.phi);
}

bool component_primitive(const CharComponent& c) {
    if (c.prime == 0) return true;  // modulus 1 is primitive by convention
    if (c.prime == 2) {
        if (c.power == 1) return false;
        if (c.power == 2) return c.exp_eps == 1;
        return (c.exp_a % 2) == 1;
    }
    if (c.power == 1) return c.exp_a != 0;
    return c.exp_a % c.prime != 0;
}

}  // namespace

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

int DirichletCharacter::parity() const {
    cplx v = (*this)(-1);
    return v.real() > 0 ? 1 : -1;
}

cplx DirichletCharacter::operator()(std::int64_t n) const {
    cplx out = 1.0;
    for (const auto& c : comps_) {
        cplx v = component_value(c, n);
        if (v == cplx(0.0)) return 0.0;
        out *= v;
    }
    return out;
}

cplx DirichletCharacter::eval(std::int64_t n, EvalCounter* counter) const {
    if (counter) counter->char_evals.fetch_add(1, std::memory_order_relaxed);
    return (*this)(n);
}

DirichletCharacter char_from_label(std::int64_t q, std::int64_t label) {
    if (q < 1) throw InvalidLabel("modulus must be positive");
    label = mod_pos(label, q);
    if (q == 1) label = 1;
    if (gcd64(label, q) != 1) throw InvalidLabel("label not coprime to modulus");
    DirichletCharacter chi;
    chi.q_ = q;
    chi.label_ = label == 0 ? 1 : label;
    for (auto& [p, e] : factorize(q)) chi.comps_.push_back(make_component(p, e, label));
    chi.primitive_ = true;
    for (const auto& c : chi.comps_) chi.primitive_ = chi.primitive_ && component_primitive(c);
    return chi;
}

DirichletCharacter char_from_components(const std::vector<CharComponent>& comps) {
    DirichletCharacter chi;
    for (const auto& c : comps) {
        chi.q_ *= c.pe;
        chi.comps_.push_back(c);
    }
    // CRT-combine the label: label ≡ a_c (mod p^e) per component
    std::int64_t label = 0;
    for (const auto& c : comps) {
        std::int64_t a_c = 1;
        if (c.prime == 2 && c.power == 2)
            a_c = c.exp_eps ? 3 : 1;
        else if (c.prime == 2 && c.power >= 3)
            a_c = mod_mul(pow_mod(c.pe - 1, c.exp_eps, c.pe), pow_mod(5, c.exp_a, c.pe), c.pe);
        else if (c.prime > 2)
            a_c = pow_mod(c.gen, c.exp_a, c.pe);
        std::int64_t rest = chi.q_ / c.pe;
        std::int64_t u = mod_inverse(rest % c.pe, c.pe);
        label = mod_pos(label + mod_mul(mod_mul(a_c, u, chi.q_), rest, chi.q_), chi.q_);
    }
    chi.label_ = chi.q_ == 1 ? 1 : label;
    chi.primitive_ = true;
    for (const auto& c : chi.comps_) chi.primitive_ = chi.primitive_ && component_primitive(c);
    return chi;
}

DirichletCharacter conjugate(const DirichletCharacter& chi) {
    std::int64_t q = chi.modulus();
    if (q <= 2) return chi;
    std::int64_t inv = mod_inverse(chi.label(), q);
    return char_from_label(q, inv);
}

cplx gauss_sum_direct(const DirichletCharacter& chi) {
    std::int64_t q = chi.modulus();
    KahanSumC acc;
    for (std::int64_t k = 0; k < q; ++k) {
        cplx c = chi(k);
        if (c != cplx(0.0)) acc.add(c * unit_e_frac(k, q));
    }
    if (q == 1) return 1.0;
    return acc.value();
}

cplx gauss_sum(const DirichletCharacter& chi) {
    std::int64_t q = chi.modulus();
    if (q == 1) return 1.0;
    // per-component tau by direct summation over p^e terms
    cplx tau = 1.0;
    std::int64_t q_done = 1;
    std::vector<CharComponent> done_comps;
    for (const auto& c : chi.components()) {
        std::vector<CharComponent> single{c};
        DirichletCharacter comp_chi = char_from_components(single);
        cplx tau_c = gauss_sum_direct(comp_chi);
        if (q_done == 1) {
            tau = tau_c;
        } else {
            DirichletCharacter prev = char_from_components(done_comps);
            tau = prev(c.pe) * comp_chi(q_done) * tau * tau_c;
        }
        done_comps.push_back(c);
        q_done *= c.pe;
    }
    return tau;
}

CharacterSplit split_character(const DirichletCharacter& chi, std::int64_t M, std::int64_t N) {
    if (M < 1 || N < 1 || M * N != chi.modulus()) throw InvalidSplit("q != M*N");
    CharacterSplit s;
    s.q = chi.modulus();
    s.M = M;
    s.N = N;
    s.chi_q = chi;
    // move all prime content of M shared with N into M1
    s.M1 = 1;
    for (auto& [p, e] : factorize(M)) {
        if (N % p == 0) {
            std::int64_t pe = 1;
            for (int i = 0; i < e; ++i) pe *= p;
            s.M1 *= pe;
        }
    }
    s.M2 = M / s.M1;
    if (gcd64(s.M2, N) != 1) throw NonFactorable("prime content of M2 shared with N");
    if (s.M1 > 1 && N % s.M1 != 0) throw NonFactorable("M1 does not divide N");
    // regroup CRT components: primes of M2 vs all others
    std::vector<CharComponent> m2_comps, m1n_comps;
    for (const auto& c : chi.components()) {
        if (s.M2 % c.prime == 0)
            m2_comps.push_back(c);
        else
            m1n_comps.push_back(c);
    }
    s.chi_M2 = char_from_components(m2_comps);
    s.chi_M1N = char_from_components(m1n_comps);
    if (s.chi_M2.modulus() != s.M2 || s.chi_M1N.modulus() != s.M1 * N)
        throw InvalidSplit("component regrouping failed");
    // b with chi_M1N(1 + kN) = e(b k / M1)
    s.b = 0;
    if (s.M1 > 1) {
        cplx f1 = s.chi_M1N(1 + N);
        double angle = std::atan2(f1.imag(), f1.real()) / two_pi;
        s.b = mod_pos(std::llround(angle * s.M1), s.M1);
        for (std::int64_t k = 0; k < s.M1; ++k) {
            cplx lhs = s.chi_M1N(1 + k * N);
            cplx rhs = unit_e_frac(s.b * k, s.M1);
            if (std::abs(lhs - rhs) > 1e-9)
                throw InvalidSplit("b-identity verification failed");
        }
    }
    // product identity spot-check at construction
    SplitMix64 rng(0x5eedu);
    for (int i = 0; i < 64; ++i) {
        std::int64_t n = rng.integer(0, s.q - 1);
        cplx lhs = chi(n);
        cplx rhs = s.chi_M2(n) * s.chi_M1N(n);
        if (std::abs(lhs - rhs) > 1e-11) throw InvalidSplit("CRT product identity failed");
    }
    return s;
}

std::int64_t first_primitive_label(std::int64_t q, std::int64_t from) {
    for (std::int64_t a = std::max<std::int64_t>(1, from); a <= q; ++a) {
        if (gcd64(a, q) != 1) continue;
        if (char_from_label(q, a).primitive()) return a;
    }
    for (std::int64_t a = 1; a <= q; ++a) {
        if (gcd64(a, q) != 1) continue;
        if (char_from_label(q, a).primitive()) return a;
    }
    throw InvalidLabel("no primitive character for this modulus");
}

}  // namespace twistl
