#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace twistl {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;

// Points of SL(2,R) are plain dense 2x2 matrices; integer matrices carry the
// arithmetic (SL(2,Z)) side and are exact.
using Mat2 = Mat2T<double>;
using Mat2l = Mat2T<std::int64_t>;

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

// e(x) = exp(2*pi*i*x)
inline cplx unit_e(double x) { return {std::cos(two_pi * x), std::sin(two_pi * x)}; }

// e(num/den) with the phase reduced exactly in integers first.
inline cplx unit_e_frac(std::int64_t num, std::int64_t den) {
    num %= den;
    if (num < 0) num += den;
    return unit_e(static_cast<double>(num) / static_cast<double>(den));
}

inline Mat2 mat2(double a, double b, double c, double d) {
    Mat2 m;
    m << a, b, c, d;
    return m;
}

inline Mat2l mat2l(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    Mat2l m;
    m << a, b, c, d;
    return m;
}

inline Mat2 to_real(const Mat2l& m) { return m.cast<double>(); }

inline Mat2l inverse_unimodular(const Mat2l& m) {
    return mat2l(m(1, 1), -m(0, 1), -m(1, 0), m(0, 0));
}

// Neumaier-compensated accumulation; fixed-order sums stay reproducible.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class KahanSumC {
public:
    void add(const cplx& z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

// splitmix64: portable deterministic rng for property tests and `verify`.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double uniform() { return std::ldexp(static_cast<double>(next() >> 11), -53); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive range
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Extended gcd: returns g and x,y with a*x + b*y = g.
inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    if (b == 0) {
        x = (a >= 0) ? 1 : -1;
        y = 0;
        return std::abs(a);
    }
    std::int64_t x1, y1;
    std::int64_t g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

inline std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    a %= m;
    if (a < 0) a += m;
    return a;
}

inline std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
    std::int64_t x, y;
    std::int64_t g = ext_gcd(mod_pos(a, m), m, x, y);
    if (g != 1) return -1;
    return mod_pos(x, m);
}

inline std::int64_t mod_mul(std::int64_t a, std::int64_t b, std::int64_t m) {
    return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % m);
}

}  // namespace twistl
