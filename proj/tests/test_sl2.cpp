#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "twistl/errors.hpp"
#include "twistl/sl2.hpp"

using namespace twistl;
using namespace twistl::sl2;

namespace {

Mat2l random_gamma(SplitMix64& rng, int steps) {
    Mat2l a = mat2l(1, 0, 0, 1);
    for (int i = 0; i < steps; ++i) {
        a = a * mat2l(1, rng.integer(-3, 3), 0, 1) * mat2l(0, 1, -1, 0);
    }
    return a;
}

}  // namespace

TEST_CASE("from_iwasawa basic values") {
    Mat2 id = from_iwasawa({0, 0, 0});
    CHECK((id - mat2(1, 0, 0, 1)).cwiseAbs().maxCoeff() < 1e-15);
    Mat2 n3 = from_iwasawa({3, 0, 0});
    CHECK((n3 - mat2(1, 3, 0, 1)).cwiseAbs().maxCoeff() < 1e-15);
    Mat2 a2 = from_iwasawa({0, 2 * std::log(2.0), 0});
    CHECK((a2 - mat2(2, 0, 0, 0.5)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(det(from_iwasawa({0.7, -1.2, 2.0})) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("iwasawa_decompose basic and round trips") {
    auto c0 = iwasawa_decompose(mat2(1, 0, 0, 1));
    CHECK(std::abs(c0.t) < 1e-14);
    CHECK(std::abs(c0.v) < 1e-14);
    CHECK(std::abs(c0.theta) < 1e-14);
    auto c1 = iwasawa_decompose(mat2(1, 3, 0, 1));
    CHECK(c1.t == doctest::Approx(3.0));
    CHECK(std::abs(c1.v) < 1e-14);

    SplitMix64 rng(42);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        IwasawaCoords c{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-pi, pi)};
        Mat2 g = from_iwasawa(c);
        auto d = iwasawa_decompose(g);
        worst = std::max({worst, std::abs(d.t - c.t), std::abs(d.v - c.v),
                          std::abs(d.theta - c.theta)});
        // matrix-level round trip
        worst = std::max(worst, (from_iwasawa(d) - g).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-9);
    CHECK_THROWS_AS(iwasawa_decompose(mat2(2, 0, 0, 1)), NonUnimodular);
}

TEST_CASE("offset coords") {
    Mat2 x = from_iwasawa({0.3, 0.5, 1.0});
    auto zero = offset_coords(x, x);
    CHECK(std::abs(zero.t) < 1e-12);
    CHECK(std::abs(zero.v) < 1e-12);
    CHECK(std::abs(zero.theta) < 1e-12);

    auto u = offset_coords(x, x * translation(0.25));
    CHECK(u.t == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(u.v) < 1e-12);

    SplitMix64 rng(7);
    for (int i = 0; i < 50; ++i) {
        Mat2 a = from_iwasawa({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-pi, pi)});
        Mat2 b = from_iwasawa({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-pi, pi)});
        auto off = offset_coords(a, b);
        Mat2 ainv = mat2(a(1, 1), -a(0, 1), -a(1, 0), a(0, 0));
        CHECK((from_iwasawa(off) - ainv * b).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("offset group-law consistency near identity") {
    SplitMix64 rng(11);
    for (int i = 0; i < 100; ++i) {
        Mat2 x = from_iwasawa({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-pi, pi)});
        IwasawaCoords uc{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                         rng.uniform(-0.05, 0.05)};
        Mat2 u = from_iwasawa(uc);
        auto got = offset_coords(x, x * u);
        auto want = iwasawa_decompose(u);
        CHECK(std::abs(got.t - want.t) < 1e-10);
        CHECK(std::abs(got.v - want.v) < 1e-10);
        CHECK(std::abs(got.theta - want.theta) < 1e-10);
    }
}

TEST_CASE("in_neighborhood") {
    Mat2 x = from_iwasawa({0.1, 0.4, -0.3});
    CHECK(in_neighborhood(x, x, 0.01));
    double eta = 0.05;
    CHECK_FALSE(in_neighborhood(x, x * translation(2 * eta), eta));
    CHECK(in_neighborhood(x, x * dilation(eta / 2) * rotation(eta / 2), eta));
}

TEST_CASE("reduce basics") {
    auto r1 = reduce(from_iwasawa({0.1, 1.0, 0.0}));
    CHECK(r1.gamma == mat2l(1, 0, 0, 1));

    auto r2 = reduce(translation(5.0) * dilation(1.0));
    CHECK(r2.gamma == mat2l(1, 5, 0, 1));
    CHECK((r2.x - dilation(1.0)).cwiseAbs().maxCoeff() < 1e-12);

    // round trip and domain bounds
    SplitMix64 rng(13);
    for (int i = 0; i < 200; ++i) {
        Mat2 g = from_iwasawa({rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-pi, pi)});
        auto rp = reduce(g);
        CHECK((to_real(rp.gamma) * rp.x - g).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(rp.xc.t) <= 1.0);
        CHECK(rp.xc.v >= -1.0);
    }
}

TEST_CASE("reduce matches brute-force maximal height near the cusp") {
    for (std::int64_t q = 2; q <= 5; ++q) {
        // base point i/q^2
        double y0 = 1.0 / double(q * q);
        Mat2 g = dilation(std::log(y0));
        auto rp = reduce(g);
        double got = std::exp(rp.xc.v);
        // brute force over gamma = [[a,b],[c,d]] with bounded entries
        double best = 0;
        std::int64_t B = q * q;
        cplx z(0.0, y0);
        for (std::int64_t c = -B; c <= B; ++c)
            for (std::int64_t d = -B; d <= B; ++d) {
                if (gcd64(c, d) != 1) continue;
                double im = y0 / std::norm(cplx(double(d), 0) + double(c) * z);
                best = std::max(best, im);
            }
        CHECK(got == doctest::Approx(best).epsilon(1e-9));
        CHECK(rp.xc.v >= -1.0);
    }
}

TEST_CASE("reduce is Gamma-stable") {
    SplitMix64 rng(17);
    for (int i = 0; i < 100; ++i) {
        Mat2 g = from_iwasawa({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-pi, pi)});
        Mat2l gam = random_gamma(rng, 3);
        auto r1 = reduce(g);
        auto r2 = reduce(to_real(gam) * g);
        CHECK((r1.x - r2.x).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("box_sort") {
    std::vector<ReducedPoint> one(1);
    one[0].x = from_iwasawa({0.2, 0.3, 0.4});
    one[0].xc = {0.2, 0.3, 0.4};
    one[0].source = 0;
    auto p1 = box_sort(one, 0.1);
    CHECK(p1.count() == 1);
    CHECK(p1.representatives.begin()->second == 0);

    std::vector<ReducedPoint> two(2, one[0]);
    two[1].source = 1;
    auto p2 = box_sort(two, 0.1);
    CHECK(p2.count() == 1);
    CHECK(p2.boxes.begin()->second.size() == 2);

    SplitMix64 rng(23);
    std::vector<ReducedPoint> pts;
    for (int i = 0; i < 100; ++i) {
        IwasawaCoords c{rng.uniform(-1, 1), rng.uniform(-1, 4), rng.uniform(-pi, pi)};
        ReducedPoint rp;
        rp.x = from_iwasawa(c);
        rp.xc = c;
        rp.source = i;
        pts.push_back(rp);
    }
    double eta = 0.1;
    auto part = box_sort(pts, eta);
    std::size_t total = 0;
    std::vector<int> seen(pts.size(), 0);
    for (auto& [key, members] : part.boxes) {
        total += members.size();
        for (auto m : members) seen[m]++;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                CHECK(in_neighborhood(pts[members[a]].x, pts[members[b]].x, 2 * eta));
    }
    CHECK(total == pts.size());
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("box_sort theta seam merges") {
    // two points straddling theta = pi
    ReducedPoint a, b;
    a.xc = {0.0, 0.0, pi - 0.001};
    a.x = from_iwasawa(a.xc);
    a.source = 0;
    b.xc = {0.0, 0.0, -pi + 0.001};
    b.x = from_iwasawa(b.xc);
    b.source = 1;
    auto part = box_sort({a, b}, 0.1);
    CHECK(part.count() == 1);
}
