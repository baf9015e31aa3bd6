#include "twistl/sl2.hpp"

#include <algorithm>
#include <cmath>

#include "twistl/errors.hpp"

namespace twistl::sl2 {

Mat2 translation(double t) { return mat2(1, t, 0, 1); }

Mat2 dilation(double v) {
    double e = std::exp(v / 2.0);
    return mat2(e, 0, 0, 1.0 / e);
}

Mat2 rotation(double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    return mat2(c, s, -s, c);
}

double det(const Mat2& g) { return g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0); }

void require_unimodular(const Mat2& g, double tol) {
    if (std::abs(det(g) - 1.0) > tol) throw NonUnimodular("det != 1");
}

cplx mobius(const Mat2& g, cplx z) {
    return (g(0, 0) * z + g(0, 1)) / (g(1, 0) * z + g(1, 1));
}

Mat2 from_iwasawa(const IwasawaCoords& c) {
    double e = std::exp(c.v / 2.0);
    // n(t) a(v) = [[e, t/e],[0, 1/e]]
    Mat2 na = mat2(e, c.t / e, 0, 1.0 / e);
    return na * rotation(c.theta);
}

IwasawaCoords iwasawa_decompose(const Mat2& g) {
    require_unimodular(g);
    double c = g(1, 0), d = g(1, 1);
    double n2 = c * c + d * d;
    IwasawaCoords out;
    out.v = -std::log(n2);
    // bottom row of n a K(theta) is e^{-v/2} (-sin theta, cos theta)
    out.theta = -std::atan2(c, d);
    if (out.theta <= -pi) out.theta = pi;
    out.t = (g(0, 0) * c + g(0, 1) * d) / n2;
    return out;
}

IwasawaCoords offset_coords(const Mat2& x, const Mat2& y) {
    require_unimodular(x);
    require_unimodular(y);
    Mat2 xinv = mat2(x(1, 1), -x(0, 1), -x(1, 0), x(0, 0));
    return iwasawa_decompose(xinv * y);
}

bool in_neighborhood(const Mat2& x, const Mat2& y, double eta) {
    IwasawaCoords u = offset_coords(x, y);
    return std::abs(u.t) < eta && std::abs(u.v) < eta && std::abs(u.theta) < eta;
}

ReducedPoint reduce(const Mat2& g) {
    require_unimodular(g);
    cplx z = mobius(g, cplx(0.0, 1.0));
    if (!(z.imag() > 0.0)) throw NonUnimodular("base point not in the upper half-plane");
    Mat2l gamma = mat2l(1, 0, 0, 1);
    for (int iter = 0; iter < 256; ++iter) {
        double m = std::nearbyint(z.real());
        if (m != 0.0) {
            z -= m;
            // x <- n(-m) x, so gamma <- gamma n(m)
            auto mm = static_cast<std::int64_t>(m);
            gamma = gamma * mat2l(1, mm, 0, 1);
        }
        if (std::norm(z) < 1.0 - 1e-15) {
            z = -1.0 / z;
            // x <- S x with S = [[0,-1],[1,0]], so gamma <- gamma S^{-1}
            gamma = gamma * mat2l(0, 1, -1, 0);
        } else {
            break;
        }
    }
    ReducedPoint out;
    out.gamma = gamma;
    out.x = to_real(inverse_unimodular(gamma)) * g;
    out.xc = iwasawa_decompose(out.x);
    return out;
}

BoxPartition box_sort(const std::vector<ReducedPoint>& points, double eta) {
    if (eta <= 0) throw DomainError("box side must be positive");
    BoxPartition part;
    part.side = eta;
    part.pitch = eta / 4.0;
    const auto ncells = static_cast<std::int64_t>(std::floor(two_pi / part.pitch));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const IwasawaCoords& c = points[i].xc;
        double thn = c.theta < 0 ? c.theta + two_pi : c.theta;
        std::int64_t kt = static_cast<std::int64_t>(std::floor(c.t / part.pitch));
        std::int64_t kv = static_cast<std::int64_t>(std::floor(c.v / part.pitch));
        std::int64_t kth = 0;
        if (ncells >= 1) {
            kth = static_cast<std::int64_t>(std::floor(thn / part.pitch));
            kth = std::min(kth, ncells - 1);  // fold the partial seam cell
        }
        std::array<std::int64_t, 3> key{kt, kv, kth};
        auto& members = part.boxes[key];
        members.push_back(i);
        auto it = part.representatives.find(key);
        std::size_t src = points[i].source;
        if (it == part.representatives.end())
            part.representatives[key] = i;
        else if (points[it->second].source > src)
            it->second = i;
    }
    return part;
}

}  // namespace twistl::sl2
