#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "twistl/types.hpp"

namespace twistl::sl2 {

// Iwasawa coordinates of g = n(t) a(v) K(theta):
//   n(t) = [[1,t],[0,1]], a(v) = diag(e^{v/2}, e^{-v/2}),
//   K(theta) = [[cos,sin],[-sin,cos]], theta in (-pi, pi].
struct IwasawaCoords {
    double t = 0.0;
    double v = 0.0;
    double theta = 0.0;
};

Mat2 translation(double t);
Mat2 dilation(double v);
Mat2 rotation(double theta);

double det(const Mat2& g);
void require_unimodular(const Mat2& g, double tol = 1e-8);

// Mobius action of g on the upper half-plane.
cplx mobius(const Mat2& g, cplx z);

Mat2 from_iwasawa(const IwasawaCoords& c);
IwasawaCoords iwasawa_decompose(const Mat2& g);

// Iwasawa coordinates of x^{-1} y; these are the monomial variables of a
// power-series expansion of a function at x evaluated at y.
IwasawaCoords offset_coords(const Mat2& x, const Mat2& y);

// true iff all three coordinates of x^{-1}y are < eta in absolute value.
bool in_neighborhood(const Mat2& x, const Mat2& y, double eta);

struct ReducedPoint {
    Mat2l gamma;       // integral, det 1, original = gamma * x
    Mat2 x;            // representative near the standard fundamental domain
    IwasawaCoords xc;  // cached coordinates of x
    std::size_t source = 0;
};

// Translate/invert (Gauss reduction) until |Re| <= 1/2 and |z| >= 1 for the
// base point x*i. O(log) steps; gamma exact in 64-bit integers.
ReducedPoint reduce(const Mat2& g);

struct BoxPartition {
    double side = 0.0;   // neighborhood guarantee: same box => x^{-1}y in U_{2*side}
    double pitch = 0.0;  // grid pitch actually used for the floor keys (side/4)
    std::map<std::array<std::int64_t, 3>, std::vector<std::size_t>> boxes;
    std::map<std::array<std::int64_t, 3>, std::size_t> representatives;
    std::size_t count() const { return boxes.size(); }
};

// Sort reduced points into cubes of the coordinate grid. Keys are floor
// triples at pitch side/4 (the margin keeps the U_{2*side} guarantee valid
// under the nonlinear mixing of Iwasawa offsets); theta keys wrap mod 2*pi so
// boxes adjacent across the seam merge. Representative = lowest source index.
BoxPartition box_sort(const std::vector<ReducedPoint>& points, double eta);

}  // namespace twistl::sl2
