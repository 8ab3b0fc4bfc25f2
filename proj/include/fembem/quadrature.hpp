#pragma once

#include <array>
#include <vector>

namespace fembem {

// Gauss-Legendre rule on [-1,1]; nodes/weights computed once per order and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// Symmetric Gauss rules on the reference triangle, given as barycentric
// coordinates with weights summing to one (multiply by |T|).
struct TriangleRule {
    struct Pt {
        double l0, l1, l2;
        double w;
    };
    std::vector<Pt> points;
    int degree; // exact for polynomials up to this degree
};

// smallest shipped rule that integrates polynomials of the requested degree
// exactly (degrees 1..5)
const TriangleRule& triangle_rule(int degree);

} // namespace fembem
