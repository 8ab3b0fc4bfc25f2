#include "fembem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fembem {

namespace {

// Newton iteration on the Legendre polynomial; standard Golub-Welsch-free
// construction, accurate to machine precision for the orders used here.
GaussRule compute_gauss(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), derivative from the recurrence
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

namespace {

TriangleRule make_rule(int degree) {
    TriangleRule r;
    r.degree = degree;
    auto orbit1 = [&](double w) { r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w}); };
    auto orbit3 = [&](double a, double w) {
        double b = 0.5 * (1.0 - a);
        r.points.push_back({a, b, b, w});
        r.points.push_back({b, a, b, w});
        r.points.push_back({b, b, a, w});
    };
    switch (degree) {
    case 1:
        orbit1(1.0);
        break;
    case 2:
        orbit3(2.0 / 3.0, 1.0 / 3.0);
        break;
    case 4:
        // Dunavant 6-point rule
        orbit3(0.108103018168070, 0.223381589678011);
        orbit3(0.816847572980459, 0.109951743655322);
        break;
    case 5:
        // Dunavant 7-point rule
        orbit1(0.225);
        orbit3(0.059715871789770, 0.132394152788506);
        orbit3(0.797426985353087, 0.125939180544827);
        break;
    default:
        throw std::invalid_argument("triangle_rule: no rule of that degree");
    }
    return r;
}

} // namespace

const TriangleRule& triangle_rule(int degree) {
    static const TriangleRule d1 = make_rule(1);
    static const TriangleRule d2 = make_rule(2);
    static const TriangleRule d4 = make_rule(4);
    static const TriangleRule d5 = make_rule(5);
    if (degree <= 1) return d1;
    if (degree <= 2) return d2;
    if (degree <= 4) return d4;
    if (degree <= 5) return d5;
    throw std::invalid_argument("triangle_rule: degree > 5 not shipped");
}

} // namespace fembem
