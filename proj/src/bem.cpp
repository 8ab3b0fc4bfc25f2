#include "fembem/bem.hpp"

#include <cmath>
#include <stdexcept>

#include "fembem/quadrature.hpp"

namespace fembem {

namespace {

constexpr double kPi = 3.14159265358979323846;

// The singular Galerkin integrals are reduced to antiderivatives of
// log-quadratics and inverse quadratics via the substitution (s,t) =
// rho (1, w) on the two triangles {t <= s} and {s < t} of the parameter
// square. All quadratics below are q(w) = B^2 w^2 - 2ABc w + A^2 with
// A, B > 0 and c = cos of the opening angle, so q is positive definite
// for |c| < 1.

// int_0^1 log(q(w)) dw
double log_quadratic_integral(double A, double B, double c) {
    double s2 = 1.0 - c * c;
    if (s2 > 1e-24) {
        double mu = A * c / B;
        double nu = A * std::sqrt(s2);
        auto F = [&](double w) {
            double q = (B * w - A * c) * (B * w - A * c) + nu * nu;
            return (w - mu) * std::log(q) - 2.0 * w + 2.0 * (nu / B) * std::atan(B * (w - mu) / nu);
        };
        return F(1.0) - F(0.0);
    }
    if (c < 0.0) { // collinear, opening angle pi: q = (Bw + A)^2
        auto G = [&](double w) {
            double u = B * w + A;
            return (u / B) * (std::log(u) - 1.0);
        };
        return 2.0 * (G(1.0) - G(0.0));
    }
    throw std::runtime_error("degenerate geometry");
}

// int_0^1 dw / q(w)
double inv_quadratic_integral(double A, double B, double c) {
    double s2 = 1.0 - c * c;
    if (s2 > 1e-24) {
        double s = std::sqrt(s2);
        return (std::atan((B - A * c) / (A * s)) + std::atan(c / s)) / (A * B * s);
    }
    if (c < 0.0) return 1.0 / (A * (A + B));
    throw std::runtime_error("degenerate geometry");
}

// int_0^1 w dw / q(w)
double w_inv_quadratic_integral(double A, double B, double c) {
    double s2 = 1.0 - c * c;
    if (s2 > 1e-24) {
        double q1 = A * A - 2.0 * A * B * c + B * B;
        return std::log(q1 / (A * A)) / (2.0 * B * B) +
               (A * c / B) * inv_quadratic_integral(A, B, c);
    }
    if (c < 0.0)
        return (std::log((A + B) / A) + A / (A + B) - 1.0) / (B * B);
    throw std::runtime_error("degenerate geometry");
}

struct Seg {
    Point2 a, b;
    Point2 dir;   // unit a -> b
    Point2 normal;
    double h;
};

Seg make_seg(const BoundarySegment& s) {
    Seg g;
    g.a = s.a;
    g.b = s.b;
    g.h = s.length;
    g.dir = (1.0 / s.length) * (s.b - s.a);
    g.normal = s.normal;
    return g;
}

bool same_point(Point2 p, Point2 q) { return p.x == q.x && p.y == q.y; }

// -1 if disjoint, otherwise index pair (ei, ej) of the shared endpoints:
// 0 = a, 1 = b of each segment
int shared_vertex(const Seg& e1, const Seg& e2, int& i1, int& i2) {
    Point2 p1[2] = {e1.a, e1.b};
    Point2 p2[2] = {e2.a, e2.b};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (same_point(p1[i], p2[j])) {
                i1 = i;
                i2 = j;
                return 1;
            }
    return 0;
}

int pair_gauss_order(const Seg& e1, const Seg& e2) {
    double d = segment_segment_distance(e1.a, e1.b, e2.a, e2.b);
    return d > 0.5 * (e1.h + e2.h) ? 8 : 16;
}

// single layer entry for two distinct, non-touching segments by tensor Gauss
double slp_gauss(const Seg& e1, const Seg& e2) {
    int n = pair_gauss_order(e1, e2);
    const GaussRule& g = gauss_legendre(n);
    double acc = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        double s = 0.5 * (g.nodes[i] + 1.0) * e1.h;
        Point2 x = e1.a + s * e1.dir;
        for (size_t j = 0; j < g.nodes.size(); ++j) {
            double t = 0.5 * (g.nodes[j] + 1.0) * e2.h;
            Point2 y = e2.a + t * e2.dir;
            acc += g.weights[i] * g.weights[j] * std::log(dist(x, y));
        }
    }
    return -acc * e1.h * e2.h / (4.0 * 2.0 * kPi);
}

// single layer entry for segments sharing one vertex, by closed form
double slp_shared(const Seg& e1, int i1, const Seg& e2, int i2) {
    Point2 d1 = (i1 == 0) ? e1.dir : -1.0 * e1.dir;
    Point2 d2 = (i2 == 0) ? e2.dir : -1.0 * e2.dir;
    double c = dot(d1, d2);
    if (c > 1.0 - 1e-12) throw std::runtime_error("degenerate geometry");
    double h1 = e1.h, h2 = e2.h;
    double ilog = h1 * h2 *
                  (-0.5 + 0.25 * (log_quadratic_integral(h1, h2, c) +
                                  log_quadratic_integral(h2, h1, c)));
    return -ilog / (2.0 * kPi);
}

double slp_identical(double h) { return h * h / (2.0 * kPi) * (1.5 - std::log(h)); }

// double layer contributions of one segment pair; the source density is P1,
// w_shared goes to the column of the vertex named by i2 logic below
struct DlpPair {
    double to_a = 0.0; // column of source endpoint a
    double to_b = 0.0; // column of source endpoint b
};

DlpPair dlp_gauss(const Seg& e1, const Seg& e2) {
    int n = pair_gauss_order(e1, e2);
    const GaussRule& g = gauss_legendre(n);
    DlpPair out;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        double s = 0.5 * (g.nodes[i] + 1.0) * e1.h;
        Point2 x = e1.a + s * e1.dir;
        for (size_t j = 0; j < g.nodes.size(); ++j) {
            double t = 0.5 * (g.nodes[j] + 1.0) * e2.h;
            Point2 y = e2.a + t * e2.dir;
            Point2 r = y - x;
            double kern = -dot(r, e2.normal) / (2.0 * kPi * dot(r, r));
            double w = g.weights[i] * g.weights[j] * kern * e1.h * e2.h / 4.0;
            double lam = t / e2.h;
            out.to_a += w * (1.0 - lam);
            out.to_b += w * lam;
        }
    }
    return out;
}

DlpPair dlp_shared(const Seg& e1, int i1, const Seg& e2, int i2) {
    Point2 d1 = (i1 == 0) ? e1.dir : -1.0 * e1.dir;
    Point2 d2 = (i2 == 0) ? e2.dir : -1.0 * e2.dir;
    double c = dot(d1, d2);
    if (c > 1.0 - 1e-12) throw std::runtime_error("degenerate geometry");
    double kappa = dot(d1, e2.normal);
    DlpPair out;
    if (std::abs(kappa) < 1e-14) return out; // collinear pair: kernel vanishes
    double h1 = e1.h, h2 = e2.h;
    // P0f = int int s/q, P1f = int int (t/h2) s/q over (0,h1)x(0,h2)
    double p0 = h1 * h2 * h1 *
                (inv_quadratic_integral(h1, h2, c) + w_inv_quadratic_integral(h2, h1, c));
    double p1 = h1 * h2 * 0.5 * h1 *
                (w_inv_quadratic_integral(h1, h2, c) + w_inv_quadratic_integral(h2, h1, c));
    double far = kappa / (2.0 * kPi) * p1;          // hat at the far source end
    double near = kappa / (2.0 * kPi) * (p0 - p1);  // hat at the shared vertex
    if (i2 == 0) { // shared vertex is source endpoint a
        out.to_a = near;
        out.to_b = far;
    } else {
        out.to_b = near;
        out.to_a = far;
    }
    return out;
}

void check_not_coincident(const Seg& e1, const Seg& e2) {
    if ((same_point(e1.a, e2.a) && same_point(e1.b, e2.b)) ||
        (same_point(e1.a, e2.b) && same_point(e1.b, e2.a)))
        throw std::runtime_error("degenerate geometry");
}

} // namespace

DenseMatrix assemble_single_layer(const BemSpacePair& pair) {
    const auto& segs = pair.boundary->segments;
    const int n = pair.n_flux();
    DenseMatrix v(n, n);
    std::vector<Seg> s(segs.size());
    for (int i = 0; i < n; ++i) s[i] = make_seg(segs[i]);
    for (int i = 0; i < n; ++i) {
        v(i, i) = slp_identical(s[i].h);
        for (int j = i + 1; j < n; ++j) {
            check_not_coincident(s[i], s[j]);
            int i1, i2;
            double entry;
            if (shared_vertex(s[i], s[j], i1, i2))
                entry = slp_shared(s[i], i1, s[j], i2);
            else
                entry = slp_gauss(s[i], s[j]);
            v(i, j) = entry;
            v(j, i) = entry;
        }
    }
    return v;
}

DenseMatrix assemble_double_layer(const BemSpacePair& pair) {
    const auto& segs = pair.boundary->segments;
    const int n = pair.n_flux();
    DenseMatrix k = DenseMatrix::Zero(n, pair.n_trace());
    std::vector<Seg> s(segs.size());
    for (int i = 0; i < n; ++i) s[i] = make_seg(segs[i]);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue; // same straight segment: (y-x).n = 0
            check_not_coincident(s[i], s[j]);
            int i1, i2;
            DlpPair p;
            if (shared_vertex(s[i], s[j], i1, i2))
                p = dlp_shared(s[i], i1, s[j], i2);
            else
                p = dlp_gauss(s[i], s[j]);
            k(i, segs[j].ta) += p.to_a;
            k(i, segs[j].tb) += p.to_b;
        }
    }
    return k;
}

TraceCoupling assemble_trace_coupling(const BemSpacePair& pair, int n_volume_dofs) {
    const auto& segs = pair.boundary->segments;
    const int n = pair.n_flux();
    TraceCoupling tc;
    tc.m_gamma = DenseMatrix::Zero(n, pair.n_trace());
    std::vector<Eigen::Triplet<double>> trips;
    for (int e = 0; e < n; ++e) {
        double half = 0.5 * segs[e].length;
        tc.m_gamma(e, segs[e].ta) += half;
        tc.m_gamma(e, segs[e].tb) += half;
        trips.emplace_back(segs[e].va, e, half);
        trips.emplace_back(segs[e].vb, e, half);
    }
    tc.C.resize(n_volume_dofs, n);
    tc.C.setFromTriplets(trips.begin(), trips.end());
    tc.C.makeCompressed();
    return tc;
}

bool point_inside_closure(const BoundaryMesh& bmesh, Point2 p) {
    for (const auto& s : bmesh.segments)
        if (segment_distance(p, s.a, s.b) < 1e-12) return true;
    bool inside = false;
    for (const auto& s : bmesh.segments) {
        if ((s.a.y > p.y) != (s.b.y > p.y)) {
            double xint = s.a.x + (p.y - s.a.y) * (s.b.x - s.a.x) / (s.b.y - s.a.y);
            if (xint > p.x) inside = !inside;
        }
    }
    return inside;
}

ExteriorField evaluate_exterior(const BemSpacePair& pair, const Vector& trace_coeffs,
                                const Vector& flux_coeffs, const std::vector<Point2>& points) {
    const auto& segs = pair.boundary->segments;
    if (trace_coeffs.size() != pair.n_trace() || flux_coeffs.size() != pair.n_flux())
        throw std::invalid_argument("evaluate_exterior: coefficient size mismatch");
    ExteriorField out;
    out.values.reserve(points.size());
    out.near_field.reserve(points.size());
    for (Point2 x : points) {
        if (point_inside_closure(*pair.boundary, x))
            throw std::runtime_error("interior evaluation point");
        bool near = false;
        double val = 0.0;
        for (int e = 0; e < pair.n_flux(); ++e) {
            const auto& s = segs[e];
            double h = s.length;
            Point2 d = (1.0 / h) * (s.b - s.a);
            double p = dot(x - s.a, d);
            double dn = dot(s.a - x, s.normal); // signed distance, constant on segment
            double d2 = dot(x - s.a, x - s.a) - p * p;
            if (segment_distance(x, s.a, s.b) < h) near = true;
            // single layer: -(1/2pi) int log|x-y| with constant density
            double slp;
            double ad = std::abs(dn);
            if (ad > 1e-300) {
                auto F = [&](double t) {
                    double q = (t - p) * (t - p) + d2;
                    return (t - p) * std::log(q) - 2.0 * t + 2.0 * ad * std::atan((t - p) / ad);
                };
                slp = -0.25 / kPi * (F(h) - F(0.0));
            } else {
                auto F = [&](double t) {
                    double u = std::abs(t - p);
                    return (t - p) * (std::log(u) - 1.0);
                };
                slp = -0.5 / kPi * (F(h) - F(0.0));
            }
            // double layer with the P1 trace density
            double dlp = 0.0;
            if (ad > 1e-300) {
                double i0 = (std::atan((h - p) / ad) + std::atan(p / ad)) / ad;
                double q1 = (h - p) * (h - p) + d2;
                double q0 = p * p + d2;
                double i1 = 0.5 * std::log(q1 / q0) + p * i0;
                double ua = trace_coeffs[s.ta], ub = trace_coeffs[s.tb];
                dlp = -dn / (2.0 * kPi) * (ua * (i0 - i1 / h) + ub * (i1 / h));
            }
            val += dlp - flux_coeffs[e] * slp;
        }
        out.values.push_back(val);
        out.near_field.push_back(near);
    }
    return out;
}

double radiation_coefficient(const BemSpacePair& pair, const Vector& flux_coeffs) {
    const auto& segs = pair.boundary->segments;
    double acc = 0.0;
    for (int e = 0; e < pair.n_flux(); ++e) acc += segs[e].length * flux_coeffs[e];
    return acc / (2.0 * kPi);
}

} // namespace fembem
