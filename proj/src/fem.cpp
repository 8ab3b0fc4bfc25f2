#include "fembem/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fembem/quadrature.hpp"

namespace fembem {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(int n, int m, std::vector<Triplet>& trips) {
    SparseMatrix s(n, m);
    s.setFromTriplets(trips.begin(), trips.end());
    s.makeCompressed();
    return s;
}

} // namespace

SparseMatrix assemble_mass(const FemSpace& space) {
    const TriMesh& mesh = *space.mesh;
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        double a = mesh.triangle_area(t);
        // element mass (|T|/12) [[2,1,1],[1,2,1],[1,1,2]]
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.emplace_back(tri[i], tri[j], a / 12.0 * (i == j ? 2.0 : 1.0));
    }
    return from_triplets(space.n_dofs(), space.n_dofs(), trips);
}

namespace {

SparseMatrix stiffness_impl(const FemSpace& space, const double* per_tri, double constant) {
    const TriMesh& mesh = *space.mesh;
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        Point2 p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]], p2 = mesh.vertices[tri[2]];
        double area = mesh.triangle_area(t);
        // grad lambda_i = (b_i, c_i) / (2|T|)
        double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        double alpha = per_tri ? per_tri[t] : constant;
        if (!(alpha > 0.0)) throw std::invalid_argument("assemble_stiffness: diffusion must be > 0");
        double f = alpha / (4.0 * area);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.emplace_back(tri[i], tri[j], f * (b[i] * b[j] + c[i] * c[j]));
    }
    return from_triplets(space.n_dofs(), space.n_dofs(), trips);
}

} // namespace

SparseMatrix assemble_stiffness(const FemSpace& space, double diffusion) {
    return stiffness_impl(space, nullptr, diffusion);
}

SparseMatrix assemble_stiffness(const FemSpace& space, const std::vector<double>& diffusion) {
    if (static_cast<int>(diffusion.size()) != space.mesh->n_triangles())
        throw std::invalid_argument("assemble_stiffness: one diffusion value per triangle");
    return stiffness_impl(space, diffusion.data(), 0.0);
}

Vector assemble_load(const FemSpace& space, const ScalarField& f, const BoundaryField* h,
                     double t, int quad_degree, int edge_points) {
    if (quad_degree < 1) throw std::invalid_argument("assemble_load: quad_degree must be >= 1");
    const TriMesh& mesh = *space.mesh;
    Vector load = Vector::Zero(space.n_dofs());
    if (f.value) {
        // the hat function raises the integrand degree by one
        const TriangleRule& rule = triangle_rule(std::min(quad_degree + 1, 5));
        for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
            const auto& tv = mesh.triangles[tri];
            Point2 p0 = mesh.vertices[tv[0]], p1 = mesh.vertices[tv[1]], p2 = mesh.vertices[tv[2]];
            double area = mesh.triangle_area(tri);
            for (const auto& q : rule.points) {
                Point2 x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
                double fw = f.value(x, t) * q.w * area;
                load[tv[0]] += fw * q.l0;
                load[tv[1]] += fw * q.l1;
                load[tv[2]] += fw * q.l2;
            }
        }
    }
    if (h && h->value) {
        const GaussRule& g = gauss_legendre(edge_points);
        for (const auto& e : mesh.boundary_edges) {
            if (!(e.tag == coupling_tag())) continue;
            Point2 a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
            double len = dist(a, b);
            Point2 d = (1.0 / len) * (b - a);
            Point2 n{d.y, -d.x};
            for (size_t k = 0; k < g.nodes.size(); ++k) {
                double s = 0.5 * (g.nodes[k] + 1.0); // in [0,1]
                Point2 x = a + (s * len) * d;
                double hw = h->value(x, n, t) * g.weights[k] * 0.5 * len;
                load[e.v0] += hw * (1.0 - s);
                load[e.v1] += hw * s;
            }
        }
    }
    return load;
}

L2Projector::L2Projector(const FemSpace& space) : space_(space), mass_(assemble_mass(space)) {}

Vector L2Projector::project(const ScalarField& g, double t, int quad_degree) const {
    return mass_.solve(assemble_load(space_, g, nullptr, t, quad_degree));
}

Vector L2Projector::project_load(const Vector& load) const { return mass_.solve(load); }

Vector l2_project(const FemSpace& space, const ScalarField& g, double t, int quad_degree) {
    return L2Projector(space).project(g, t, quad_degree);
}

DirichletDofs collect_dirichlet_dofs(const TriMesh& mesh) {
    DirichletDofs dd;
    for (const auto& e : mesh.boundary_edges) {
        if (e.tag.kind != BoundaryKind::Dirichlet) continue;
        for (int v : {e.v0, e.v1}) {
            auto& lbls = dd.labels_of[v];
            if (std::find(lbls.begin(), lbls.end(), e.tag.label) == lbls.end())
                lbls.push_back(e.tag.label);
        }
    }
    for (const auto& [v, lbls] : dd.labels_of) dd.dofs.push_back(v);
    std::sort(dd.dofs.begin(), dd.dofs.end());
    return dd;
}

Vector dirichlet_values(const TriMesh& mesh, const DirichletDofs& dd, const DirichletSpec& spec,
                        double t) {
    Vector vals(dd.dofs.size());
    for (size_t k = 0; k < dd.dofs.size(); ++k) {
        int v = dd.dofs[k];
        Point2 x = mesh.vertices[v];
        const auto& lbls = dd.labels_of.at(v);
        bool have = false;
        double val = 0.0;
        for (int lbl : lbls) {
            auto it = spec.values.find(lbl);
            if (it == spec.values.end())
                throw std::runtime_error("dirichlet_values: no data for label " +
                                         std::to_string(lbl));
            double g = it->second(x, t);
            if (have && std::abs(g - val) > 1e-12 * (1.0 + std::abs(val)))
                throw std::runtime_error("inconsistent Dirichlet data");
            val = g;
            have = true;
        }
        vals[static_cast<Eigen::Index>(k)] = val;
    }
    return vals;
}

ConstrainedSystem apply_dirichlet(const SparseMatrix& system, const std::vector<int>& dofs) {
    const int n = static_cast<int>(system.rows());
    std::vector<char> is_dir(n, 0);
    std::vector<int> dir_index(n, -1);
    for (size_t k = 0; k < dofs.size(); ++k) {
        is_dir[dofs[k]] = 1;
        dir_index[dofs[k]] = static_cast<int>(k);
    }
    std::vector<Eigen::Triplet<double>> mat, cols;
    for (int j = 0; j < system.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(system, j); it; ++it) {
            int r = static_cast<int>(it.row());
            int c = static_cast<int>(it.col());
            if (is_dir[r]) continue; // row replaced by identity below
            if (is_dir[c])
                cols.emplace_back(r, dir_index[c], it.value());
            else
                mat.emplace_back(r, c, it.value());
        }
    }
    for (int d : dofs) mat.emplace_back(d, d, 1.0);
    ConstrainedSystem cs;
    cs.matrix.resize(n, n);
    cs.matrix.setFromTriplets(mat.begin(), mat.end());
    cs.matrix.makeCompressed();
    cs.eliminated_cols.resize(n, static_cast<int>(dofs.size()));
    cs.eliminated_cols.setFromTriplets(cols.begin(), cols.end());
    cs.eliminated_cols.makeCompressed();
    cs.dofs = dofs;
    return cs;
}

Vector constrain_rhs(const ConstrainedSystem& cs, const Vector& rhs, const Vector& values) {
    Vector r = rhs - cs.eliminated_cols * values;
    for (size_t k = 0; k < cs.dofs.size(); ++k)
        r[cs.dofs[k]] = values[static_cast<Eigen::Index>(k)];
    return r;
}

double fem_value(const FemSpace& space, const Vector& coeffs, int tri, double l0, double l1,
                 double l2) {
    const auto& tv = space.mesh->triangles[tri];
    return l0 * coeffs[tv[0]] + l1 * coeffs[tv[1]] + l2 * coeffs[tv[2]];
}

Point2 fem_gradient(const FemSpace& space, const Vector& coeffs, int tri) {
    const TriMesh& mesh = *space.mesh;
    const auto& tv = mesh.triangles[tri];
    Point2 p0 = mesh.vertices[tv[0]], p1 = mesh.vertices[tv[1]], p2 = mesh.vertices[tv[2]];
    double area = mesh.triangle_area(tri);
    double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    Point2 g{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        g.x += coeffs[tv[i]] * b[i];
        g.y += coeffs[tv[i]] * c[i];
    }
    return (1.0 / (2.0 * area)) * g;
}

} // namespace fembem
