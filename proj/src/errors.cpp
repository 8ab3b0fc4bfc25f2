#include "fembem/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fembem/quadrature.hpp"

namespace fembem {

namespace {

// squared spatial error at one time point, by element quadrature
double space_error_sq(const FemSpace& space, const Vector& coeffs, const ExactSolution& exact,
                      BochnerKind kind, double t, int degree) {
    const TriMesh& mesh = *space.mesh;
    const TriangleRule& rule = triangle_rule(degree);
    double acc = 0.0;
    for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
        const auto& tv = mesh.triangles[tri];
        Point2 p0 = mesh.vertices[tv[0]], p1 = mesh.vertices[tv[1]], p2 = mesh.vertices[tv[2]];
        double area = mesh.triangle_area(tri);
        if (kind == BochnerKind::H1Semi) {
            Point2 gh = fem_gradient(space, coeffs, tri);
            for (const auto& q : rule.points) {
                Point2 x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
                Point2 d = exact.u.gradient(x, t) - gh;
                acc += q.w * area * dot(d, d);
            }
        } else {
            for (const auto& q : rule.points) {
                Point2 x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
                double d = exact.u.value(x, t) -
                           fem_value(space, coeffs, tri, q.l0, q.l1, q.l2);
                acc += q.w * area * d * d;
            }
        }
    }
    return acc;
}

// visit the time quadrature of every interval; f(n, t, w)
void for_trajectory_gauss(const CoupledTrajectory& traj, const QuadConfig& quad,
                          const std::function<void(int, double, double)>& f) {
    for (int n = 1; n <= traj.tgrid.n_intervals(); ++n) {
        int panels = (n == 1) ? quad.first_interval_panels : 1;
        for_time_gauss(traj.tgrid.nodes[n - 1], traj.tgrid.nodes[n], quad.time_points, panels,
                       [&](double t, double w) { f(n, t, w); });
    }
}

} // namespace

double bochner_error(const CoupledTrajectory& traj, const ExactSolution& exact, BochnerKind kind,
                     const QuadConfig& quad, int space_degree) {
    if (kind == BochnerKind::H1Semi && !exact.u.gradient)
        throw std::invalid_argument("bochner_error: exact gradient required");
    FemSpace space{traj.mesh};
    double acc = 0.0;
    for_trajectory_gauss(traj, quad, [&](int n, double t, double w) {
        Vector uh = traj.u_at(n, t);
        acc += w * space_error_sq(space, uh, exact, kind, t, space_degree);
    });
    return std::sqrt(acc);
}

double bochner_error_projected(const CoupledTrajectory& traj, const ExactSolution& exact,
                               BochnerKind kind, const QuadConfig& quad, int space_degree) {
    FemSpace space{traj.mesh};
    L2Projector proj(space);
    SparseMatrix form = (kind == BochnerKind::L2) ? assemble_mass(space)
                                                  : assemble_stiffness(space, 1.0);
    double acc = 0.0;
    for_trajectory_gauss(traj, quad, [&](int n, double t, double w) {
        Vector e = proj.project(exact.u, t, space_degree) - traj.u_at(n, t);
        acc += w * e.dot(form * e);
    });
    return std::sqrt(std::max(acc, 0.0));
}

namespace {

// per-segment mean of the exact flux
Vector project_flux(const BoundaryMesh& bmesh, const ExactSolution& exact, double t,
                    int edge_points) {
    const GaussRule& g = gauss_legendre(edge_points);
    Vector out(bmesh.n_segments());
    for (int e = 0; e < bmesh.n_segments(); ++e) {
        const auto& s = bmesh.segments[e];
        double acc = 0.0;
        for (size_t k = 0; k < g.nodes.size(); ++k) {
            double lam = 0.5 * (g.nodes[k] + 1.0);
            Point2 x = s.a + lam * (s.b - s.a);
            acc += 0.5 * g.weights[k] * exact.flux.value(x, s.normal, t);
        }
        out[e] = acc; // mean: weights already sum to the unit interval
    }
    return out;
}

} // namespace

double v_energy_error(const CoupledTrajectory& traj, const ExactSolution& exact,
                      int refine_extra, const QuadConfig& quad) {
    if (refine_extra < 1) throw std::invalid_argument("v_energy_error: refine_extra must be >= 1");
    BoundaryMesh fine = refine_boundary(traj.boundary, refine_extra);
    BemSpacePair fine_pair{&fine};
    DenseMatrix v_fine = assemble_single_layer(fine_pair);
    const int shift = refine_extra;
    double acc = 0.0;
    for_trajectory_gauss(traj, quad, [&](int n, double t, double w) {
        Vector e = project_flux(fine, exact, t, quad.edge_points);
        const Vector& phi = traj.phi[n - 1];
        for (int i = 0; i < fine.n_segments(); ++i) e[i] -= phi[i >> shift];
        acc += w * e.dot(v_fine * e);
    });
    return std::sqrt(std::max(acc, 0.0));
}

double v_energy_error_projected(const CoupledTrajectory& traj, const ExactSolution& exact,
                                const QuadConfig& quad) {
    BemSpacePair pair{&traj.boundary};
    DenseMatrix v_matrix = assemble_single_layer(pair);
    double acc = 0.0;
    for_trajectory_gauss(traj, quad, [&](int n, double t, double w) {
        Vector e = project_flux(traj.boundary, exact, t, quad.edge_points) - traj.phi[n - 1];
        acc += w * e.dot(v_matrix * e);
    });
    return std::sqrt(std::max(acc, 0.0));
}

double dual_norm_bound(const CoupledTrajectory& traj, const ExactSolution& exact,
                       const QuadConfig& quad, int space_degree) {
    if (!exact.u.dt) throw std::invalid_argument("dual_norm_bound: exact dt required");
    FemSpace space{traj.mesh};
    SparseMatrix mass = assemble_mass(space);
    // unit-coefficient auxiliary operator regardless of the problem's diffusion
    SparseMatrix aux = assemble_stiffness(space, 1.0) + mass;
    SparseFactorization aux_lu(aux);
    ScalarField dtu{exact.u.dt, nullptr, nullptr};
    double acc = 0.0;
    int current = -1;
    Vector m_dtau;
    for_trajectory_gauss(traj, quad, [&](int n, double t, double w) {
        if (n != current) {
            m_dtau = mass * traj.d_tau(n);
            current = n;
        }
        Vector b = assemble_load(space, dtu, nullptr, t, space_degree) - m_dtau;
        Vector z = aux_lu.solve(b);
        acc += w * z.dot(b); // z'b = ||z||_{H1}^2
    });
    return std::sqrt(std::max(acc, 0.0));
}

ProjectedReference projected_reference(const CoupledTrajectory& traj, const ExactSolution& exact,
                                       double t, int space_degree) {
    FemSpace space{traj.mesh};
    ProjectedReference out;
    out.u_bar = l2_project(space, exact.u, t, space_degree);
    out.phi_bar = project_flux(traj.boundary, exact, t, 4);
    return out;
}

std::vector<double> compute_eoc(const std::vector<double>& values,
                                const std::vector<double>& params) {
    if (values.size() != params.size() || values.size() < 2)
        throw std::invalid_argument("compute_eoc: need matching lists with >= 2 levels");
    std::vector<double> rates;
    for (size_t l = 1; l < values.size(); ++l) {
        if (!(values[l - 1] > 0.0) || !(values[l] > 0.0)) {
            rates.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        rates.push_back(std::log(values[l - 1] / values[l]) / std::log(params[l - 1] / params[l]));
    }
    return rates;
}

ErrorRow measure_errors(const CoupledTrajectory& traj, const ExactSolution& exact,
                        const QuadConfig& quad, int v_refine_extra, int space_degree) {
    ErrorRow row;
    row.inv_h = 1.0 / traj.mesh->h_max();
    row.n_time_intervals = traj.tgrid.n_intervals();
    row.errorL2 = bochner_error(traj, exact, BochnerKind::L2, quad, space_degree);
    row.errorL2proj = bochner_error_projected(traj, exact, BochnerKind::L2, quad, space_degree);
    row.errorH1semi = bochner_error(traj, exact, BochnerKind::H1Semi, quad, space_degree);
    row.errorH1semiproj =
        bochner_error_projected(traj, exact, BochnerKind::H1Semi, quad, space_degree);
    row.errorH1dual = dual_norm_bound(traj, exact, quad, space_degree);
    row.errorenergyV = v_energy_error(traj, exact, v_refine_extra, quad);
    row.errorenergyVproj = v_energy_error_projected(traj, exact, quad);
    row.globalEnergy = std::sqrt(row.errorL2 * row.errorL2 + row.errorH1semi * row.errorH1semi +
                                 row.errorH1dual * row.errorH1dual) +
                       row.errorenergyV;
    row.globalEnergyproj =
        std::sqrt(row.errorL2proj * row.errorL2proj + row.errorH1semiproj * row.errorH1semiproj +
                  row.errorH1dual * row.errorH1dual) +
        row.errorenergyVproj;
    return row;
}

} // namespace fembem
