#include "fembem/timestep.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fembem/quadrature.hpp"

namespace fembem {

double weight_value(WeightVariant variant, double t, double t0, double t1) {
    if (variant == WeightVariant::CrankNicolson) return 1.0;
    double tau = t1 - t0;
    return (6.0 * t - 2.0 * t1 - 4.0 * t0) / tau;
}

void for_time_gauss(double t0, double t1, int points, int panels,
                    const std::function<void(double, double)>& f) {
    const GaussRule& g = gauss_legendre(points);
    double dt = (t1 - t0) / panels;
    for (int p = 0; p < panels; ++p) {
        double a = t0 + p * dt;
        double mid = a + 0.5 * dt, half = 0.5 * dt;
        for (size_t k = 0; k < g.nodes.size(); ++k)
            f(mid + half * g.nodes[k], half * g.weights[k]);
    }
}

Vector weighted_average(const std::function<Vector(double)>& v, double t0, double t1,
                        WeightVariant variant, int q_t, int panels) {
    if (q_t < 2) throw std::invalid_argument("weighted_average: q_t must be >= 2");
    Vector acc;
    for_time_gauss(t0, t1, q_t, panels, [&](double t, double w) {
        Vector val = v(t);
        double f = w * weight_value(variant, t, t0, t1);
        if (acc.size() == 0)
            acc = f * val;
        else
            acc += f * val;
    });
    return acc / (t1 - t0);
}

Vector CoupledTrajectory::u_at(int interval, double t) const {
    double t0 = tgrid.nodes[interval - 1], t1 = tgrid.nodes[interval];
    double lam = (t - t0) / (t1 - t0);
    return (1.0 - lam) * u[interval - 1] + lam * u[interval];
}

Vector CoupledTrajectory::d_tau(int interval) const {
    return (u[interval] - u[interval - 1]) / tgrid.tau(interval);
}

SaddleMatrix assemble_saddle_system(const SparseMatrix& mass, const SparseMatrix& stiffness,
                                    const TraceCoupling& tc, const DenseMatrix& k_matrix,
                                    const DenseMatrix& v_matrix, const BoundaryMesh& bmesh,
                                    double tau, WeightVariant variant,
                                    const std::vector<int>& dirichlet_dofs) {
    if (tau <= 0.0) throw std::invalid_argument("assemble_saddle_system: tau must be > 0");
    const int n = static_cast<int>(mass.rows());
    const int m = static_cast<int>(v_matrix.rows());
    if (stiffness.rows() != n || tc.C.rows() != n || tc.C.cols() != m ||
        k_matrix.rows() != m || tc.m_gamma.rows() != m || k_matrix.cols() != tc.m_gamma.cols())
        throw std::invalid_argument("assemble_saddle_system: dimension mismatch");

    SaddleMatrix sm;
    sm.tau = tau;
    sm.theta = (variant == WeightVariant::Euler) ? 1.0 : 0.5;
    sm.b_full = 0.5 * tc.m_gamma - k_matrix;
    sm.trace_dofs = bmesh.trace_vertices;

    SparseMatrix s = (1.0 / tau) * mass + sm.theta * stiffness;
    sm.lift = apply_dirichlet(s, dirichlet_dofs);
    sm.block.S = sm.lift.matrix;

    // -C with Dirichlet rows removed (those rows are identity rows of S)
    std::vector<char> is_dir(n, 0);
    for (int d : dirichlet_dofs) is_dir[d] = 1;
    {
        std::vector<Eigen::Triplet<double>> trips;
        for (int j = 0; j < tc.C.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(tc.C, j); it; ++it)
                if (!is_dir[it.row()]) trips.emplace_back(it.row(), it.col(), -it.value());
        sm.block.U.resize(n, m);
        sm.block.U.setFromTriplets(trips.begin(), trips.end());
        sm.block.U.makeCompressed();
    }

    // theta * B on the non-Dirichlet trace columns; Dirichlet columns move to
    // the right-hand side
    const int nt = static_cast<int>(sm.trace_dofs.size());
    std::vector<int> free_cols, dir_cols;
    for (int k = 0; k < nt; ++k)
        (is_dir[sm.trace_dofs[k]] ? dir_cols : free_cols).push_back(k);
    sm.block.w_cols.clear();
    sm.block.w_core.resize(m, free_cols.size());
    for (size_t k = 0; k < free_cols.size(); ++k) {
        sm.block.w_cols.push_back(sm.trace_dofs[free_cols[k]]);
        sm.block.w_core.col(static_cast<Eigen::Index>(k)) =
            sm.theta * sm.b_full.col(free_cols[k]);
    }
    sm.b_dir.resize(m, dir_cols.size());
    for (size_t k = 0; k < dir_cols.size(); ++k)
        sm.b_dir.col(static_cast<Eigen::Index>(k)) = sm.theta * sm.b_full.col(dir_cols[k]);
    // map Dirichlet trace columns to positions in the dirichlet dof list
    sm.b_dir_positions.clear();
    for (int k : dir_cols) {
        int dof = sm.trace_dofs[k];
        int pos = -1;
        for (size_t q = 0; q < dirichlet_dofs.size(); ++q)
            if (dirichlet_dofs[q] == dof) pos = static_cast<int>(q);
        sm.b_dir_positions.push_back(pos);
    }

    sm.block.D = v_matrix;
    return sm;
}

SaddleSolver::SaddleSolver(SaddleMatrix matrix, const SparseMatrix& mass,
                           const SparseMatrix& stiffness)
    : matrix_(std::move(matrix)), mass_(mass), stiffness_(stiffness),
      factorization_(matrix_.block) {}

void SaddleSolver::step(const Vector& u_prev, const Vector& fhat, const Vector& ghat,
                        const Vector& dirichlet_values, Vector& u, Vector& phi) const {
    const SaddleMatrix& sm = matrix_;
    Vector r1 = fhat + (1.0 / sm.tau) * (mass_ * u_prev);
    if (sm.theta != 1.0) r1 -= (1.0 - sm.theta) * (stiffness_ * u_prev);
    r1 = constrain_rhs(sm.lift, r1, dirichlet_values);

    Vector r2 = ghat;
    if (sm.theta != 1.0) {
        // Crank-Nicolson averages the trace of u across the step
        Vector tr(sm.trace_dofs.size());
        for (size_t k = 0; k < sm.trace_dofs.size(); ++k)
            tr[static_cast<Eigen::Index>(k)] = u_prev[sm.trace_dofs[k]];
        r2 -= (1.0 - sm.theta) * (sm.b_full * tr);
    }
    for (size_t k = 0; k < sm.b_dir_positions.size(); ++k)
        r2 -= dirichlet_values[sm.b_dir_positions[k]] * sm.b_dir.col(static_cast<Eigen::Index>(k));

    factorization_.solve(r1, r2, u, phi);
}

CoupledTrajectory solve_evolution(const ProblemData& data, const TriMesh& mesh,
                                  const TimeGrid& tgrid, WeightVariant variant,
                                  const QuadConfig& quad) {
    if (tgrid.tau_max() > 0.25)
        std::fprintf(stderr, "solve_evolution: warning: tau_max = %g exceeds 1/4\n",
                     tgrid.tau_max());

    FemSpace space{&mesh};
    SparseMatrix mass = assemble_mass(space);
    SparseMatrix stiffness = assemble_stiffness(space, data.diffusion);

    CoupledTrajectory traj;
    traj.mesh = &mesh;
    traj.boundary = extract_boundary(mesh, coupling_tag());
    traj.tgrid = tgrid;
    BemSpacePair pair{&traj.boundary};

    DenseMatrix v_matrix = assemble_single_layer(pair);
    DenseMatrix k_matrix = assemble_double_layer(pair);
    TraceCoupling tc = assemble_trace_coupling(pair, space.n_dofs());

    DirichletDofs dd = collect_dirichlet_dofs(mesh);
    if (!dd.dofs.empty() && data.dirichlet.empty())
        throw std::runtime_error("solve_evolution: mesh has Dirichlet boundary but no data");

    const int n_steps = tgrid.n_intervals();
    const double tau = tgrid.tau(1); // uniform grids share one factorization
    SaddleSolver solver(assemble_saddle_system(mass, stiffness, tc, k_matrix, v_matrix,
                                               traj.boundary, tau, variant, dd.dofs),
                        mass, stiffness);

    traj.u.resize(n_steps + 1);
    traj.phi.resize(n_steps);
    if (data.initial.value) {
        L2Projector proj(space);
        traj.u[0] = proj.project(data.initial, 0.0, quad.volume_degree);
    } else {
        traj.u[0] = Vector::Zero(space.n_dofs());
    }

    const bool has_load = static_cast<bool>(data.f.value) || static_cast<bool>(data.h.value);
    const int nt = pair.n_trace();

    for (int n = 1; n <= n_steps; ++n) {
        double t0 = tgrid.nodes[n - 1], t1 = tgrid.nodes[n];
        int panels = (n == 1) ? quad.first_interval_panels : 1;

        Vector fhat;
        if (has_load) {
            fhat = weighted_average(
                [&](double t) {
                    return assemble_load(space, data.f, data.h.value ? &data.h : nullptr, t,
                                         quad.volume_degree, quad.edge_points);
                },
                t0, t1, variant, quad.time_points, panels);
        } else {
            fhat = Vector::Zero(space.n_dofs());
        }

        Vector ghat;
        if (data.g.value) {
            Vector gbar = weighted_average(
                [&](double t) {
                    Vector gi(nt);
                    for (int k = 0; k < nt; ++k) {
                        Point2 x = mesh.vertices[traj.boundary.trace_vertices[k]];
                        gi[k] = data.g.value(x, t);
                    }
                    return gi;
                },
                t0, t1, variant, quad.time_points, panels);
            ghat = solver.matrix().b_full * gbar;
        } else {
            ghat = Vector::Zero(pair.n_flux());
        }

        Vector dvals = dd.dofs.empty() ? Vector()
                                       : dirichlet_values(mesh, dd, data.dirichlet, t1);
        solver.step(traj.u[n - 1], fhat, ghat, dvals, traj.u[n], traj.phi[n - 1]);
        if (!traj.u[n].allFinite() || !traj.phi[n - 1].allFinite())
            throw std::runtime_error("diverged");
    }
    return traj;
}

} // namespace fembem
