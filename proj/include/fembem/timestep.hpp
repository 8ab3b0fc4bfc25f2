#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fembem/bem.hpp"
#include "fembem/fem.hpp"
#include "fembem/linalg.hpp"
#include "fembem/mesh.hpp"

namespace fembem {

// Weighted-average implicit Euler uses omega^n(t) = (6t - 2t^n - 4t^{n-1})/tau^n,
// the Crank-Nicolson variant omega^n = 1. Both integrate to tau^n.
enum class WeightVariant { Euler, CrankNicolson };

double weight_value(WeightVariant variant, double t, double t0, double t1);

// Gauss points of [t0,t1] split into `panels` equal sub-panels; calls f(t, w).
void for_time_gauss(double t0, double t1, int points, int panels,
                    const std::function<void(double, double)>& f);

// (1/tau) int_{t0}^{t1} v(t) omega(t) dt by Gauss quadrature (q_t >= 2).
Vector weighted_average(const std::function<Vector(double)>& v, double t0, double t1,
                        WeightVariant variant, int q_t, int panels = 1);

struct QuadConfig {
    int volume_degree = 4;        // triangle rule exactness for loads
    int edge_points = 4;          // Gauss points on boundary edges
    int time_points = 4;          // Gauss points per time interval
    int first_interval_panels = 8; // composite panels on interval n = 1
};

// Model data reduced to the coupled formulation: volume source f, trace jump
// g (scalar on Gamma), flux jump h (normal-dependent on Gamma).
struct ProblemData {
    ScalarField f;
    ScalarField g;
    BoundaryField h;
    double diffusion = 1.0;
    DirichletSpec dirichlet;
    ScalarField initial; // u(.,0); empty evaluator means zero
    double end_time = 1.0;
};

// u coefficients at the time nodes (piecewise linear in t), flux coefficients
// per interval (piecewise constant in t).
struct CoupledTrajectory {
    const TriMesh* mesh = nullptr;
    BoundaryMesh boundary;
    TimeGrid tgrid;
    std::vector<Vector> u;   // size N+1
    std::vector<Vector> phi; // size N, phi[n-1] lives on (t^{n-1}, t^n]

    Vector u_at(int interval, double t) const; // linear blend inside interval
    Vector d_tau(int interval) const;          // difference quotient
};

// One-step coupled system in the equivalent nodal form
//   [ (1/tau) M + theta A , -C ] [u^n  ]   [ fhat + (1/tau) M u^{n-1} + cn terms ]
//   [ theta B             ,  V ] [phi^n] = [ ghat + cn terms                      ]
// with B = (1/2) M_Gamma - K on the trace dofs, theta = 1 (Euler) or 1/2 (CN),
// and Dirichlet rows of the first block replaced by the identity.
struct SaddleMatrix {
    BorderedBlockMatrix block;
    ConstrainedSystem lift;        // eliminated Dirichlet columns of S
    DenseMatrix b_full;            // (1/2) M_Gamma - K, all trace columns
    DenseMatrix b_dir;             // columns of theta*B at Dirichlet trace dofs
    std::vector<int> b_dir_positions; // their positions in the Dirichlet dof list
    std::vector<int> trace_dofs;   // volume index per trace dof
    double tau = 0.0;
    double theta = 1.0;
};

SaddleMatrix assemble_saddle_system(const SparseMatrix& mass, const SparseMatrix& stiffness,
                                    const TraceCoupling& tc, const DenseMatrix& k_matrix,
                                    const DenseMatrix& v_matrix, const BoundaryMesh& bmesh,
                                    double tau, WeightVariant variant,
                                    const std::vector<int>& dirichlet_dofs);

class SaddleSolver {
public:
    SaddleSolver(SaddleMatrix matrix, const SparseMatrix& mass, const SparseMatrix& stiffness);

    // fhat / ghat are the weighted-average right-hand sides; dirichlet_values
    // are the nodal values at t^n (size = number of Dirichlet dofs).
    void step(const Vector& u_prev, const Vector& fhat, const Vector& ghat,
              const Vector& dirichlet_values, Vector& u, Vector& phi) const;

    const SaddleMatrix& matrix() const { return matrix_; }

private:
    SaddleMatrix matrix_;
    SparseMatrix mass_;
    SparseMatrix stiffness_;
    BlockFactorization factorization_;
};

// Full evolution of Problem (4.5)-(4.6): assembles everything, factorizes
// once (uniform tau), and marches the time grid. Throws "diverged" on NaN.
CoupledTrajectory solve_evolution(const ProblemData& data, const TriMesh& mesh,
                                  const TimeGrid& tgrid, WeightVariant variant,
                                  const QuadConfig& quad = {});

} // namespace fembem
