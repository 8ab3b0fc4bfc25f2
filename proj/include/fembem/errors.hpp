#pragma once

#include <vector>

#include "fembem/timestep.hpp"

namespace fembem {

// Manufactured reference: interior solution with gradient and time
// derivative, exterior trace on Gamma, and the flux phi = dn u_e.
struct ExactSolution {
    ScalarField u;
    ScalarField ue_trace;
    BoundaryField flux;
};

enum class BochnerKind { L2, H1Semi };

// L2(0,T; L2) or L2(0,T; H1-semi) error of the trajectory against the exact
// solution; Gauss in time, element Gauss of the stated degree in space.
double bochner_error(const CoupledTrajectory& traj, const ExactSolution& exact, BochnerKind kind,
                     const QuadConfig& quad = {}, int space_degree = 4);

// Same norms for the discrete difference u_bar_h - u_{h,tau} where u_bar_h is
// the L2-projected exact solution; evaluated with the assembled matrices.
double bochner_error_projected(const CoupledTrajectory& traj, const ExactSolution& exact,
                               BochnerKind kind, const QuadConfig& quad = {},
                               int space_degree = 4);

// || phi - phi_{h,tau} ||_{L2(0,T;V)} with the exact flux projected onto the
// P0 space of a boundary mesh refined `refine_extra` more times.
double v_energy_error(const CoupledTrajectory& traj, const ExactSolution& exact,
                      int refine_extra = 2, const QuadConfig& quad = {});

// Projected variant || phi_bar_h - phi_{h,tau} ||_{L2(0,T;V)} on the current
// boundary mesh.
double v_energy_error_projected(const CoupledTrajectory& traj, const ExactSolution& exact,
                                const QuadConfig& quad = {});

// || z_h^a ||_{H_T}: at each time quadrature point solve the auxiliary
// reaction-diffusion problem (A_1 + M) z = b with b_i = <dt u, phi_i> -
// (M d_tau u^n)_i, accumulate z' b. Upper bound for the dual-norm error of
// dt(u_bar_h - u_{h,tau}).
double dual_norm_bound(const CoupledTrajectory& traj, const ExactSolution& exact,
                       const QuadConfig& quad = {}, int space_degree = 4);

// L2 projections of the exact solution at time t: volume coefficients via a
// mass solve, boundary P0 coefficients as per-segment means of the flux.
struct ProjectedReference {
    Vector u_bar;
    Vector phi_bar;
};

ProjectedReference projected_reference(const CoupledTrajectory& traj, const ExactSolution& exact,
                                       double t, int space_degree = 4);

// rate_l = log(e_{l-1}/e_l) / log(p_{l-1}/p_l); NaN where undefined.
std::vector<double> compute_eoc(const std::vector<double>& values,
                                const std::vector<double>& params);

// One table row of the convergence studies.
struct ErrorRow {
    double inv_h = 0.0;
    int n_time_intervals = 0;
    double errorL2 = 0.0, errorL2proj = 0.0;
    double errorH1semi = 0.0, errorH1semiproj = 0.0;
    double errorH1dual = 0.0;
    double errorenergyV = 0.0, errorenergyVproj = 0.0;
    double globalEnergy = 0.0, globalEnergyproj = 0.0;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
};

// Fills every error column for one solved level.
ErrorRow measure_errors(const CoupledTrajectory& traj, const ExactSolution& exact,
                        const QuadConfig& quad = {}, int v_refine_extra = 2,
                        int space_degree = 4);

} // namespace fembem
