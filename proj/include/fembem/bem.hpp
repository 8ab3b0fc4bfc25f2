#pragma once

#include <vector>

#include "fembem/linalg.hpp"
#include "fembem/mesh.hpp"

namespace fembem {

// P0 fluxes (one dof per segment) paired with P1 traces (one dof per
// boundary vertex) on a BoundaryMesh.
struct BemSpacePair {
    const BoundaryMesh* boundary = nullptr;
    int n_flux() const { return boundary->n_segments(); }
    int n_trace() const { return boundary->n_trace(); }
};

// Galerkin single layer V[e][e'] = int_e int_e' G(x,y) ds_y ds_x with the
// 2D Laplace kernel G(x,y) = -(1/2pi) log|x-y|. Symmetric; SPD when the
// polygon has diameter < 1.
DenseMatrix assemble_single_layer(const BemSpacePair& pair);

// Galerkin double layer, P0 test rows against P1 trace columns:
// K[e][j] = int_e int_Gamma dG/dn_y(x,y) phi_j(y) ds_y ds_x.
DenseMatrix assemble_double_layer(const BemSpacePair& pair);

// C[i][e] = int_e phi_i ds (volume hat functions against fluxes) and the
// P0 x P1 boundary mass M_Gamma[e][j] = int_e phi_j ds; entries h_e/2.
struct TraceCoupling {
    SparseMatrix C;       // n_volume_dofs x n_flux
    DenseMatrix m_gamma;  // n_flux x n_trace
};

TraceCoupling assemble_trace_coupling(const BemSpacePair& pair, int n_volume_dofs);

// Representation formula u_e(x) = (K u_e|_Gamma)(x) - (V phi)(x) evaluated
// with exact per-segment antiderivatives. Points must be strictly exterior;
// near_field flags points closer to Gamma than the local segment length.
struct ExteriorField {
    std::vector<double> values;
    std::vector<bool> near_field;
};

ExteriorField evaluate_exterior(const BemSpacePair& pair, const Vector& trace_coeffs,
                                const Vector& flux_coeffs, const std::vector<Point2>& points);

// true if p lies inside (or on) the closed polygon formed by the boundary
bool point_inside_closure(const BoundaryMesh& bmesh, Point2 p);

// a = (1/2pi) int_Gamma phi ds for a P0 flux
double radiation_coefficient(const BemSpacePair& pair, const Vector& flux_coeffs);

} // namespace fembem
