#pragma once

#include <functional>
#include <map>
#include <vector>

#include "fembem/linalg.hpp"
#include "fembem/mesh.hpp"

namespace fembem {

// Continuous piecewise linear functions on a TriMesh; one dof per vertex.
struct FemSpace {
    const TriMesh* mesh = nullptr;
    int n_dofs() const { return mesh->n_vertices(); }
};

// Time-dependent scalar field on the domain. Gradient and time derivative
// are optional; operations that need them say so.
struct ScalarField {
    std::function<double(Point2, double)> value;
    std::function<Point2(Point2, double)> gradient;
    std::function<double(Point2, double)> dt;
};

// Field living on the boundary; gets the outward unit normal of the segment
// it is being evaluated on (jump data and fluxes depend on it).
struct BoundaryField {
    std::function<double(Point2, Point2, double)> value;
};

// Dirichlet data per boundary label.
struct DirichletSpec {
    std::map<int, std::function<double(Point2, double)>> values;
    bool empty() const { return values.empty(); }
};

SparseMatrix assemble_mass(const FemSpace& space);

// Stiffness with piecewise-constant diffusion (global constant or one value
// per triangle).
SparseMatrix assemble_stiffness(const FemSpace& space, double diffusion);
SparseMatrix assemble_stiffness(const FemSpace& space, const std::vector<double>& diffusion);

// Load vector <f,v>_Omega + <h,v>_Gamma at time t; the boundary part runs
// over Coupling-tagged edges. quad_degree selects the triangle rule,
// edge_points the Gauss rule on edges. Pass h = nullptr for volume-only.
Vector assemble_load(const FemSpace& space, const ScalarField& f, const BoundaryField* h,
                     double t, int quad_degree = 4, int edge_points = 4);

// L2 projection with a reusable mass factorization.
class L2Projector {
public:
    explicit L2Projector(const FemSpace& space);
    Vector project(const ScalarField& g, double t, int quad_degree = 4) const;
    Vector project_load(const Vector& load) const;

private:
    FemSpace space_;
    SparseFactorization mass_;
};

Vector l2_project(const FemSpace& space, const ScalarField& g, double t, int quad_degree = 4);

// All vertices lying on Dirichlet-tagged boundary edges, with their labels.
struct DirichletDofs {
    std::vector<int> dofs;                        // sorted, unique
    std::map<int, std::vector<int>> labels_of;    // dof -> labels it carries
};

DirichletDofs collect_dirichlet_dofs(const TriMesh& mesh);

// Nodal values g_D(x_i, t). Throws "inconsistent Dirichlet data" when a
// vertex carries two labels whose values disagree.
Vector dirichlet_values(const TriMesh& mesh, const DirichletDofs& dd, const DirichletSpec& spec,
                        double t);

// Row replacement + column elimination. `matrix` has identity rows at the
// constrained dofs and zeroed columns elsewhere; `eliminated_cols` holds the
// removed columns (with constrained rows zeroed) for the right-hand side.
struct ConstrainedSystem {
    SparseMatrix matrix;
    SparseMatrix eliminated_cols; // n x n_dir
    std::vector<int> dofs;
};

ConstrainedSystem apply_dirichlet(const SparseMatrix& system, const std::vector<int>& dofs);

// rhs -> rhs - eliminated_cols * values, then prescribed entries overwritten.
Vector constrain_rhs(const ConstrainedSystem& cs, const Vector& rhs, const Vector& values);

// Helpers for evaluating P1 functions.
double fem_value(const FemSpace& space, const Vector& coeffs, int tri, double l0, double l1,
                 double l2);
Point2 fem_gradient(const FemSpace& space, const Vector& coeffs, int tri);

} // namespace fembem
