#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "fembem/geometry.hpp"

namespace fembem {

enum class BoundaryKind { Coupling, Dirichlet };

struct BoundaryTag {
    BoundaryKind kind = BoundaryKind::Coupling;
    int label = 0; // meaningful for Dirichlet only
};

inline bool operator==(BoundaryTag a, BoundaryTag b) {
    return a.kind == b.kind && (a.kind == BoundaryKind::Coupling || a.label == b.label);
}

inline BoundaryTag coupling_tag() { return {BoundaryKind::Coupling, 0}; }
inline BoundaryTag dirichlet_tag(int label) { return {BoundaryKind::Dirichlet, label}; }

// Oriented boundary edge; the adjacent triangle lies to the left of v0->v1,
// so the outward normal is the right-hand normal of the direction vector.
struct BoundaryEdge {
    int v0 = -1;
    int v1 = -1;
    BoundaryTag tag;
};

// Conforming triangulation with counterclockwise triangles and tagged
// boundary edges. Immutable after construction.
struct TriMesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }

    double triangle_area(int t) const;
    double triangle_diameter(int t) const;
    double triangle_inradius(int t) const;
    Point2 centroid(int t) const;

    double h_max() const;
    double total_area() const;
    // quasi-uniformity ratio eta = min(rho_T, h_E) / h_max
    double eta() const;
};

// Ordered straight segments of one tagged part of the boundary, grouped into
// closed loops. Endpoint indices refer to the parent volume mesh; trace
// indices number the boundary vertices consecutively (P1 trace dofs).
struct BoundarySegment {
    Point2 a, b;
    int va = -1, vb = -1;       // volume vertex indices
    int ta = -1, tb = -1;       // trace (boundary-vertex) indices
    Point2 normal;              // unit, outward with respect to Omega
    double length = 0.0;
    int loop = 0;
};

struct BoundaryMesh {
    std::vector<BoundarySegment> segments;
    std::vector<int> trace_vertices; // trace index -> volume vertex index
    int n_loops = 0;

    int n_segments() const { return static_cast<int>(segments.size()); }
    int n_trace() const { return static_cast<int>(trace_vertices.size()); }
    double total_length() const;
    double h_min() const;
    double h_max() const;
};

// Partition 0 = t^0 < ... < t^N = T.
struct TimeGrid {
    std::vector<double> nodes;

    int n_intervals() const { return static_cast<int>(nodes.size()) - 1; }
    double tau(int n) const { return nodes[n] - nodes[n - 1]; } // n in 1..N
    double tau_max() const;
    double end_time() const { return nodes.back(); }
};

// L-shape (-1/4,1/4)^2 minus [0,1/4]x[-1/4,0], criss-cross start grid with
// h = 0.125, refined `levels` times. All boundary edges tagged Coupling.
TriMesh build_lshape_mesh(int levels);

// Capacitor domain (-2,2)^2 minus the electrodes [-0.8,-0.6]x[-0.8,0.8] and
// [0.6,0.8]x[-0.8,0.8]; outer boundary Coupling, electrodes Dirichlet(1)/(2).
// Start mesh has h = 1, symmetric under x -> -x.
TriMesh build_capacitor_mesh(int levels);

// Red refinement: every triangle into four via edge midpoints.
TriMesh uniform_refine(const TriMesh& mesh);

// Extract the part of the boundary carrying `tag` as ordered closed loops.
// Throws "no such boundary" if the tag is absent.
BoundaryMesh extract_boundary(const TriMesh& mesh, BoundaryTag tag);

// Halve every segment `levels` times. Children of segment e are contiguous,
// parent index = fine_index >> levels.
BoundaryMesh refine_boundary(const BoundaryMesh& bmesh, int levels);

TimeGrid build_time_grid(double T, int n_intervals);

// Structural checks (conformity, positive areas, closed loops, normals).
// Throws std::runtime_error with a description on the first violation.
void validate_mesh(const TriMesh& mesh);

// Plain-text dump for debugging: counts, vertices, triangles, tagged edges.
void dump_mesh(const TriMesh& mesh, std::ostream& os);

} // namespace fembem
