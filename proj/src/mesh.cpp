#include "fembem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace fembem {

double TriMesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    Point2 e1 = vertices[tri[1]] - vertices[tri[0]];
    Point2 e2 = vertices[tri[2]] - vertices[tri[0]];
    return 0.5 * cross(e1, e2);
}

double TriMesh::triangle_diameter(int t) const {
    const auto& tri = triangles[t];
    double d01 = dist(vertices[tri[0]], vertices[tri[1]]);
    double d12 = dist(vertices[tri[1]], vertices[tri[2]]);
    double d20 = dist(vertices[tri[2]], vertices[tri[0]]);
    return std::max({d01, d12, d20});
}

double TriMesh::triangle_inradius(int t) const {
    const auto& tri = triangles[t];
    double a = dist(vertices[tri[1]], vertices[tri[2]]);
    double b = dist(vertices[tri[2]], vertices[tri[0]]);
    double c = dist(vertices[tri[0]], vertices[tri[1]]);
    double s = 0.5 * (a + b + c);
    return triangle_area(t) / s;
}

Point2 TriMesh::centroid(int t) const {
    const auto& tri = triangles[t];
    return (1.0 / 3.0) * (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]);
}

double TriMesh::h_max() const {
    double h = 0.0;
    for (int t = 0; t < n_triangles(); ++t) h = std::max(h, triangle_diameter(t));
    return h;
}

double TriMesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < n_triangles(); ++t) a += triangle_area(t);
    return a;
}

double TriMesh::eta() const {
    double h = h_max();
    double m = std::numeric_limits<double>::max();
    for (int t = 0; t < n_triangles(); ++t) m = std::min(m, triangle_inradius(t));
    for (const auto& e : boundary_edges) m = std::min(m, dist(vertices[e.v0], vertices[e.v1]));
    return m / h;
}

double BoundaryMesh::total_length() const {
    double s = 0.0;
    for (const auto& e : segments) s += e.length;
    return s;
}

double BoundaryMesh::h_min() const {
    double h = std::numeric_limits<double>::max();
    for (const auto& e : segments) h = std::min(h, e.length);
    return h;
}

double BoundaryMesh::h_max() const {
    double h = 0.0;
    for (const auto& e : segments) h = std::max(h, e.length);
    return h;
}

double TimeGrid::tau_max() const {
    double t = 0.0;
    for (int n = 1; n <= n_intervals(); ++n) t = std::max(t, tau(n));
    return t;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Derive boundary edges from connectivity: edges adjacent to exactly one
// triangle, oriented as traversed by that (counterclockwise) triangle.
std::vector<BoundaryEdge> derive_boundary(const TriMesh& mesh) {
    std::map<EdgeKey, int> count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) count[edge_key(tri[k], tri[(k + 1) % 3])]++;
    std::vector<BoundaryEdge> edges;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (count[edge_key(a, b)] == 1) edges.push_back({a, b, coupling_tag()});
        }
    }
    return edges;
}

// Criss-cross triangulation over a tensor grid of cells, skipping cells whose
// centroid satisfies `skip`. Grid coordinates index a doubled lattice so that
// corners and cell centers dedup exactly without floating-point comparisons.
TriMesh criss_cross(const std::vector<double>& xs, const std::vector<double>& ys,
                    bool (*skip)(double, double)) {
    TriMesh mesh;
    std::map<std::pair<int, int>, int> vid;
    auto vertex = [&](int gx, int gy, Point2 p) {
        auto it = vid.find({gx, gy});
        if (it != vid.end()) return it->second;
        int id = mesh.n_vertices();
        mesh.vertices.push_back(p);
        vid.emplace(std::make_pair(gx, gy), id);
        return id;
    };
    const int nx = static_cast<int>(xs.size()) - 1;
    const int ny = static_cast<int>(ys.size()) - 1;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double cx = 0.5 * (xs[i] + xs[i + 1]);
            double cy = 0.5 * (ys[j] + ys[j + 1]);
            if (skip && skip(cx, cy)) continue;
            int bl = vertex(2 * i, 2 * j, {xs[i], ys[j]});
            int br = vertex(2 * i + 2, 2 * j, {xs[i + 1], ys[j]});
            int tr = vertex(2 * i + 2, 2 * j + 2, {xs[i + 1], ys[j + 1]});
            int tl = vertex(2 * i, 2 * j + 2, {xs[i], ys[j + 1]});
            int cc = vertex(2 * i + 1, 2 * j + 1, {cx, cy});
            mesh.triangles.push_back({bl, br, cc});
            mesh.triangles.push_back({br, tr, cc});
            mesh.triangles.push_back({tr, tl, cc});
            mesh.triangles.push_back({tl, bl, cc});
        }
    }
    mesh.boundary_edges = derive_boundary(mesh);
    return mesh;
}

bool lshape_skip(double cx, double cy) { return cx > 0.0 && cy < 0.0; }

bool capacitor_skip(double cx, double cy) {
    bool in_y = cy > -0.8 && cy < 0.8;
    bool in_x1 = cx > -0.8 && cx < -0.6;
    bool in_x2 = cx > 0.6 && cx < 0.8;
    return in_y && (in_x1 || in_x2);
}

} // namespace

TriMesh build_lshape_mesh(int levels) {
    if (levels < 0) throw std::invalid_argument("build_lshape_mesh: levels must be >= 0");
    std::vector<double> xs, ys;
    for (int i = 0; i <= 4; ++i) {
        xs.push_back(-0.25 + 0.125 * i);
        ys.push_back(-0.25 + 0.125 * i);
    }
    TriMesh mesh = criss_cross(xs, ys, &lshape_skip);
    for (int l = 0; l < levels; ++l) mesh = uniform_refine(mesh);
    return mesh;
}

TriMesh build_capacitor_mesh(int levels) {
    if (levels < 0) throw std::invalid_argument("build_capacitor_mesh: levels must be >= 0");
    std::vector<double> xs = {-2.0, -1.0, -0.8, -0.6, 0.0, 0.6, 0.8, 1.0, 2.0};
    std::vector<double> ys = {-2.0, -1.0, -0.8, 0.0, 0.8, 1.0, 2.0};
    TriMesh mesh = criss_cross(xs, ys, &capacitor_skip);
    // classify boundary edges: outer square is the coupling boundary, the
    // electrode rectangles are Dirichlet
    for (auto& e : mesh.boundary_edges) {
        Point2 m = midpoint(mesh.vertices[e.v0], mesh.vertices[e.v1]);
        const double tol = 1e-12;
        bool outer = std::abs(std::abs(m.x) - 2.0) < tol || std::abs(std::abs(m.y) - 2.0) < tol;
        if (outer)
            e.tag = coupling_tag();
        else
            e.tag = dirichlet_tag(m.x < 0.0 ? 1 : 2);
    }
    for (int l = 0; l < levels; ++l) mesh = uniform_refine(mesh);
    return mesh;
}

TriMesh uniform_refine(const TriMesh& mesh) {
    TriMesh out;
    out.vertices = mesh.vertices;
    std::map<EdgeKey, int> mid;
    auto midpoint_id = [&](int a, int b) {
        EdgeKey k = edge_key(a, b);
        auto it = mid.find(k);
        if (it != mid.end()) return it->second;
        int id = out.n_vertices();
        out.vertices.push_back(midpoint(mesh.vertices[a], mesh.vertices[b]));
        mid.emplace(k, id);
        return id;
    };
    out.triangles.reserve(4 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        int m01 = midpoint_id(tri[0], tri[1]);
        int m12 = midpoint_id(tri[1], tri[2]);
        int m20 = midpoint_id(tri[2], tri[0]);
        out.triangles.push_back({tri[0], m01, m20});
        out.triangles.push_back({tri[1], m12, m01});
        out.triangles.push_back({tri[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }
    out.boundary_edges.reserve(2 * mesh.boundary_edges.size());
    for (const auto& e : mesh.boundary_edges) {
        int m = midpoint_id(e.v0, e.v1);
        out.boundary_edges.push_back({e.v0, m, e.tag});
        out.boundary_edges.push_back({m, e.v1, e.tag});
    }
    return out;
}

BoundaryMesh extract_boundary(const TriMesh& mesh, BoundaryTag tag) {
    std::vector<const BoundaryEdge*> edges;
    for (const auto& e : mesh.boundary_edges)
        if (e.tag == tag) edges.push_back(&e);
    if (edges.empty()) throw std::runtime_error("extract_boundary: no such boundary");

    // follow the orientation: successor of an edge starts at its head
    std::map<int, int> by_tail; // tail vertex -> edge index
    for (size_t i = 0; i < edges.size(); ++i) {
        if (!by_tail.emplace(edges[i]->v0, static_cast<int>(i)).second)
            throw std::runtime_error("extract_boundary: boundary is not a 1-manifold");
    }

    BoundaryMesh bm;
    std::map<int, int> trace; // volume vertex -> trace index
    auto trace_id = [&](int v) {
        auto it = trace.find(v);
        if (it != trace.end()) return it->second;
        int id = bm.n_trace();
        bm.trace_vertices.push_back(v);
        trace.emplace(v, id);
        return id;
    };

    std::vector<bool> used(edges.size(), false);
    for (size_t start = 0; start < edges.size(); ++start) {
        if (used[start]) continue;
        int loop = bm.n_loops++;
        int i = static_cast<int>(start);
        while (!used[i]) {
            used[i] = true;
            const BoundaryEdge& e = *edges[i];
            BoundarySegment seg;
            seg.a = mesh.vertices[e.v0];
            seg.b = mesh.vertices[e.v1];
            seg.va = e.v0;
            seg.vb = e.v1;
            seg.ta = trace_id(e.v0);
            seg.tb = trace_id(e.v1);
            seg.length = dist(seg.a, seg.b);
            if (seg.length <= 0.0) throw std::runtime_error("extract_boundary: zero-length edge");
            Point2 d = (1.0 / seg.length) * (seg.b - seg.a);
            seg.normal = {d.y, -d.x}; // right-hand normal = outward (triangle on the left)
            seg.loop = loop;
            bm.segments.push_back(seg);
            auto it = by_tail.find(e.v1);
            if (it == by_tail.end())
                throw std::runtime_error("extract_boundary: boundary loop does not close");
            i = it->second;
        }
        if (edges[i]->v0 != edges[start]->v0)
            throw std::runtime_error("extract_boundary: boundary loop does not close");
    }
    return bm;
}

BoundaryMesh refine_boundary(const BoundaryMesh& bmesh, int levels) {
    BoundaryMesh cur = bmesh;
    for (int l = 0; l < levels; ++l) {
        BoundaryMesh next;
        next.n_loops = cur.n_loops;
        next.trace_vertices.clear(); // trace indices are rebuilt; volume ids of
                                     // midpoints are unknown and stay -1
        int tid = 0;
        for (const auto& s : cur.segments) {
            Point2 m = midpoint(s.a, s.b);
            BoundarySegment s1 = s, s2 = s;
            s1.b = m;
            s2.a = m;
            s1.length = dist(s1.a, s1.b);
            s2.length = dist(s2.a, s2.b);
            s1.va = s2.vb = -1;
            s1.ta = tid++;
            s1.tb = tid;
            s2.ta = tid++;
            s2.tb = tid;
            next.segments.push_back(s1);
            next.segments.push_back(s2);
        }
        next.trace_vertices.assign(tid, -1);
        cur = next;
    }
    return cur;
}

TimeGrid build_time_grid(double T, int n_intervals) {
    if (n_intervals < 1) throw std::invalid_argument("build_time_grid: need at least one interval");
    if (T <= 0.0) throw std::invalid_argument("build_time_grid: end time must be positive");
    TimeGrid g;
    g.nodes.resize(n_intervals + 1);
    for (int n = 0; n <= n_intervals; ++n) g.nodes[n] = T * n / n_intervals;
    g.nodes[0] = 0.0;
    g.nodes[n_intervals] = T;
    return g;
}

void validate_mesh(const TriMesh& mesh) {
    for (const auto& v : mesh.vertices)
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw std::runtime_error("mesh: non-finite vertex");
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (!(mesh.triangle_area(t) > 0.0))
            throw std::runtime_error("mesh: non-positive triangle area");

    std::map<EdgeKey, int> count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) count[edge_key(tri[k], tri[(k + 1) % 3])]++;

    std::map<EdgeKey, int> btimes;
    for (const auto& e : mesh.boundary_edges) btimes[edge_key(e.v0, e.v1)]++;

    for (const auto& [k, c] : count) {
        if (c == 1) {
            auto it = btimes.find(k);
            if (it == btimes.end() || it->second != 1)
                throw std::runtime_error("mesh: boundary edge not tagged exactly once");
        } else if (c == 2) {
            if (btimes.count(k)) throw std::runtime_error("mesh: interior edge tagged as boundary");
        } else {
            throw std::runtime_error("mesh: non-conforming edge");
        }
    }
    if (btimes.size() != mesh.boundary_edges.size())
        throw std::runtime_error("mesh: duplicate boundary edge");

    // closed loops: every boundary vertex has exactly one outgoing and one
    // incoming boundary edge
    std::map<int, int> out_deg, in_deg;
    for (const auto& e : mesh.boundary_edges) {
        out_deg[e.v0]++;
        in_deg[e.v1]++;
    }
    for (const auto& [v, d] : out_deg) {
        if (d != 1 || in_deg[v] != 1)
            throw std::runtime_error("mesh: boundary loops do not close");
    }

    // outward orientation: normal points away from the adjacent triangle
    std::map<EdgeKey, int> tri_of_edge;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            EdgeKey key = edge_key(tri[k], tri[(k + 1) % 3]);
            if (count[key] == 1) tri_of_edge[key] = t;
        }
    }
    for (const auto& e : mesh.boundary_edges) {
        Point2 a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
        Point2 d = b - a;
        Point2 n{d.y, -d.x};
        int t = tri_of_edge.at(edge_key(e.v0, e.v1));
        Point2 c = mesh.centroid(t);
        if (!(dot(n, midpoint(a, b) - c) > 0.0))
            throw std::runtime_error("mesh: boundary edge oriented with triangle on the right");
    }
}

void dump_mesh(const TriMesh& mesh, std::ostream& os) {
    os.precision(17);
    os << mesh.n_vertices() << ' ' << mesh.n_triangles() << ' ' << mesh.boundary_edges.size()
       << '\n';
    for (const auto& v : mesh.vertices) os << v.x << ' ' << v.y << '\n';
    for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : mesh.boundary_edges) {
        os << e.v0 << ' ' << e.v1 << ' ';
        if (e.tag.kind == BoundaryKind::Coupling)
            os << "coupling\n";
        else
            os << "dirichlet " << e.tag.label << '\n';
    }
}

} // namespace fembem
