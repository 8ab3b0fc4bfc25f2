#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "fembem/mesh.hpp"

using namespace fembem;

TEST_CASE("lshape start mesh") {
    TriMesh mesh = build_lshape_mesh(0);
    CHECK(mesh.n_triangles() == 48);
    CHECK(mesh.h_max() == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(mesh.total_area() == doctest::Approx(0.1875).epsilon(1e-14));
    double blen = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        CHECK(e.tag.kind == BoundaryKind::Coupling);
        blen += dist(mesh.vertices[e.v0], mesh.vertices[e.v1]);
    }
    CHECK(blen == doctest::Approx(2.0).epsilon(1e-14));
    validate_mesh(mesh);
}

TEST_CASE("uniform refinement preserves structure") {
    for (bool capacitor : {false, true}) {
        TriMesh mesh = capacitor ? build_capacitor_mesh(0) : build_lshape_mesh(0);
        double area = mesh.total_area();
        double eta = mesh.eta();
        for (int l = 0; l < 3; ++l) {
            TriMesh fine = uniform_refine(mesh);
            validate_mesh(fine);
            CHECK(fine.n_triangles() == 4 * mesh.n_triangles());
            CHECK(fine.h_max() == doctest::Approx(0.5 * mesh.h_max()).epsilon(1e-13));
            CHECK(fine.total_area() == doctest::Approx(area).epsilon(1e-12));
            CHECK(fine.eta() == doctest::Approx(eta).epsilon(1e-12));
            mesh = fine;
        }
    }
}

TEST_CASE("capacitor mesh geometry") {
    TriMesh mesh = build_capacitor_mesh(0);
    validate_mesh(mesh);
    CHECK(mesh.h_max() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mesh.total_area() == doctest::Approx(15.36).epsilon(1e-13));

    BoundaryMesh coupling = extract_boundary(mesh, coupling_tag());
    CHECK(coupling.total_length() == doctest::Approx(16.0).epsilon(1e-13));
    CHECK(coupling.n_loops == 1);

    BoundaryMesh e1 = extract_boundary(mesh, dirichlet_tag(1));
    BoundaryMesh e2 = extract_boundary(mesh, dirichlet_tag(2));
    CHECK(e1.total_length() == doctest::Approx(3.6).epsilon(1e-13));
    CHECK(e2.total_length() == doctest::Approx(3.6).epsilon(1e-13));

    // vertex set symmetric under x -> -x
    std::set<std::pair<double, double>> pts;
    for (const auto& v : mesh.vertices) pts.insert({v.x, v.y});
    for (const auto& v : mesh.vertices) CHECK(pts.count({-v.x, v.y}) == 1);
}

TEST_CASE("capacitor refinement reaches the paper mesh size") {
    TriMesh mesh = build_capacitor_mesh(5);
    CHECK(mesh.h_max() == doctest::Approx(0.03125).epsilon(1e-13));
}

TEST_CASE("extract_boundary") {
    TriMesh mesh = build_lshape_mesh(0);
    BoundaryMesh bm = extract_boundary(mesh, coupling_tag());
    CHECK(bm.n_segments() == static_cast<int>(mesh.boundary_edges.size()));
    CHECK(bm.total_length() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(bm.n_loops == 1);
    CHECK(bm.n_trace() == bm.n_segments()); // closed loop

    // closed polygon: sum of length * normal vanishes
    Point2 s{0.0, 0.0};
    for (const auto& seg : bm.segments) s = s + seg.length * seg.normal;
    CHECK(norm(s) < 1e-14);

    CHECK_THROWS_WITH_AS(extract_boundary(mesh, dirichlet_tag(1)),
                         doctest::Contains("no such boundary"), std::runtime_error);
}

TEST_CASE("boundary refinement") {
    TriMesh mesh = build_lshape_mesh(1);
    BoundaryMesh bm = extract_boundary(mesh, coupling_tag());
    BoundaryMesh fine = refine_boundary(bm, 2);
    CHECK(fine.n_segments() == 4 * bm.n_segments());
    CHECK(fine.total_length() == doctest::Approx(bm.total_length()).epsilon(1e-14));
    // children stay contiguous: parent of fine segment i is i >> 2
    for (int i = 0; i < fine.n_segments(); ++i) {
        const auto& f = fine.segments[i];
        const auto& c = bm.segments[i >> 2];
        CHECK(segment_distance(midpoint(f.a, f.b), c.a, c.b) < 1e-14);
    }
}

TEST_CASE("time grids") {
    TimeGrid g = build_time_grid(1.0, 20);
    CHECK(g.n_intervals() == 20);
    CHECK(g.tau(1) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(g.tau_max() == doctest::Approx(0.05).epsilon(1e-15));

    TimeGrid g1 = build_time_grid(1.0, 1);
    CHECK(g1.nodes.size() == 2);
    CHECK(g1.nodes[0] == 0.0);
    CHECK(g1.nodes[1] == 1.0);

    TimeGrid g640 = build_time_grid(1.0, 640);
    CHECK(g640.tau(640) == doctest::Approx(0.0015625).epsilon(1e-15));

    CHECK_THROWS(build_time_grid(0.0, 4));
    CHECK_THROWS(build_time_grid(1.0, 0));
}

TEST_CASE("mesh dump") {
    TriMesh mesh = build_lshape_mesh(0);
    std::ostringstream os;
    dump_mesh(mesh, os);
    std::istringstream is(os.str());
    int nv, nt, nb;
    is >> nv >> nt >> nb;
    CHECK(nv == mesh.n_vertices());
    CHECK(nt == mesh.n_triangles());
    CHECK(nb == static_cast<int>(mesh.boundary_edges.size()));
}
