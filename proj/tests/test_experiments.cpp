#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fembem/experiments.hpp"

using namespace fembem;

namespace {

// finite-difference cross-check of the manufactured data construction
void check_case_consistency(const ManufacturedCase& mc, Point2 x, double t) {
    const double eps = 1e-6;
    double u = mc.exact.u.value(x, t);
    CHECK(std::isfinite(u));

    Point2 g = mc.exact.u.gradient(x, t);
    double gx = (mc.exact.u.value({x.x + eps, x.y}, t) - mc.exact.u.value({x.x - eps, x.y}, t)) /
                (2.0 * eps);
    double gy = (mc.exact.u.value({x.x, x.y + eps}, t) - mc.exact.u.value({x.x, x.y - eps}, t)) /
                (2.0 * eps);
    double gscale = 1.0 + norm(g);
    CHECK(std::abs(g.x - gx) <= 2e-5 * gscale);
    CHECK(std::abs(g.y - gy) <= 2e-5 * gscale);

    double dt = mc.exact.u.dt(x, t);
    double dtf =
        (mc.exact.u.value(x, t + eps) - mc.exact.u.value(x, t - eps)) / (2.0 * eps);
    CHECK(std::abs(dt - dtf) <= 2e-5 * (1.0 + std::abs(dt)));

    // f = dt u - Delta u, Laplacian by 5-point stencil
    double lap = (mc.exact.u.value({x.x + eps, x.y}, t) + mc.exact.u.value({x.x - eps, x.y}, t) +
                  mc.exact.u.value({x.x, x.y + eps}, t) + mc.exact.u.value({x.x, x.y - eps}, t) -
                  4.0 * u) /
                 (eps * eps);
    double f = mc.data.f.value(x, t);
    CHECK(std::abs(f - (dt - lap)) <= 5e-3 * (1.0 + std::abs(f)));

    // jump data: g = u - u_e and h = dn u - phi on the boundary
    Point2 n{0.6, 0.8};
    double ue = mc.exact.ue_trace.value(x, t);
    CHECK(mc.data.g.value(x, t) == doctest::Approx(u - ue).epsilon(1e-12));
    double flux = mc.exact.flux.value(x, n, t);
    CHECK(mc.data.h.value(x, n, t) == doctest::Approx(dot(g, n) - flux).epsilon(1e-10));
}

} // namespace

TEST_CASE("manufactured cases are internally consistent") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uni(0.05, 0.2);
    for (const ManufacturedCase& mc :
         {make_case_smooth(), make_case_corner(), make_case_time_singular()}) {
        for (int trial = 0; trial < 8; ++trial) {
            // stay in the left half of the L-shape, away from the reentrant corner
            Point2 x{-uni(rng), uni(rng) * (trial % 2 ? 1.0 : -1.0)};
            double t = 0.15 + 0.7 * uni(rng);
            CAPTURE(mc.name);
            check_case_consistency(mc, x, t);
        }
    }
}

TEST_CASE("the corner case carries nonzero initial data, the others do not") {
    CHECK(!make_case_smooth().data.initial.value);
    CHECK(!make_case_time_singular().data.initial.value);
    ManufacturedCase corner = make_case_corner();
    REQUIRE(corner.data.initial.value);
    Point2 x{-0.1, 0.1};
    CHECK(corner.data.initial.value(x, 0.0) ==
          doctest::Approx(corner.exact.u.value(x, 0.0)).epsilon(1e-13));
}

TEST_CASE("table writing round-trips at full precision") {
    ErrorReport report;
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uni(1e-8, 1.0);
    for (int l = 0; l < 3; ++l) {
        ErrorRow row;
        row.inv_h = 8.0 * (1 << l);
        row.n_time_intervals = 20 << l;
        row.errorL2 = uni(rng);
        row.errorL2proj = uni(rng);
        row.errorH1semi = uni(rng);
        row.errorH1semiproj = uni(rng);
        row.errorH1dual = uni(rng);
        row.errorenergyV = uni(rng);
        row.errorenergyVproj = uni(rng);
        row.globalEnergy = uni(rng);
        row.globalEnergyproj = uni(rng);
        report.rows.push_back(row);
    }
    auto dir = std::filesystem::temp_directory_path() / "fembem_table_test";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "table.dat").string();
    write_table(report, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    for (const char* col :
         {"invmaxMeshsizeh", "numberTimeintervals", "errorL2", "errorL2proj", "errorH1semi",
          "errorH1semiproj", "errorH1dual", "errorenergyV", "errorenergyVproj", "globalEnergy",
          "globalEnergyproj"})
        CHECK(header.find(col) != std::string::npos);

    ErrorReport back = read_table(path);
    REQUIRE(back.rows.size() == report.rows.size());
    for (size_t l = 0; l < report.rows.size(); ++l) {
        CHECK(back.rows[l].errorL2 == report.rows[l].errorL2);
        CHECK(back.rows[l].errorH1dual == report.rows[l].errorH1dual);
        CHECK(back.rows[l].globalEnergyproj == report.rows[l].globalEnergyproj);
        CHECK(back.rows[l].n_time_intervals == report.rows[l].n_time_intervals);
    }

    ErrorReport empty;
    CHECK_THROWS(write_table(empty, path));
}

TEST_CASE("config files parse and cli values override") {
    auto dir = std::filesystem::temp_directory_path() / "fembem_config_test";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "run.cfg").string();
    {
        std::ofstream out(path);
        out << "# demo config\n";
        out << "experiment = corner\n";
        out << "levels = 3\n";
        out << "scheme = cn\n";
        out << "time_points = 6\n";
        out << "grid_nx = 11\n";
    }
    ExperimentConfig cfg = parse_config_file(path, ExperimentConfig{});
    CHECK(cfg.experiment == ExperimentKind::Corner);
    CHECK(cfg.levels == 3);
    CHECK(cfg.scheme == WeightVariant::CrankNicolson);
    CHECK(cfg.quad.time_points == 6);
    CHECK(cfg.grid_nx == 11);

    {
        std::ofstream out(path);
        out << "nonsense = 1\n";
    }
    CHECK_THROWS(parse_config_file(path, ExperimentConfig{}));
    CHECK_THROWS(experiment_from_string("bogus"));
}

TEST_CASE("smooth and time-singular studies share the level-0 FEM matrices") {
    // both cases run on the same geometry; only the time factor differs
    TriMesh m1 = build_lshape_mesh(0);
    TriMesh m2 = build_lshape_mesh(0);
    FemSpace s1{&m1}, s2{&m2};
    SparseMatrix mass1 = assemble_mass(s1), mass2 = assemble_mass(s2);
    SparseMatrix a1 = assemble_stiffness(s1, 1.0), a2 = assemble_stiffness(s2, 1.0);
    CHECK(SparseMatrix(mass1 - mass2).norm() == 0.0);
    CHECK(SparseMatrix(a1 - a2).norm() == 0.0);
}

TEST_CASE("two-level smooth study sanity") {
    reset_corner_guard();
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Smooth;
    cfg.levels = 2;
    ErrorReport report = run_experiment(cfg);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].errorL2 > report.rows[1].errorL2);
    CHECK(report.rows[0].errorH1semi > report.rows[1].errorH1semi);
    CHECK(report.rows[0].globalEnergy > report.rows[1].globalEnergy);
    CHECK(report.rows[1].inv_h == doctest::Approx(16.0));
    CHECK(report.rows[1].n_time_intervals == 40);
}

TEST_CASE("one-level corner study leaves the gradient guard untouched") {
    reset_corner_guard();
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Corner;
    cfg.levels = 1;
    ErrorReport report = run_experiment(cfg);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].errorH1semi > 0.0);
    CHECK(corner_guard_hits() == 0);
}

TEST_CASE("experiment input validation") {
    ExperimentConfig cfg;
    cfg.levels = 0;
    CHECK_THROWS(run_experiment(cfg));
    cfg.levels = 1;
    cfg.experiment = ExperimentKind::Capacitor;
    CHECK_THROWS(run_experiment(cfg));
}
