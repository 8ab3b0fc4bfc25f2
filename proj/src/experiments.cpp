#include "fembem/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fembem {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Point2 kLogCenter{-0.125, 0.125};

// Mexican-hat spatial profile shared by the smooth and time-singular cases
double hat_value(Point2 x) {
    double r2 = x.x * x.x + x.y * x.y;
    return (1.0 - 100.0 * r2) * std::exp(-50.0 * r2);
}

Point2 hat_gradient(Point2 x) {
    double r2 = x.x * x.x + x.y * x.y;
    double f = (10000.0 * r2 - 300.0) * std::exp(-50.0 * r2);
    return {f * x.x, f * x.y};
}

double hat_laplacian(Point2 x) {
    double r2 = x.x * x.x + x.y * x.y;
    return (-1000000.0 * r2 * r2 + 70000.0 * r2 - 600.0) * std::exp(-50.0 * r2);
}

double ue_value(Point2 x, double t) { return (1.0 - t) * std::log(dist(x, kLogCenter)); }

double ue_flux(Point2 x, Point2 n, double t) {
    Point2 d = x - kLogCenter;
    return (1.0 - t) * dot(n, d) / dot(d, d);
}

std::atomic<long long> g_corner_guard{0};

double corner_w(Point2 x) {
    double r = norm(x);
    double phi = std::atan2(x.y, x.x);
    if (phi < 0.0) phi += 2.0 * kPi;
    return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * phi / 3.0);
}

Point2 corner_grad_w(Point2 x) {
    double r = norm(x);
    if (r < 1e-300) {
        g_corner_guard.fetch_add(1, std::memory_order_relaxed);
        r = 1e-300;
    }
    double phi = std::atan2(x.y, x.x);
    if (phi < 0.0) phi += 2.0 * kPi;
    double f = (2.0 / 3.0) * std::pow(r, -1.0 / 3.0);
    double s = std::sin(2.0 * phi / 3.0), c = std::cos(2.0 * phi / 3.0);
    Point2 er{std::cos(phi), std::sin(phi)};
    Point2 ep{-std::sin(phi), std::cos(phi)};
    return {f * (s * er.x + c * ep.x), f * (s * er.y + c * ep.y)};
}

ManufacturedCase make_case(const std::string& name,
                           const std::function<double(double)>& time_factor,
                           const std::function<double(double)>& time_factor_dt,
                           bool corner) {
    ManufacturedCase mc;
    mc.name = name;

    auto u_val = [=](Point2 x, double t) {
        return time_factor(t) * (corner ? corner_w(x) : hat_value(x));
    };
    auto u_grad = [=](Point2 x, double t) {
        Point2 g = corner ? corner_grad_w(x) : hat_gradient(x);
        return time_factor(t) * g;
    };
    auto u_dt = [=](Point2 x, double t) {
        return time_factor_dt(t) * (corner ? corner_w(x) : hat_value(x));
    };
    // f = dt u - Delta u; the corner profile is harmonic
    auto f_val = [=](Point2 x, double t) {
        double f = u_dt(x, t);
        if (!corner) f -= time_factor(t) * hat_laplacian(x);
        return f;
    };

    mc.data.f = {f_val, nullptr, nullptr};
    mc.data.g = {[=](Point2 x, double t) { return u_val(x, t) - ue_value(x, t); }, nullptr,
                 nullptr};
    mc.data.h = {[=](Point2 x, Point2 n, double t) {
        return dot(u_grad(x, t), n) - ue_flux(x, n, t);
    }};
    mc.data.diffusion = 1.0;
    mc.data.end_time = 1.0;
    if (corner) // u(.,0) = w is nonzero; start from its L2 projection
        mc.data.initial = {[=](Point2 x, double t) {
                               (void)t;
                               return time_factor(0.0) * corner_w(x);
                           },
                           nullptr, nullptr};

    mc.exact.u = {u_val, u_grad, u_dt};
    mc.exact.ue_trace = {ue_value, nullptr, nullptr};
    mc.exact.flux = {ue_flux};
    return mc;
}

} // namespace

ManufacturedCase make_case_smooth() {
    return make_case(
        "smooth", [](double t) { return std::sin(2.0 * kPi * t); },
        [](double t) { return 2.0 * kPi * std::cos(2.0 * kPi * t); }, false);
}

ManufacturedCase make_case_corner() {
    return make_case(
        "corner", [](double t) { return 1.0 + t * t; }, [](double t) { return 2.0 * t; }, true);
}

ManufacturedCase make_case_time_singular() {
    return make_case(
        "time_singular", [](double t) { return std::pow(t, 5.0 / 6.0); },
        [](double t) { return (5.0 / 6.0) * std::pow(t, -1.0 / 6.0); }, false);
}

long long corner_guard_hits() { return g_corner_guard.load(); }
void reset_corner_guard() { g_corner_guard.store(0); }

ExperimentKind experiment_from_string(const std::string& name) {
    if (name == "smooth") return ExperimentKind::Smooth;
    if (name == "corner") return ExperimentKind::Corner;
    if (name == "time_singular") return ExperimentKind::TimeSingular;
    if (name == "capacitor") return ExperimentKind::Capacitor;
    throw std::invalid_argument("unknown experiment: " + name);
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::Smooth: return "smooth";
    case ExperimentKind::Corner: return "corner";
    case ExperimentKind::TimeSingular: return "time_singular";
    case ExperimentKind::Capacitor: return "capacitor";
    }
    return "?";
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "experiment")
            base.experiment = experiment_from_string(val);
        else if (key == "levels")
            base.levels = std::stoi(val);
        else if (key == "scheme")
            base.scheme = (val == "cn") ? WeightVariant::CrankNicolson : WeightVariant::Euler;
        else if (key == "out")
            base.out_dir = val;
        else if (key == "volume_degree")
            base.quad.volume_degree = std::stoi(val);
        else if (key == "edge_points")
            base.quad.edge_points = std::stoi(val);
        else if (key == "time_points")
            base.quad.time_points = std::stoi(val);
        else if (key == "first_interval_panels")
            base.quad.first_interval_panels = std::stoi(val);
        else if (key == "v_refine_extra")
            base.v_refine_extra = std::stoi(val);
        else if (key == "grid_x0")
            base.grid_x0 = std::stod(val);
        else if (key == "grid_x1")
            base.grid_x1 = std::stod(val);
        else if (key == "grid_y0")
            base.grid_y0 = std::stod(val);
        else if (key == "grid_y1")
            base.grid_y1 = std::stod(val);
        else if (key == "grid_nx")
            base.grid_nx = std::stoi(val);
        else if (key == "grid_ny")
            base.grid_ny = std::stoi(val);
        else if (key == "capacitor_rescale")
            base.capacitor_rescale = (val == "1" || val == "true" || val == "on");
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
    return base;
}

namespace {

ManufacturedCase case_for(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::Smooth: return make_case_smooth();
    case ExperimentKind::Corner: return make_case_corner();
    case ExperimentKind::TimeSingular: return make_case_time_singular();
    default: throw std::invalid_argument("run_experiment: not a manufactured study");
    }
}

} // namespace

ErrorReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == ExperimentKind::Capacitor)
        throw std::invalid_argument("run_experiment: use run_capacitor for the demo");
    if (cfg.levels < 1) throw std::invalid_argument("run_experiment: levels must be >= 1");
    ManufacturedCase mc = case_for(cfg.experiment);
    ErrorReport report;
    for (int level = 0; level < cfg.levels; ++level) {
        try {
            TriMesh mesh = build_lshape_mesh(level);
            TimeGrid tgrid = build_time_grid(1.0, 20 << level);
            CoupledTrajectory traj =
                solve_evolution(mc.data, mesh, tgrid, cfg.scheme, cfg.quad);
            report.rows.push_back(
                measure_errors(traj, mc.exact, cfg.quad, cfg.v_refine_extra));
        } catch (const std::exception& e) {
            throw std::runtime_error(mc.name + " level " + std::to_string(level) + ": " +
                                     e.what());
        }
    }
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_table(report, cfg.out_dir + "/" + mc.name + ".dat");
    }
    return report;
}

CapacitorResult run_capacitor(const ExperimentConfig& cfg) {
    TriMesh mesh = build_capacitor_mesh(cfg.levels);
    if (cfg.capacitor_rescale)
        for (auto& v : mesh.vertices) v = 0.125 * v;

    ProblemData data;
    data.diffusion = 5.0;
    data.end_time = 1.0;
    data.dirichlet.values[1] = [](Point2, double t) { return t < 0.5 ? -1.0 : 1.0; };
    data.dirichlet.values[2] = [](Point2, double t) { return t < 0.5 ? 1.0 : -1.0; };

    const int n_steps = 20 << cfg.levels; // tau = 0.05 / 2^levels
    TimeGrid tgrid = build_time_grid(1.0, n_steps);
    CoupledTrajectory traj = solve_evolution(data, mesh, tgrid, cfg.scheme, cfg.quad);

    CapacitorResult result;
    for (const auto& un : traj.u) result.max_abs_u = std::max(result.max_abs_u, un.lpNorm<Eigen::Infinity>());

    // mirror map for the antisymmetry check (the vertex set is exactly
    // symmetric under x -> -x)
    std::map<std::pair<double, double>, int> index_of;
    for (int i = 0; i < mesh.n_vertices(); ++i)
        index_of[{mesh.vertices[i].x, mesh.vertices[i].y}] = i;
    std::vector<int> mirror(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        auto it = index_of.find({-mesh.vertices[i].x, mesh.vertices[i].y});
        if (it == index_of.end())
            throw std::runtime_error("capacitor mesh is not symmetric under x -> -x");
        mirror[i] = it->second;
    }
    for (const auto& un : traj.u)
        for (int i = 0; i < mesh.n_vertices(); ++i)
            result.antisymmetry_defect =
                std::max(result.antisymmetry_defect, std::abs(un[mirror[i]] + un[i]));

    // exterior sampling grid, points inside the closure skipped
    std::vector<Point2> pts;
    for (int j = 0; j < cfg.grid_ny; ++j) {
        for (int i = 0; i < cfg.grid_nx; ++i) {
            Point2 p{cfg.grid_x0 + (cfg.grid_x1 - cfg.grid_x0) * i / (cfg.grid_nx - 1.0),
                     cfg.grid_y0 + (cfg.grid_y1 - cfg.grid_y0) * j / (cfg.grid_ny - 1.0)};
            if (point_inside_closure(traj.boundary, p)) {
                ++result.skipped_points;
                continue;
            }
            pts.push_back(p);
        }
    }

    BemSpacePair pair{&traj.boundary};
    const std::vector<double> snapshots = {0.0125, 0.05, 0.4875, 0.5, 0.6, 1.0};
    if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
    for (double ts : snapshots) {
        int n = static_cast<int>(std::lround(ts * n_steps / tgrid.end_time()));
        n = std::max(1, std::min(n, n_steps));
        double t = tgrid.nodes[n];
        result.snapshot_times.push_back(t);
        if (cfg.out_dir.empty()) continue;

        Vector trace(traj.boundary.n_trace());
        for (int k = 0; k < traj.boundary.n_trace(); ++k)
            trace[k] = traj.u[n][traj.boundary.trace_vertices[k]];
        ExteriorField ext = evaluate_exterior(pair, trace, traj.phi[n - 1], pts);

        char name[64];
        std::snprintf(name, sizeof(name), "capacitor_t%.6g.dat", t);
        std::string path = cfg.out_dir + "/" + name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out.precision(17);
        out << "# x y value region (t = " << t << ")\n";
        for (int i = 0; i < mesh.n_vertices(); ++i)
            out << mesh.vertices[i].x << ' ' << mesh.vertices[i].y << ' ' << traj.u[n][i]
                << " interior\n";
        for (size_t k = 0; k < pts.size(); ++k)
            out << pts[k].x << ' ' << pts[k].y << ' ' << ext.values[k] << " exterior\n";
        result.files.push_back(path);
    }
    if (result.skipped_points > 0)
        std::fprintf(stderr, "run_capacitor: skipped %d sampling points inside the domain\n",
                     result.skipped_points);
    return result;
}

namespace {

const char* const kColumns[] = {"invmaxMeshsizeh", "numberTimeintervals", "errorL2",
                                "errorL2proj",     "errorH1semi",         "errorH1semiproj",
                                "errorH1dual",     "errorenergyV",        "errorenergyVproj",
                                "globalEnergy",    "globalEnergyproj"};

std::vector<double> column_values(const ErrorReport& r, int col) {
    std::vector<double> v;
    for (const auto& row : r.rows) {
        const double vals[] = {row.inv_h,
                               static_cast<double>(row.n_time_intervals),
                               row.errorL2,
                               row.errorL2proj,
                               row.errorH1semi,
                               row.errorH1semiproj,
                               row.errorH1dual,
                               row.errorenergyV,
                               row.errorenergyVproj,
                               row.globalEnergy,
                               row.globalEnergyproj};
        v.push_back(vals[col]);
    }
    return v;
}

} // namespace

void write_table(const ErrorReport& report, const std::string& path) {
    if (report.rows.empty()) throw std::invalid_argument("write_table: empty report");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (const char* c : kColumns) out << c << ' ';
    for (int c = 2; c < 11; ++c) out << "eoc" << (kColumns[c] + 5) << ' ';
    out << '\n';

    std::vector<double> hs;
    for (const auto& row : report.rows) hs.push_back(1.0 / row.inv_h);
    for (size_t l = 0; l < report.rows.size(); ++l) {
        for (int c = 0; c < 11; ++c) out << column_values(report, c)[l] << ' ';
        for (int c = 2; c < 11; ++c) {
            if (l == 0) {
                out << "nan ";
                continue;
            }
            auto vals = column_values(report, c);
            auto rates = compute_eoc(vals, hs);
            out << rates[l - 1] << ' ';
        }
        out << '\n';
    }
}

ErrorReport read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string header;
    std::getline(in, header);
    ErrorReport report;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        ErrorRow row;
        double nti;
        ss >> row.inv_h >> nti >> row.errorL2 >> row.errorL2proj >> row.errorH1semi >>
            row.errorH1semiproj >> row.errorH1dual >> row.errorenergyV >> row.errorenergyVproj >>
            row.globalEnergy >> row.globalEnergyproj;
        if (!ss) throw std::runtime_error("read_table: malformed row");
        row.n_time_intervals = static_cast<int>(nti);
        report.rows.push_back(row);
    }
    return report;
}

std::string format_eoc_summary(const ErrorReport& report) {
    std::ostringstream os;
    os.precision(3);
    if (report.rows.size() < 2) return "(need at least two levels for slopes)\n";
    std::vector<double> hs;
    for (const auto& row : report.rows) hs.push_back(1.0 / row.inv_h);
    for (int c = 2; c < 11; ++c) {
        auto rates = compute_eoc(column_values(report, c), hs);
        os << kColumns[c] << ": ";
        for (double r : rates) os << r << ' ';
        os << '\n';
    }
    return os.str();
}

} // namespace fembem
