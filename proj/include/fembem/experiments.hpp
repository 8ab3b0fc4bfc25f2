#pragma once

#include <string>
#include <vector>

#include "fembem/errors.hpp"

namespace fembem {

// Manufactured problem: model data plus the exact solution used for the
// error measurements. The exterior solution is the same shifted logarithm
// for all three cases.
struct ManufacturedCase {
    std::string name;
    ProblemData data;
    ExactSolution exact;
};

ManufacturedCase make_case_smooth();        // sin(2 pi t) Mexican hat
ManufacturedCase make_case_corner();        // (1+t^2) r^(2/3) sin(2 phi / 3)
ManufacturedCase make_case_time_singular(); // t^(5/6) Mexican hat

// Number of times the corner gradient hit its r-floor guard; must stay zero
// on the shipped meshes.
long long corner_guard_hits();
void reset_corner_guard();

enum class ExperimentKind { Smooth, Corner, TimeSingular, Capacitor };

ExperimentKind experiment_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Smooth;
    int levels = 4; // study: number of rows; capacitor: refinements of the run
    WeightVariant scheme = WeightVariant::Euler;
    QuadConfig quad;
    int v_refine_extra = 2;
    std::string out_dir;
    // capacitor exterior sampling grid
    double grid_x0 = -4.0, grid_x1 = 4.0, grid_y0 = -4.0, grid_y1 = 4.0;
    int grid_nx = 81, grid_ny = 81;
    bool capacitor_rescale = false; // scale geometry by 1/8 (diam < 1, V SPD)
};

// Flat key=value file; keys mirror the config fields. Lines starting with '#'
// and blank lines are ignored. Unknown keys raise an error.
ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base);

// Convergence study on the L-shape: level l uses h = 0.125 / 2^l and
// tau = 0.05 / 2^l, refined simultaneously. Writes <out>/<name>.dat when an
// output directory is configured.
ErrorReport run_experiment(const ExperimentConfig& cfg);

struct CapacitorResult {
    std::vector<double> snapshot_times;
    std::vector<std::string> files;
    int skipped_points = 0;
    double antisymmetry_defect = 0.0; // max |u(-x,y,t) + u(x,y,t)| over nodes
    double max_abs_u = 0.0;
};

// Capacitor demo: diffusion 5, electrode charges +-1 with polarity reversal
// at t = 0.5, interior field at the vertices and exterior field on the grid
// at the six snapshot times, one file per snapshot.
CapacitorResult run_capacitor(const ExperimentConfig& cfg);

void write_table(const ErrorReport& report, const std::string& path);
ErrorReport read_table(const std::string& path);

// log-log slopes between consecutive rows, printed by the CLI on request
std::string format_eoc_summary(const ErrorReport& report);

} // namespace fembem
