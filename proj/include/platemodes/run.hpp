#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "platemodes/config.hpp"

namespace platemodes {

inline constexpr const char* kVersion = "0.1.0";

// Exit statuses of a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

struct RunOutcome {
    int status = kExitOk;
    nlohmann::json manifest;
};

// Starting mode for a solve: Newton, bisection, inertia walk or lowest mode
// as selected by `search`.
ModeSolution find_mode(const ModeProblem& problem, const ModeSearch& search, const NewtonOptions& newton);

// Executes the task, writing its CSV files and manifest.json into out_dir.
// Solver failures are reported through the status and the manifest, not
// thrown. threads <= 0 leaves the OpenMP default.
RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir, int threads = 0);

// Field of a converged mode on an nx x ny lattice over the plate's bounding
// box, rows y-major; u is NaN outside the plate.
struct FieldGrid {
    std::vector<double> x, y, u;
};
FieldGrid mode_lattice(const Discretization& disc, const ModeSolution& mode, int nx, int ny);

std::string format_double(double v);

}  // namespace platemodes
