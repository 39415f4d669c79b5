#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "platemodes/sweep.hpp"

namespace platemodes {

// How the starting mode of a solve or sweep is found.
struct ModeSearch {
    enum class Method { Newton, Bisection, Roots, Lowest };

    Method method = Method::Newton;
    double lambda_guess = 0.0;
    std::vector<double> alpha_guess;  // empty: equal strengths
    // bisection: explicit mu bracket, else expansion around lambda_guess
    double mu_lo = 0.0, mu_hi = 0.0;
    double rel_width = 1e-3;
    int max_expand = 4;
    // roots: inertia walk over [mu_lo, mu_hi]; lowest: up to mu_max
    double mu_max = 0.0, mu_step = 0.01;
};

struct RunConfig {
    enum class Task { Solve, Sweep, Unclamped, Field, Convergence, DiskValidate };

    Task task = Task::Solve;
    ShapeSpec geometry = ShapeSpec::circle(1.0);
    int N = 128;
    std::vector<int> N_list;  // convergence and disk-validate
    NewtonOptions newton;

    // solve, field, convergence
    std::vector<Vec2> clamps;
    ModeSearch search;

    // field lattice
    int nx = 101, ny = 101;

    // sweep; one trace per entry of M_list for pattern families with M.
    // Each segment is swept from its own starting mode and the segments are
    // merged into one trace.
    PatternFamily family;
    std::vector<int> M_list;
    std::vector<std::pair<double, double>> segments;
    bool bisection = false;
    double dr0 = 0.0, dr_min = 0.0;
    int max_halvings = 6;

    // unclamped scan
    double mu_lo = 0.0, mu_hi = 0.0, grid_step = 0.02;

    nlohmann::json source;  // the config as read
};

std::string task_name(RunConfig::Task task);

// Throws ConfigError naming the line and column of a syntax error or the
// JSON pointer of the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace platemodes
