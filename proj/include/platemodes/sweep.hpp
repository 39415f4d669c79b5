#pragma once

#include <string>
#include <vector>

#include "platemodes/modes.hpp"

namespace platemodes {

struct PatternFamily {
    enum class Kind { Ring, EllipsePattern, RectanglePattern, LinePath, EllipsePath };

    Kind kind = Kind::Ring;
    int M = 1;
    // ellipse-pattern, rectangle-pattern and ellipse-path semi-axes; p is
    // the rectangle-pattern exponent
    double a = 1.0, b = 1.0;
    int p = 16;
    // line-path endpoints
    Vec2 start = Vec2::Zero(), end = Vec2::Zero();

    static PatternFamily ring(int M);
    static PatternFamily ellipse_pattern(int M, double a, double b);
    static PatternFamily rectangle_pattern(int M, double a, double b, int p = 16);
    static PatternFamily line_path(Vec2 start, Vec2 end);
    static PatternFamily ellipse_path(double a, double b);

    // All clamps related by a symmetry of the disk, so equal strengths.
    bool symmetric() const { return kind == Kind::Ring; }
    std::string describe() const;
};

PatternFamily::Kind parse_pattern_kind(const std::string& name);
std::string pattern_kind_name(PatternFamily::Kind kind);

// Clamp points for parameter r. Throws RangeError when a point leaves the
// plate or two points come closer than 1e-6 times the plate size.
std::vector<Vec2> generate_pattern(const PatternFamily& family, double r, const BoundaryCurve& domain);

struct SweepSample {
    double r = 0.0, lambda = 0.0;
    std::vector<double> alpha;
    bool converged = false;
    int iterations = 0;
    std::string note;
};

struct SweepTrace {
    std::vector<SweepSample> samples;
    bool complete = false;   // reached r_end
    std::string diagnostic;  // why the sweep stopped early

    std::vector<SweepSample> converged() const;
};

struct SweepOptions {
    double dr0 = 0.0;     // 0: (r_end - r_start) / 50
    double dr_min = 0.0;  // 0: 1e-4 |r_end - r_start|
    int max_halvings = 6;
    // Solve each step by bisection on the first clamp value with equal
    // strengths instead of Newton; only valid for symmetric families.
    bool bisection = false;
    NewtonOptions newton;
};

SweepTrace continue_sweep(const Discretization& disc, const PatternFamily& family, double r_start, double r_end,
                          const ModeSolution& initial, const SweepOptions& opts = {});

struct Peak {
    double r = 0.0, lambda = 0.0;
    bool boundary = false;  // maximum at an end of the converged samples
};

// Parabola through the converged sample with the largest lambda and its
// converged neighbours.
Peak find_peak(const SweepTrace& trace);

}  // namespace platemodes
