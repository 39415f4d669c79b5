#include "platemodes/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "platemodes/errors.hpp"

namespace platemodes {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// A warm-started Newton step that lands further than this (relative) from
// the extrapolated lambda has jumped branches.
constexpr double kBranchJump = 0.1;
// Consecutive flagged samples tolerated before a sweep gives up.
constexpr int kMaxFlagged = 3;

struct State {
    double r, lambda;
    std::vector<double> alpha;
};

State extrapolate(const std::vector<State>& hist, double r) {
    const State& b = hist.back();
    if (hist.size() < 2) return {r, b.lambda, b.alpha};
    const State& a = hist[hist.size() - 2];
    const double t = (r - b.r) / (b.r - a.r);
    State s{r, b.lambda + t * (b.lambda - a.lambda), b.alpha};
    for (std::size_t k = 0; k < s.alpha.size(); ++k) s.alpha[k] += t * (b.alpha[k] - a.alpha[k]);
    if (!(s.lambda > 0.0)) s.lambda = b.lambda;
    return s;
}

}  // namespace

PatternFamily PatternFamily::ring(int M) {
    PatternFamily f;
    f.kind = Kind::Ring;
    f.M = M;
    return f;
}

PatternFamily PatternFamily::ellipse_pattern(int M, double a, double b) {
    PatternFamily f;
    f.kind = Kind::EllipsePattern;
    f.M = M;
    f.a = a;
    f.b = b;
    return f;
}

PatternFamily PatternFamily::rectangle_pattern(int M, double a, double b, int p) {
    PatternFamily f;
    f.kind = Kind::RectanglePattern;
    f.M = M;
    f.a = a;
    f.b = b;
    f.p = p;
    return f;
}

PatternFamily PatternFamily::line_path(Vec2 start, Vec2 end) {
    PatternFamily f;
    f.kind = Kind::LinePath;
    f.start = start;
    f.end = end;
    return f;
}

PatternFamily PatternFamily::ellipse_path(double a, double b) {
    PatternFamily f;
    f.kind = Kind::EllipsePath;
    f.a = a;
    f.b = b;
    return f;
}

PatternFamily::Kind parse_pattern_kind(const std::string& name) {
    if (name == "ring") return PatternFamily::Kind::Ring;
    if (name == "ellipse-pattern") return PatternFamily::Kind::EllipsePattern;
    if (name == "rectangle-pattern") return PatternFamily::Kind::RectanglePattern;
    if (name == "line-path") return PatternFamily::Kind::LinePath;
    if (name == "ellipse-path") return PatternFamily::Kind::EllipsePath;
    throw InvalidSpec("unknown pattern family '" + name + "'");
}

std::string pattern_kind_name(PatternFamily::Kind kind) {
    switch (kind) {
        case PatternFamily::Kind::Ring: return "ring";
        case PatternFamily::Kind::EllipsePattern: return "ellipse-pattern";
        case PatternFamily::Kind::RectanglePattern: return "rectangle-pattern";
        case PatternFamily::Kind::LinePath: return "line-path";
        case PatternFamily::Kind::EllipsePath: return "ellipse-path";
    }
    return "?";
}

std::string PatternFamily::describe() const {
    std::ostringstream os;
    os << pattern_kind_name(kind);
    switch (kind) {
        case Kind::Ring: os << " M=" << M; break;
        case Kind::EllipsePattern: os << " M=" << M << " a=" << a << " b=" << b; break;
        case Kind::RectanglePattern: os << " M=" << M << " a=" << a << " b=" << b << " p=" << p; break;
        case Kind::LinePath:
            os << " (" << start.x() << "," << start.y() << ")->(" << end.x() << "," << end.y() << ")";
            break;
        case Kind::EllipsePath: os << " a=" << a << " b=" << b; break;
    }
    return os.str();
}

std::vector<SweepSample> SweepTrace::converged() const {
    std::vector<SweepSample> c;
    for (const auto& s : samples)
        if (s.converged) c.push_back(s);
    return c;
}

std::vector<Vec2> generate_pattern(const PatternFamily& f, double r, const BoundaryCurve& domain) {
    if (!std::isfinite(r)) throw RangeError("pattern parameter must be finite");
    std::vector<Vec2> pts;
    switch (f.kind) {
        case PatternFamily::Kind::Ring:
            for (int j = 0; j < f.M; ++j) pts.push_back(r * Vec2(std::cos(kTwoPi * j / f.M), std::sin(kTwoPi * j / f.M)));
            break;
        case PatternFamily::Kind::EllipsePattern:
            for (int j = 0; j < f.M; ++j)
                pts.push_back(r * Vec2(f.a * std::cos(kTwoPi * j / f.M), f.b * std::sin(kTwoPi * j / f.M)));
            break;
        case PatternFamily::Kind::RectanglePattern: {
            const BoundaryCurve rect = make_shape(ShapeSpec::rounded_rectangle(f.a, f.b, f.p));
            for (int j = 0; j < f.M; ++j) pts.push_back(r * rect.components()[0].eval(kTwoPi * j / f.M).x);
            break;
        }
        case PatternFamily::Kind::LinePath: pts.push_back(f.start + r * (f.end - f.start)); break;
        case PatternFamily::Kind::EllipsePath:
            pts.push_back(Vec2(f.a * std::cos(kTwoPi * r), f.b * std::sin(kTwoPi * r)));
            break;
    }
    if (pts.empty()) throw RangeError("pattern has no points");
    const double tiny = 1e-6 * domain.scale();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool inside = false;
        try {
            inside = contains(domain, pts[i]);
        } catch (const BoundaryProximity&) {
        }
        if (!inside) throw RangeError("pattern point " + std::to_string(i) + " is not inside the plate at r = " + std::to_string(r));
        for (std::size_t j = 0; j < i; ++j)
            if ((pts[i] - pts[j]).norm() < tiny)
                throw RangeError("pattern points collapse at r = " + std::to_string(r));
    }
    return pts;
}

SweepTrace continue_sweep(const Discretization& disc, const PatternFamily& family, double r_start, double r_end,
                          const ModeSolution& initial, const SweepOptions& opts) {
    if (!(r_end != r_start)) throw DomainError("sweep range is empty");
    if (opts.bisection && !family.symmetric()) throw InvalidSpec("bisection sweeps need a symmetric family");
    const double range = r_end - r_start;
    const double dir = range > 0 ? 1.0 : -1.0;
    const double dr0 = opts.dr0 > 0 ? opts.dr0 : std::abs(range) / 50;
    const double dr_min = opts.dr_min > 0 ? opts.dr_min : 1e-4 * std::abs(range);

    SweepTrace trace;
    std::vector<State> hist{{r_start, initial.lambda, initial.alpha}};
    trace.samples.push_back({r_start, initial.lambda, initial.alpha, true, initial.iterations, ""});

    double dr = dr0;
    double r = r_start;
    int failures = 0;  // consecutive flagged samples
    while (dir * (r_end - r) > 1e-12 * std::abs(range)) {
        int halvings = 0;
        double dr_try = dr;
        for (;;) {
            const double r_next = r + dir * std::min(dr_try, dir * (r_end - r));
            // after a flagged sample the branch may have turned; restart
            // from the last converged values
            const State guess = failures > 0 ? State{r_next, hist.back().lambda, hist.back().alpha}
                                             : extrapolate(hist, r_next);
            SweepSample s;
            s.r = r_next;
            std::string failure;
            try {
                const ModeProblem problem(disc, generate_pattern(family, r_next, *disc.curve));
                const ModeSolution m = opts.bisection ? bisection_near(problem, std::pow(guess.lambda, 0.25))
                                                      : newton_solve(problem, guess.alpha, guess.lambda, opts.newton);
                if (std::abs(m.lambda - guess.lambda) > kBranchJump * guess.lambda)
                    throw NonConvergence("solution left the branch", m.alpha, m.lambda, m.residual_norm);
                s.lambda = m.lambda;
                s.alpha = m.alpha;
                s.converged = true;
                s.iterations = m.iterations;
            } catch (const RangeError& e) {
                trace.diagnostic = e.what();
                return trace;
            } catch (const Error& e) {
                failure = e.what();
            }
            if (s.converged) {
                trace.samples.push_back(s);
                hist.push_back({s.r, s.lambda, s.alpha});
                r = r_next;
                failures = 0;
                dr = dr0;
                const std::size_t n = hist.size();
                if (n >= 3) {
                    // slope and concavity from the last converged samples
                    const State &a = hist[n - 3], &b = hist[n - 2], &c = hist[n - 1];
                    const double s1 = (b.lambda - a.lambda) / (b.r - a.r);
                    const double s2 = (c.lambda - b.lambda) / (c.r - b.r);
                    const double curv = 2 * (s2 - s1) / (c.r - a.r);
                    const bool near_extremum = s1 * s2 <= 0 || s2 * (s2 + curv * dir * dr0) <= 0;
                    if (near_extremum) {
                        const double slope = s2 * std::abs(range) / c.lambda;
                        dr = std::clamp(dr0 / (1.0 + std::abs(slope)), dr_min, dr0);
                    }
                }
                break;
            }
            // right after a flagged sample, step over the bad stretch at full size
            if (failures == 0 && halvings < opts.max_halvings && dr_try / 2 >= dr_min) {
                dr_try /= 2;
                ++halvings;
                continue;
            }
            // persistent failure: keep the point flagged and step past it
            s.lambda = guess.lambda;
            s.alpha = guess.alpha;
            s.note = failure;
            trace.samples.push_back(s);
            if (++failures > kMaxFlagged) {
                trace.diagnostic = "no convergence at r = " + std::to_string(r_next) + ": " + failure;
                return trace;
            }
            r = r_next;
            dr = dr0;
            break;
        }
    }
    trace.complete = true;
    return trace;
}

Peak find_peak(const SweepTrace& trace) {
    const std::vector<SweepSample> c = trace.converged();
    if (c.size() < 3) throw RangeError("peak search needs at least three converged samples");
    std::size_t i = 0;
    for (std::size_t k = 1; k < c.size(); ++k)
        if (c[k].lambda > c[i].lambda) i = k;
    Peak p{c[i].r, c[i].lambda, false};
    if (i == 0 || i + 1 == c.size()) {
        p.boundary = true;
        return p;
    }
    const double x0 = c[i - 1].r, x1 = c[i].r, x2 = c[i + 1].r;
    const double y0 = c[i - 1].lambda, y1 = c[i].lambda, y2 = c[i + 1].lambda;
    const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (!(a < 0)) return p;
    const double b = d01 - a * (x0 + x1);
    p.r = -b / (2 * a);
    p.lambda = y1 + (p.r - x1) * (d01 + a * (p.r - x0));
    return p;
}

}  // namespace platemodes
