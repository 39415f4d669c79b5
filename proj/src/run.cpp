#include "platemodes/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <Eigen/Core>

#include "platemodes/errors.hpp"
#include "platemodes/oracle_disk.hpp"
#include "platemodes/unclamped.hpp"

namespace platemodes {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Csv {
public:
    Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error("cannot write " + path.string());
        row_strings(header);
    }

    template <typename... T>
    void row(const T&... v) {
        row_strings({cell(v)...});
    }
    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

private:
    std::ofstream out_;
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json newton_json(const NewtonOptions& n) {
    return {{"tolerance", n.tolerance}, {"max_iterations", n.max_iterations}, {"max_halvings", n.max_halvings},
            {"fd_step", n.fd_step}};
}

// Slope of log(err) against log(N) by least squares.
double fitted_slope(const std::vector<int>& n, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(err[i] > 0)) continue;
        const double x = std::log(double(n[i])), y = std::log(err[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y, ++k;
    }
    if (k < 2) return kNaN;
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

struct Context {
    const RunConfig& cfg;
    std::filesystem::path dir;
    json& results;
    json& outputs;

    std::filesystem::path file(const std::string& name) {
        outputs.push_back(name);
        return dir / name;
    }
};

void write_mode(Context& c, const ModeSolution& s, const std::string& prefix = "") {
    Csv m(c.file(prefix + "mode.csv"), {"lambda", "mu", "residual_norm", "iterations", "unclamped"});
    m.row(s.lambda, std::pow(s.lambda, 0.25), s.residual_norm, s.iterations, s.unclamped);
    Csv cl(c.file(prefix + "clamps.csv"), {"index", "x", "y", "alpha", "collapsed"});
    for (std::size_t j = 0; j < s.clamps.size(); ++j) {
        const bool collapsed = std::find(s.collapsed.begin(), s.collapsed.end(), int(j)) != s.collapsed.end();
        cl.row(j, s.clamps.points[j].x(), s.clamps.points[j].y(), s.alpha[j], collapsed);
    }
    c.results["lambda"] = s.lambda;
    c.results["iterations"] = s.iterations;
    c.results["residual_norm"] = s.residual_norm;
    c.results["alpha"] = s.alpha;
    c.results["collapsed"] = s.collapsed;
    c.results["unclamped"] = s.unclamped;
}

int run_solve(Context& c) {
    const Discretization disc = discretize(make_shape(c.cfg.geometry), c.cfg.N);
    const ModeProblem p(disc, c.cfg.clamps);
    const ModeSolution s = find_mode(p, c.cfg.search, c.cfg.newton);
    write_mode(c, s);
    if (c.cfg.task == RunConfig::Task::Field) {
        const FieldGrid g = mode_lattice(disc, s, c.cfg.nx, c.cfg.ny);
        Csv f(c.file("field.csv"), {"x", "y", "u"});
        double peak = 0.0;
        for (std::size_t i = 0; i < g.u.size(); ++i) {
            f.row(g.x[i], g.y[i], g.u[i]);
            if (!std::isnan(g.u[i])) peak = std::max(peak, std::abs(g.u[i]));
        }
        c.results["max_abs_u"] = peak;
        c.results["lattice"] = {c.cfg.nx, c.cfg.ny};
    }
    return kExitOk;
}

int run_sweep(Context& c) {
    const Discretization disc = discretize(make_shape(c.cfg.geometry), c.cfg.N);
    const bool by_m = c.cfg.M_list.size() > 1 || c.cfg.family.kind == PatternFamily::Kind::Ring ||
                      c.cfg.family.kind == PatternFamily::Kind::EllipsePattern ||
                      c.cfg.family.kind == PatternFamily::Kind::RectanglePattern;
    SweepOptions opts;
    opts.dr0 = c.cfg.dr0;
    opts.dr_min = c.cfg.dr_min;
    opts.max_halvings = c.cfg.max_halvings;
    opts.bisection = c.cfg.bisection;
    opts.newton = c.cfg.newton;

    Csv peaks(c.file("peaks.csv"), {"M", "r_c", "lambda_c", "boundary", "samples", "flagged", "complete"});
    int status = kExitOk;
    json traces = json::array();
    for (int M : c.cfg.M_list) {
        PatternFamily fam = c.cfg.family;
        fam.M = M;
        json t = {{"M", M}};
        SweepTrace trace;
        trace.complete = true;
        std::vector<int> segment_of;
        for (std::size_t si = 0; si < c.cfg.segments.size(); ++si) {
            const auto [r0, r1] = c.cfg.segments[si];
            SweepTrace part;
            try {
                const ModeProblem p(disc, generate_pattern(fam, r0, *disc.curve));
                ModeSolution init = find_mode(p, c.cfg.search, c.cfg.newton);
                // Continuation needs nonzero strengths. A clamp close to the
                // nodal set of an unclamped mode sits on the branch leaving
                // lambda* from just above, which Newton reaches from there.
                if (init.unclamped) {
                    try {
                        const ModeSolution s = newton_solve(p, std::vector<double>(p.size(), 1.0 / std::sqrt(double(p.size()))),
                                                            init.lambda * (1 + 1e-6), c.cfg.newton);
                        if (s.lambda >= init.lambda) init = s;
                    } catch (const Error&) {
                    }
                }
                part = continue_sweep(disc, fam, r0, r1, init, opts);
            } catch (const Error& e) {
                part.diagnostic = std::string("initial mode: ") + e.what();
            }
            for (const SweepSample& s : part.samples) {
                trace.samples.push_back(s);
                segment_of.push_back(int(si));
            }
            trace.complete = trace.complete && part.complete;
            if (!part.diagnostic.empty())
                trace.diagnostic += (trace.diagnostic.empty() ? "" : "; ") + ("segment " + std::to_string(si) + ": " + part.diagnostic);
        }
        if (c.cfg.segments.size() > 1) {
            // merged trace ordered by r; where segments meet the lower
            // converged eigenvalue is kept
            std::vector<std::size_t> order(trace.samples.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return trace.samples[a].r < trace.samples[b].r; });
            SweepTrace merged;
            merged.complete = trace.complete;
            merged.diagnostic = trace.diagnostic;
            std::vector<int> seg;
            for (std::size_t i : order) {
                const SweepSample& s = trace.samples[i];
                if (!merged.samples.empty() && merged.samples.back().r == s.r) {
                    SweepSample& prev = merged.samples.back();
                    const bool better = s.converged && (!prev.converged || s.lambda < prev.lambda);
                    if (better) prev = s, seg.back() = segment_of[i];
                    continue;
                }
                merged.samples.push_back(s);
                seg.push_back(segment_of[i]);
            }
            trace = std::move(merged);
            segment_of = std::move(seg);
        }

        const std::string name = by_m ? "trace_M" + std::to_string(M) + ".csv" : "trace.csv";
        std::vector<std::string> header = {"r", "lambda", "converged", "iterations"};
        const int nalpha = fam.kind == PatternFamily::Kind::LinePath || fam.kind == PatternFamily::Kind::EllipsePath ? 1 : M;
        for (int j = 1; j <= nalpha; ++j) header.push_back("alpha_" + std::to_string(j));
        header.push_back("segment");
        header.push_back("note");
        Csv tr(c.file(name), header);
        int flagged = 0;
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            const SweepSample& s = trace.samples[i];
            std::vector<std::string> cells = {Csv::cell(s.r), Csv::cell(s.lambda), Csv::cell(s.converged),
                                              Csv::cell(s.iterations)};
            for (int j = 0; j < nalpha; ++j) cells.push_back(j < int(s.alpha.size()) ? Csv::cell(s.alpha[j]) : "");
            cells.push_back(Csv::cell(segment_of[i]));
            // notes are free text; keep the CSV single-column safe
            std::string note = s.note;
            for (char& ch : note)
                if (ch == ',' || ch == '\n') ch = ';';
            cells.push_back(note);
            tr.row_strings(cells);
            if (!s.converged) ++flagged;
        }

        Peak pk{kNaN, kNaN, false};
        try {
            pk = find_peak(trace);
        } catch (const RangeError& e) {
            t["peak_error"] = e.what();
            status = kExitSolver;
        }
        peaks.row(M, pk.r, pk.lambda, pk.boundary, trace.samples.size(), flagged, trace.complete);
        if (!trace.complete) status = kExitSolver;
        t["samples"] = trace.samples.size();
        t["flagged"] = flagged;
        t["complete"] = trace.complete;
        t["diagnostic"] = trace.diagnostic;
        if (!std::isnan(pk.r)) t["peak"] = {{"r", pk.r}, {"lambda", pk.lambda}, {"boundary", pk.boundary}};
        traces.push_back(t);
    }
    c.results["traces"] = traces;
    c.results["pattern"] = c.cfg.family.describe();
    if (status != kExitOk) c.results["failure"] = "one or more sweeps stopped early or had no peak";
    return status;
}

int run_unclamped(Context& c) {
    const Discretization disc = discretize(make_shape(c.cfg.geometry), c.cfg.N);
    const SpectrumScan s = scan_unclamped(disc, c.cfg.mu_lo, c.cfg.mu_hi, c.cfg.grid_step);
    Csv grid(c.file("scan.csv"), {"mu", "sigma_min"});
    for (std::size_t i = 0; i < s.mu.size(); ++i) grid.row(s.mu[i], s.sigma_min[i]);
    Csv spec(c.file("spectrum.csv"),
             {"mu", "lambda", "sigma_min", "background", "multiplicity", "spurious", "field_ratio"});
    json genuine = json::array();
    for (const UnclampedMode& m : s.minima) {
        spec.row(m.mu, m.lambda, m.sigma_min, m.background, m.multiplicity, m.spurious, m.field_ratio);
        if (!m.spurious) genuine.push_back({{"lambda", m.lambda}, {"multiplicity", m.multiplicity}});
    }
    c.results["eigenvalues"] = genuine;
    c.results["resonances"] = int(s.minima.size() - genuine.size());
    return kExitOk;
}

int run_convergence(Context& c) {
    const bool disk = c.cfg.task == RunConfig::Task::DiskValidate;
    const double reference = disk ? disk_exact_eigenvalue(1) : kNaN;
    std::vector<double> lambda;
    std::vector<int> iterations;
    for (int N : c.cfg.N_list) {
        const Discretization disc = discretize(make_shape(c.cfg.geometry), N);
        const ModeSolution s = find_mode(ModeProblem(disc, c.cfg.clamps), c.cfg.search, c.cfg.newton);
        lambda.push_back(s.lambda);
        iterations.push_back(s.iterations);
    }
    const std::size_t n = lambda.size();
    std::vector<double> err(n);
    // without an exact value, errors are measured against the finest run
    for (std::size_t i = 0; i < n; ++i)
        err[i] = disk ? std::abs(lambda[i] - reference) / reference
                      : (i + 1 < n ? std::abs(lambda[i] - lambda.back()) / std::abs(lambda.back()) : kNaN);

    Csv out(c.file(disk ? "disk_validate.csv" : "convergence.csv"),
            {"N", "lambda", "iterations", disk ? "rel_error" : "rel_change_vs_finest"});
    for (std::size_t i = 0; i < n; ++i) out.row(c.cfg.N_list[i], lambda[i], iterations[i], err[i]);

    std::vector<int> ns(c.cfg.N_list.begin(), c.cfg.N_list.begin() + (disk ? n : n - 1));
    std::vector<double> es(err.begin(), err.begin() + ns.size());
    const double slope = fitted_slope(ns, es);
    c.results["lambda"] = lambda;
    c.results["rel_error"] = json::array();
    for (double e : err) c.results["rel_error"].push_back(std::isnan(e) ? json(nullptr) : json(e));
    c.results["fitted_slope"] = std::isnan(slope) ? json(nullptr) : json(slope);
    if (disk) c.results["reference"] = reference;
    return kExitOk;
}

}  // namespace

ModeSolution find_mode(const ModeProblem& p, const ModeSearch& s, const NewtonOptions& newton) {
    switch (s.method) {
        case ModeSearch::Method::Newton: {
            std::vector<double> alpha = s.alpha_guess;
            if (alpha.empty()) alpha.assign(p.size(), 1.0 / std::sqrt(double(p.size())));
            return newton_solve(p, alpha, s.lambda_guess, newton);
        }
        case ModeSearch::Method::Bisection:
            if (s.mu_hi > s.mu_lo) return bisection_solve(p, s.mu_lo, s.mu_hi);
            return bisection_near(p, std::pow(s.lambda_guess, 0.25), s.rel_width, s.max_expand);
        case ModeSearch::Method::Roots: {
            const std::vector<ModeSolution> r = response_roots(p, s.mu_lo, s.mu_hi, s.mu_step, 1);
            if (r.empty()) throw BracketError("no eigenvalue in the mu range");
            return r.front();
        }
        case ModeSearch::Method::Lowest: return lowest_mode(p, s.mu_max, s.mu_step);
    }
    throw InvalidSpec("unknown search method");
}

FieldGrid mode_lattice(const Discretization& disc, const ModeSolution& mode, int nx, int ny) {
    const Eigen::Vector4d box = disc.curve->bounding_box();
    const double tiny = 1e-9 * disc.curve->scale();
    FieldGrid g;
    std::vector<Vec2> targets;
    std::vector<std::size_t> where;
    std::vector<std::pair<std::size_t, std::size_t>> at_clamp;  // lattice index, clamp index
    for (int iy = 0; iy < ny; ++iy) {
        const double y = box[1] + (box[3] - box[1]) * iy / (ny - 1);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = box[0] + (box[2] - box[0]) * ix / (nx - 1);
            const Vec2 pt(x, y);
            g.x.push_back(x);
            g.y.push_back(y);
            g.u.push_back(kNaN);
            bool inside = false;
            try {
                inside = contains(*disc.curve, pt);
            } catch (const BoundaryProximity&) {
                inside = false;
            }
            if (!inside) continue;
            std::size_t hit = mode.clamps.size();
            for (std::size_t j = 0; j < mode.clamps.size(); ++j)
                if ((mode.clamps.points[j] - pt).norm() < tiny) hit = j;
            if (hit < mode.clamps.size()) {
                at_clamp.push_back({g.u.size() - 1, hit});
            } else {
                targets.push_back(pt);
                where.push_back(g.u.size() - 1);
            }
        }
    }
    const std::vector<double> u = eval_mode(mode.wavenumber(), disc, mode.clamps, mode.density, targets);
    for (std::size_t i = 0; i < u.size(); ++i) g.u[where[i]] = u[i];
    if (!at_clamp.empty()) {
        const Eigen::VectorXd cv = clamp_values(mode.wavenumber(), disc, mode.clamps, mode.density);
        for (const auto& [i, j] : at_clamp) g.u[i] = cv(Eigen::Index(j));
    }
    return g;
}

RunOutcome run(const RunConfig& cfg, const std::filesystem::path& out_dir, int threads) {
    RunOutcome o;
    json& m = o.manifest;
    const auto t0 = std::chrono::steady_clock::now();
    m["tool"] = "platemodes";
    m["version"] = kVersion;
    m["task"] = task_name(cfg.task);
    m["config"] = cfg.source;
    m["geometry"] = cfg.geometry.describe();
    if (cfg.N_list.empty()) m["N"] = cfg.N;
    else m["N_list"] = cfg.N_list;
    m["tolerances"] = newton_json(cfg.newton);
    m["started_utc"] = utc_now();
    m["build"] = {{"compiler", __VERSION__},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)}};
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
    m["threads"] = omp_get_max_threads();
#else
    m["threads"] = 1;
#endif
    m["outputs"] = json::array();
    m["results"] = json::object();

    std::filesystem::create_directories(out_dir);
    Context c{cfg, out_dir, m["results"], m["outputs"]};
    try {
        switch (cfg.task) {
            case RunConfig::Task::Solve:
            case RunConfig::Task::Field: o.status = run_solve(c); break;
            case RunConfig::Task::Sweep: o.status = run_sweep(c); break;
            case RunConfig::Task::Unclamped: o.status = run_unclamped(c); break;
            case RunConfig::Task::Convergence:
            case RunConfig::Task::DiskValidate: o.status = run_convergence(c); break;
        }
    } catch (const ConfigError& e) {
        o.status = kExitConfig;
        m["diagnostic"] = e.what();
    } catch (const NonConvergence& e) {
        o.status = kExitSolver;
        m["diagnostic"] = e.what();
        m["best_iterate"] = {{"lambda", e.lambda}, {"alpha", e.alpha}, {"residual", e.residual}};
    } catch (const std::exception& e) {
        o.status = kExitSolver;
        m["diagnostic"] = e.what();
    }
    m["status"] = o.status == kExitOk ? "ok" : o.status == kExitConfig ? "config-error" : "solver-failure";
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream(out_dir / "manifest.json") << m.dump(2) << '\n';
    return o;
}

}  // namespace platemodes
