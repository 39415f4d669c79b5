#include "platemodes/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "platemodes/errors.hpp"

namespace platemodes {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError((path.empty() ? std::string("/") : path) + ": " + msg);
}

// Typed access to one JSON object; remembers which keys were read so that
// misspelled keys are reported instead of silently ignored.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string at(const std::string& key) const { return path_ + "/" + key; }

    const json& raw(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) fail(at(key), "required field is missing");
        return j_.at(key);
    }

    double number(const std::string& key, double lo, double hi) { return check_number(raw(key), at(key), lo, hi); }
    double number(const std::string& key, double lo, double hi, double def) {
        return has(key) ? number(key, lo, hi) : (used_.insert(key), def);
    }

    int integer(const std::string& key, int lo, int hi) { return check_integer(raw(key), at(key), lo, hi); }
    int integer(const std::string& key, int lo, int hi, int def) {
        return has(key) ? integer(key, lo, hi) : (used_.insert(key), def);
    }

    std::string string(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& def) {
        return has(key) ? string(key) : (used_.insert(key), def);
    }

    Vec2 point(const std::string& key) { return check_point(raw(key), at(key)); }

    void ignore(const std::string& key) { used_.insert(key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) fail(at(it.key()), "unknown field");
    }

    static double check_number(const json& v, const std::string& path, double lo, double hi) {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path, "must be finite");
        if (x < lo || x > hi) {
            std::ostringstream os;
            os << "value " << x << " outside [" << lo << ", " << hi << "]";
            fail(path, os.str());
        }
        return x;
    }

    static int check_integer(const json& v, const std::string& path, int lo, int hi) {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        const long long x = v.get<long long>();
        if (x < lo || x > hi)
            fail(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return int(x);
    }

    static Vec2 check_point(const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
        return Vec2(check_number(v[0], path + "/0", -1e6, 1e6), check_number(v[1], path + "/1", -1e6, 1e6));
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

constexpr double kBig = 1e6;
constexpr int kMaxNodes = 4096;

ShapeSpec parse_shape(const json& j, const std::string& path) {
    Obj o(j, path);
    const std::string shape = o.string("shape");
    ShapeSpec s;
    if (shape == "circle") {
        s = ShapeSpec::circle(o.number("R", 1e-6, kBig, 1.0), o.has("center") ? o.point("center") : Vec2::Zero());
    } else if (shape == "ellipse") {
        const double a = o.number("a", 1e-6, kBig), b = o.number("b", 1e-6, kBig);
        s = ShapeSpec::ellipse(a, b, o.has("center") ? o.point("center") : Vec2::Zero());
    } else if (shape == "rounded-rectangle") {
        const double a = o.number("a", 1e-6, kBig), b = o.number("b", 1e-6, kBig);
        const int p = o.integer("p", 2, 64, 16);
        if (p % 2) fail(o.at("p"), "exponent must be even");
        s = ShapeSpec::rounded_rectangle(a, b, p);
    } else if (shape == "star") {
        s = ShapeSpec::star();
    } else if (shape == "annulus") {
        s = ShapeSpec::annulus();
    } else if (shape == "composite") {
        const ShapeSpec outer = parse_shape(o.raw("outer"), o.at("outer"));
        const json& h = o.raw("holes");
        if (!h.is_array() || h.empty()) fail(o.at("holes"), "expected a non-empty array of shapes");
        std::vector<ShapeSpec> holes;
        for (std::size_t i = 0; i < h.size(); ++i) holes.push_back(parse_shape(h[i], o.at("holes") + "/" + std::to_string(i)));
        s = ShapeSpec::composite(outer, holes);
    } else {
        fail(o.at("shape"), "unknown shape '" + shape + "' (circle, ellipse, rounded-rectangle, star, annulus, composite)");
    }
    o.finish();
    return s;
}

std::vector<Vec2> parse_points(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of [x, y] points");
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(Obj::check_point(j[i], path + "/" + std::to_string(i)));
    return pts;
}

std::vector<int> parse_int_list(const json& j, const std::string& path, int lo, int hi) {
    if (j.is_number_integer()) return {Obj::check_integer(j, path, lo, hi)};
    if (!j.is_array() || j.empty()) fail(path, "expected an integer or a non-empty array of integers");
    std::vector<int> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(Obj::check_integer(j[i], path + "/" + std::to_string(i), lo, hi));
    return v;
}

std::pair<double, double> parse_range(const json& j, const std::string& path, double lo, double hi) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [start, end]");
    const double a = Obj::check_number(j[0], path + "/0", lo, hi), b = Obj::check_number(j[1], path + "/1", lo, hi);
    return {a, b};
}

ModeSearch parse_search(const json& j, const std::string& path) {
    Obj o(j, path);
    ModeSearch s;
    const std::string m = o.string("method");
    if (m == "newton") {
        s.method = ModeSearch::Method::Newton;
        s.lambda_guess = o.number("lambda_guess", 1e-8, 1e12);
        if (o.has("alpha_guess")) {
            const json& a = o.raw("alpha_guess");
            if (!a.is_array() || a.empty()) fail(o.at("alpha_guess"), "expected a non-empty array of numbers");
            for (std::size_t i = 0; i < a.size(); ++i)
                s.alpha_guess.push_back(Obj::check_number(a[i], o.at("alpha_guess") + "/" + std::to_string(i), -kBig, kBig));
        }
    } else if (m == "bisection") {
        s.method = ModeSearch::Method::Bisection;
        if (o.has("mu_bracket")) {
            std::tie(s.mu_lo, s.mu_hi) = parse_range(o.raw("mu_bracket"), o.at("mu_bracket"), 1e-6, 1e4);
            if (!(s.mu_hi > s.mu_lo)) fail(o.at("mu_bracket"), "bracket must be increasing");
        } else {
            s.lambda_guess = o.number("lambda_guess", 1e-8, 1e12);
            s.rel_width = o.number("rel_width", 1e-8, 0.5, s.rel_width);
            s.max_expand = o.integer("max_expand", 0, 40, s.max_expand);
        }
    } else if (m == "roots") {
        s.method = ModeSearch::Method::Roots;
        std::tie(s.mu_lo, s.mu_hi) = parse_range(o.raw("mu_range"), o.at("mu_range"), 1e-6, 1e4);
        if (!(s.mu_hi > s.mu_lo)) fail(o.at("mu_range"), "range must be increasing");
        s.mu_step = o.number("mu_step", 1e-5, 1.0, s.mu_step);
    } else if (m == "lowest") {
        s.method = ModeSearch::Method::Lowest;
        s.mu_max = o.number("mu_max", 1.0, 1e4);
        s.mu_step = o.number("mu_step", 1e-5, 1.0, s.mu_step);
    } else {
        fail(o.at("method"), "unknown method '" + m + "' (newton, bisection, roots, lowest)");
    }
    o.finish();
    return s;
}

void parse_solver(const json& j, const std::string& path, NewtonOptions& n) {
    Obj o(j, path);
    n.tolerance = o.number("tolerance", 1e-16, 1e-2, n.tolerance);
    n.max_iterations = o.integer("max_iterations", 1, 1000, n.max_iterations);
    n.max_halvings = o.integer("max_halvings", 0, 60, n.max_halvings);
    n.fd_step = o.number("fd_step", 1e-12, 1e-2, n.fd_step);
    o.finish();
}

PatternFamily parse_family(const json& j, const std::string& path, std::vector<int>& M_list) {
    Obj o(j, path);
    PatternFamily f;
    try {
        f.kind = parse_pattern_kind(o.string("family"));
    } catch (const InvalidSpec& e) {
        fail(o.at("family"), e.what());
    }
    using K = PatternFamily::Kind;
    if (f.kind == K::Ring || f.kind == K::EllipsePattern || f.kind == K::RectanglePattern) {
        M_list = parse_int_list(o.raw("M"), o.at("M"), 1, 256);
        f.M = M_list.front();
    } else {
        M_list = {1};
    }
    if (f.kind == K::EllipsePattern || f.kind == K::RectanglePattern || f.kind == K::EllipsePath) {
        f.a = o.number("a", 1e-6, kBig);
        f.b = o.number("b", 1e-6, kBig);
    }
    if (f.kind == K::RectanglePattern) {
        f.p = o.integer("p", 2, 64, 16);
        if (f.p % 2) fail(o.at("p"), "exponent must be even");
    }
    if (f.kind == K::LinePath) {
        f.start = o.point("start");
        f.end = o.point("end");
        if ((f.end - f.start).norm() == 0.0) fail(o.at("end"), "line path needs distinct endpoints");
    }
    o.finish();
    return f;
}

RunConfig::Task parse_task(const std::string& name, const std::string& path) {
    using T = RunConfig::Task;
    for (T t : {T::Solve, T::Sweep, T::Unclamped, T::Field, T::Convergence, T::DiskValidate})
        if (task_name(t) == name) return t;
    fail(path, "unknown task '" + name + "' (solve, sweep, unclamped, field, convergence, disk-validate)");
}

}  // namespace

std::string task_name(RunConfig::Task task) {
    switch (task) {
        case RunConfig::Task::Solve: return "solve";
        case RunConfig::Task::Sweep: return "sweep";
        case RunConfig::Task::Unclamped: return "unclamped";
        case RunConfig::Task::Field: return "field";
        case RunConfig::Task::Convergence: return "convergence";
        case RunConfig::Task::DiskValidate: return "disk-validate";
    }
    return "?";
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // locate the byte offset as line:column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') ++line, col = 1;
            else ++col;
        }
        // nlohmann prefixes its own location; keep only the reason
        std::string why = e.what();
        if (const auto at = why.find("column "); at != std::string::npos)
            if (const auto colon = why.find(": ", at); colon != std::string::npos) why = why.substr(colon + 2);
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + why);
    }

    RunConfig c;
    c.source = j;
    Obj o(j, "");
    o.ignore("description");
    c.task = parse_task(o.string("task"), "/task");
    using T = RunConfig::Task;

    if (o.has("geometry")) c.geometry = parse_shape(o.raw("geometry"), "/geometry");
    if (c.task == T::DiskValidate && c.geometry.kind != ShapeSpec::Kind::Circle)
        fail("/geometry", "disk-validate runs on the unit disk");
    if (c.task == T::DiskValidate && (c.geometry.radius != 1.0 || c.geometry.center != Vec2::Zero()))
        fail("/geometry", "disk-validate runs on the unit disk");

    if (c.task == T::Convergence || c.task == T::DiskValidate) {
        c.N_list = o.has("N_list") ? parse_int_list(o.raw("N_list"), "/N_list", 8, kMaxNodes)
                                   : std::vector<int>{32, 64, 128, 256};
        if (c.N_list.size() < 2) fail("/N_list", "needs at least two resolutions");
        for (std::size_t i = 1; i < c.N_list.size(); ++i)
            if (c.N_list[i] <= c.N_list[i - 1]) fail("/N_list", "resolutions must be increasing");
    } else {
        c.N = o.integer("N", 8, kMaxNodes, c.N);
    }
    if (o.has("solver")) parse_solver(o.raw("solver"), "/solver", c.newton);

    switch (c.task) {
        case T::Solve:
        case T::Field:
        case T::Convergence:
            c.clamps = parse_points(o.raw("clamps"), "/clamps");
            c.search = parse_search(o.raw("search"), "/search");
            if (!c.search.alpha_guess.empty() && c.search.alpha_guess.size() != c.clamps.size())
                fail("/search/alpha_guess", "needs one entry per clamp");
            if (c.task == T::Field) {
                if (o.has("grid")) {
                    Obj g(o.raw("grid"), "/grid");
                    c.nx = g.integer("nx", 2, 2001, c.nx);
                    c.ny = g.integer("ny", 2, 2001, c.ny);
                    g.finish();
                }
            }
            break;
        case T::DiskValidate:
            c.clamps = {Vec2::Zero()};
            c.search.method = ModeSearch::Method::Newton;
            c.search.lambda_guess = 500.0;
            if (o.has("search")) c.search = parse_search(o.raw("search"), "/search");
            break;
        case T::Sweep: {
            c.family = parse_family(o.raw("pattern"), "/pattern", c.M_list);
            // [start, end] or a list of such segments
            const json& rr = o.raw("r_range");
            if (rr.is_array() && !rr.empty() && rr[0].is_array()) {
                for (std::size_t i = 0; i < rr.size(); ++i)
                    c.segments.push_back(parse_range(rr[i], "/r_range/" + std::to_string(i), -kBig, kBig));
            } else {
                c.segments.push_back(parse_range(rr, "/r_range", -kBig, kBig));
            }
            double span = 0.0;
            for (std::size_t i = 0; i < c.segments.size(); ++i) {
                if (c.segments[i].first == c.segments[i].second)
                    fail(c.segments.size() > 1 ? "/r_range/" + std::to_string(i) : "/r_range", "range is empty");
                span = std::max(span, std::abs(c.segments[i].second - c.segments[i].first));
            }
            const std::string m = o.string("method", "newton");
            if (m != "newton" && m != "bisection") fail("/method", "expected newton or bisection");
            c.bisection = m == "bisection";
            if (c.bisection && !c.family.symmetric()) fail("/method", "bisection needs a symmetric (ring) pattern");
            c.dr0 = o.number("dr0", 1e-9 * span, span, 0.0);
            c.dr_min = o.number("dr_min", 1e-12 * span, span, 0.0);
            c.max_halvings = o.integer("max_halvings", 0, 30, c.max_halvings);
            c.search = parse_search(o.raw("initial"), "/initial");
            if (!c.search.alpha_guess.empty() && c.M_list.size() > 1)
                fail("/initial/alpha_guess", "not allowed with several M");
            break;
        }
        case T::Unclamped:
            std::tie(c.mu_lo, c.mu_hi) = parse_range(o.raw("mu_range"), "/mu_range", 1e-3, 1e4);
            if (!(c.mu_hi > c.mu_lo)) fail("/mu_range", "range must be increasing");
            c.grid_step = o.number("grid_step", 1e-5, 1.0, c.grid_step);
            break;
    }
    o.finish();

    // checks that need the geometry
    if (!c.clamps.empty() || c.task == T::Sweep) {
        const BoundaryCurve curve = make_shape(c.geometry);
        for (std::size_t i = 0; i < c.clamps.size(); ++i) {
            bool inside = false;
            try {
                inside = contains(curve, c.clamps[i]);
            } catch (const BoundaryProximity&) {
            }
            if (!inside) fail("/clamps/" + std::to_string(i), "clamp is not inside the plate");
        }
        if (c.task == T::Sweep)
            for (int M : c.M_list)
                for (const auto& seg : c.segments) {
                    PatternFamily f = c.family;
                    f.M = M;
                    try {
                        generate_pattern(f, seg.first, curve);
                    } catch (const RangeError& e) {
                        fail("/r_range", std::string("starting pattern: ") + e.what());
                    }
                }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot read file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace platemodes
