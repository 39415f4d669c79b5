// Acceptance suite: one PASS/FAIL line per criterion, preceded by its
// sub-checks. Usage: acceptance <criterion 1-9 | all> [--configs DIR] [--out DIR]

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "platemodes/errors.hpp"
#include "platemodes/kernels.hpp"
#include "platemodes/modes.hpp"
#include "platemodes/oracle_disk.hpp"
#include "platemodes/run.hpp"
#include "platemodes/specfun.hpp"

using namespace platemodes;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path g_configs, g_out;

class Criterion {
public:
    Criterion(int n, std::string title) : n_(n), title_(std::move(title)) {
        std::cout << "criterion " << n_ << ": " << title_ << std::endl;
    }

    void check(bool ok, const std::string& what) {
        pass_ = pass_ && ok;
        std::cout << "  [" << (ok ? " ok " : "FAIL") << "] " << what << std::endl;
    }

    void note(const std::string& what) { std::cout << "         " << what << std::endl; }

    bool finish() const {
        std::cout << "CRITERION " << n_ << " " << (pass_ ? "PASS" : "FAIL") << ": " << title_ << std::endl;
        return pass_;
    }

private:
    int n_;
    std::string title_;
    bool pass_ = true;
};

std::string fmt(double v, int digits = 7) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct Ran {
    int status = 0;
    json results;
    double wall = 0.0;
    std::filesystem::path dir;
};

// Runs a shipped config exactly as the CLI would.
Ran run_shipped(Criterion& c, const std::string& name) {
    Ran r;
    r.dir = g_out / name;
    const RunOutcome o = run(load_config((g_configs / (name + ".json")).string()), r.dir);
    r.status = o.status;
    r.results = o.manifest["results"];
    r.wall = o.manifest["wall_time_s"].get<double>();
    std::string extra;
    if (o.manifest.contains("diagnostic")) extra = ", " + o.manifest["diagnostic"].get<std::string>();
    c.check(o.status == kExitOk, name + ".json runs with status 0 (got " + std::to_string(o.status) + ", " +
                                     fmt(r.wall, 4) + " s" + extra + ")");
    return r;
}

// Rows of a CSV written by the runner (no quoting), keyed by header name.
std::vector<std::map<std::string, std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::map<std::string, std::string>> rows;
    std::string line;
    std::vector<std::string> header;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        if (!s.empty() && s.back() == ',') out.push_back("");
        return out;
    };
    if (!std::getline(in, line)) return rows;
    header = split(line);
    while (std::getline(in, line)) {
        const std::vector<std::string> cells = split(line);
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = i < cells.size() ? cells[i] : "";
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> genuine_eigenvalues(const json& results) {
    std::vector<double> v;
    for (const json& e : results["eigenvalues"]) v.push_back(e["lambda"].get<double>());
    return v;
}

bool criterion1() {
    Criterion c(1, "disk validation, centre clamp");
    const Ran r = run_shipped(c, "fig4");
    if (r.status != kExitOk) return c.finish();
    const std::vector<double> lam = r.results["lambda"].get<std::vector<double>>();
    const double err = r.results["rel_error"].back().get<double>();
    const double slope = r.results["fitted_slope"].get<double>();
    c.note("lambda(N=32..256) = " + fmt(lam[0], 10) + ", " + fmt(lam[1], 10) + ", " + fmt(lam[2], 10) + ", " +
           fmt(lam[3], 10) + "; exact " + fmt(r.results["reference"].get<double>(), 10));
    c.check(err <= 1e-5, "relative error at N=256 " + fmt(err, 3) + " <= 1e-5");
    c.check(slope >= -3.5 && slope <= -2.5, "log-log error slope " + fmt(slope, 4) + " in [-3.5, -2.5]");
    c.check(r.wall <= 60.0, "runtime " + fmt(r.wall, 4) + " s <= 60 s");
    return c.finish();
}

bool criterion2() {
    Criterion c(2, "unclamped disk spectrum");
    const Ran r = run_shipped(c, "unclamped_disk");
    if (r.status != kExitOk) return c.finish();
    const std::vector<double> found = genuine_eigenvalues(r.results);
    for (double want : {104.4, 452.0, 1216.4, 1581.7}) {
        double best = NAN;
        for (double v : found)
            if (std::isnan(best) || std::abs(v - want) < std::abs(best - want)) best = v;
        c.check(!std::isnan(best) && std::abs(best - want) <= 0.5,
                "lambda* " + fmt(want, 6) + ": found " + fmt(best, 8) + " (within 0.5)");
    }
    c.check(r.wall <= 300.0, "runtime " + fmt(r.wall, 4) + " s <= 300 s");
    return c.finish();
}

bool criterion3() {
    Criterion c(3, "ring sweeps reproduce the critical radii and eigenvalues");
    const Ran r = run_shipped(c, "table1");
    struct Want {
        double r, lambda;
    };
    const std::map<int, Want> want = {{2, {0.222, 734.96}}, {3, {0.348, 1264.2}}, {4, {0.379, 1581.5}},
                                      {5, {0.379, 1581.5}}, {6, {0.379, 1581.5}}, {7, {0.379, 1581.5}},
                                      {8, {0.379, 1581.5}}};
    std::map<int, double> peak_lambda;
    for (const json& t : r.results["traces"]) {
        const int M = t["M"].get<int>();
        if (!t.contains("peak")) {
            c.check(false, "M=" + std::to_string(M) + ": no peak (" + t.value("diagnostic", "") + ")");
            continue;
        }
        const double rc = t["peak"]["r"].get<double>(), lc = t["peak"]["lambda"].get<double>();
        peak_lambda[M] = lc;
        const Want& w = want.at(M);
        c.check(std::abs(rc - w.r) <= 0.005,
                "M=" + std::to_string(M) + ": r_c " + fmt(rc, 6) + " vs " + fmt(w.r, 4) + " (+-0.005)");
        c.check(rel(lc, w.lambda) <= 1e-3, "M=" + std::to_string(M) + ": lambda_c " + fmt(lc, 8) + " vs " +
                                               fmt(w.lambda, 6) + " (rel " + fmt(rel(lc, w.lambda), 3) + " <= 1e-3)");
    }
    double spread = 0.0;
    for (int a = 4; a <= 8; ++a)
        for (int b = 4; b <= 8; ++b)
            if (peak_lambda.count(a) && peak_lambda.count(b))
                spread = std::max(spread, rel(peak_lambda[a], peak_lambda[b]));
    c.check(peak_lambda.size() == 7 && spread <= 1e-3,
            "saturation: M=4..8 peaks pairwise within " + fmt(spread, 3) + " <= 1e-3");
    c.check(r.wall <= 1800.0, "runtime " + fmt(r.wall, 4) + " s <= 1800 s");
    return c.finish();
}

bool criterion4() {
    Criterion c(4, "nodal elimination");
    const Ran five = run_shipped(c, "elimination_five");
    if (five.status == kExitOk) {
        const double l = five.results["lambda"].get<double>();
        c.check(rel(l, 1581.7) <= 5e-3, "five clamps: lowest lambda " + fmt(l, 8) + " within 0.5% of 1581.7");
    }
    const Ran four = run_shipped(c, "elimination_four");
    if (four.status == kExitOk) {
        const double l = four.results["lambda"].get<double>();
        c.check(l >= 1216.0 && l <= 1220.0, "four clamps: lowest lambda " + fmt(l, 8) + " in [1216, 1220]");
    }
    return c.finish();
}

bool criterion5() {
    Criterion c(5, "eigenvalue identity on the disk, two clamps at r = 0.3");
    const Discretization disc = discretize(make_shape(ShapeSpec::circle(1.0)), 128);
    const ModeProblem p(disc, {Vec2(0.3, 0.0), Vec2(-0.3, 0.0)});
    // the lowest mode that the clamps actually constrain; the (1,0) mode at
    // 452.0 vanishes at both clamps and satisfies the identity trivially
    const std::vector<ModeSolution> roots = response_roots(p, 3.0, 6.0);
    if (roots.empty()) {
        c.check(false, "a clamped eigenvalue exists for mu in [3, 6]");
        return c.finish();
    }
    const ModeSolution& mode = roots.front();
    const double lam_star = disk_unclamped_eigenvalue(0, 0);
    c.note("clamped lambda " + fmt(mode.lambda, 10) + ", unclamped lambda* " + fmt(lam_star, 10));

    // Gauss-Legendre in rho (weight rho), trapezoid in theta
    const int n = 200;
    gsl_integration_glfixed_table* gl = gsl_integration_glfixed_table_alloc(n);
    std::vector<Vec2> pts;
    std::vector<double> w, ustar;
    for (int i = 0; i < n; ++i) {
        double rho = 0.0, wr = 0.0;
        gsl_integration_glfixed_point(0.0, 1.0, std::size_t(i), &rho, &wr, gl);
        for (int j = 0; j < n; ++j) {
            const double th = 2 * kPi * (j + 0.5) / n;
            pts.emplace_back(rho * std::cos(th), rho * std::sin(th));
            w.push_back(wr * rho * 2 * kPi / n);
            ustar.push_back(unclamped_profile(0, 0, rho, th));
        }
    }
    gsl_integration_glfixed_table_free(gl);
    const std::vector<double> u = mode_field(p, mode, pts);
    double inner = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) inner += w[i] * u[i] * ustar[i];
    double rhs = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
        rhs -= 8 * kPi * mode.alpha[j] * unclamped_profile(0, 0, p.points[j].norm(), std::atan2(p.points[j].y(), p.points[j].x()));
    const double lhs = (mode.lambda - lam_star) * inner;
    const double res = std::abs(lhs - rhs) / std::abs(lhs);
    c.note("(lambda - lambda*) <u, u*> = " + fmt(lhs, 10) + ", -8 pi sum alpha_j u*(x_j) = " + fmt(rhs, 10));
    c.check(res <= 1e-2, "relative residual " + fmt(res, 3) + " <= 1e-2");
    return c.finish();
}

bool criterion6() {
    Criterion c(6, "rectangle confinement and centred peak");
    const Ran one = run_shipped(c, "fig6_one_clamp");
    if (one.status == kExitOk) {
        double global = 0.0, right = 0.0;
        for (const auto& row : read_csv(one.dir / "field.csv")) {
            if (row.at("u").empty()) continue;
            const double x = std::stod(row.at("x")), u = std::abs(std::stod(row.at("u")));
            global = std::max(global, u);
            if (x > 1.3) right = std::max(right, u);
        }
        c.note("lambda " + fmt(one.results["lambda"].get<double>(), 8));
        c.check(global > 0.0 && right <= 0.05 * global,
                "max|u| over x > 1.3 is " + fmt(right / global, 3) + " of the global max (<= 0.05)");
    }
    const Ran line = run_shipped(c, "fig5_rectangle_line");
    if (!line.results["traces"].empty() && line.results["traces"][0].contains("peak")) {
        const json& pk = line.results["traces"][0]["peak"];
        const double r = pk["r"].get<double>();
        c.check(std::abs(r - 0.5) <= 0.01,
                "line-path peak at r = " + fmt(r, 8) + " (lambda " + fmt(pk["lambda"].get<double>(), 8) + "), 0.5 +- 0.01");
    } else {
        c.check(false, "line-path sweep has a peak");
    }
    return c.finish();
}

bool criterion7() {
    Criterion c(7, "asymmetric domain");
    const Ran u = run_shipped(c, "star_unclamped");
    if (u.status == kExitOk) {
        const std::vector<double> e = genuine_eigenvalues(u.results);
        const double l = e.empty() ? NAN : e.front();
        c.check(!e.empty() && rel(l, 118.3) <= 1e-2, "lowest lambda* " + fmt(l, 8) + " within 1% of 118.3");
    }
    const Ran line = run_shipped(c, "star_line");
    if (!line.results["traces"].empty() && line.results["traces"][0].contains("peak")) {
        const json& pk = line.results["traces"][0]["peak"];
        const double r = pk["r"].get<double>();
        const bool boundary = pk["boundary"].get<bool>();
        c.check(!boundary && r > 0.0 && r < 1.0,
                "line-path maximum at r = " + fmt(r, 6) + " (lambda " + fmt(pk["lambda"].get<double>(), 8) + ") is interior");
    } else {
        c.check(false, "line-path sweep has a peak");
    }
    return c.finish();
}

bool criterion8() {
    Criterion c(8, "multiply-connected domain");
    const Ran u = run_shipped(c, "annulus_unclamped");
    double lam_star = NAN;
    if (u.status == kExitOk) {
        const std::vector<double> e = genuine_eigenvalues(u.results);
        if (!e.empty()) lam_star = e.front();
        c.check(!e.empty() && rel(lam_star, 454.1) <= 1e-2, "lowest lambda* " + fmt(lam_star, 8) + " within 1% of 454.1");
    }
    for (const char* name : {"annulus_ellipse_b05", "annulus_ellipse_b06", "annulus_ellipse_b07"}) {
        const Ran s = run_shipped(c, name);
        // longest run of consecutive converged samples within 0.5% of lambda*
        double best_lo = NAN, best_hi = NAN, lo = NAN;
        int run_len = 0, best_len = 0;
        for (const auto& row : read_csv(s.dir / "trace.csv")) {
            const bool conv = row.at("converged") == "1";
            const double r = std::stod(row.at("r"));
            const bool near = conv && !std::isnan(lam_star) && rel(std::stod(row.at("lambda")), lam_star) <= 5e-3;
            if (near) {
                if (run_len == 0) lo = r;
                ++run_len;
                if (run_len > best_len) best_len = run_len, best_lo = lo, best_hi = r;
            } else {
                run_len = 0;
            }
        }
        const double width = best_len > 0 ? best_hi - best_lo : 0.0;
        c.check(best_len >= 3 && width >= 0.05,
                std::string(name) + ": plateau within 0.5% of lambda* over r in [" + fmt(best_lo, 4) + ", " +
                    fmt(best_hi, 4) + "], " + std::to_string(best_len) + " samples (>= 3 samples, width >= 0.05)");
    }
    const Ran a = run_shipped(c, "annulus_spot_494");
    if (a.status == kExitOk) {
        const double l = a.results["lambda"].get<double>();
        c.check(rel(l, 494.5) <= 1e-2, "spot (0.114, 0.496): lambda " + fmt(l, 8) + " vs 494.5 (rel " + fmt(rel(l, 494.5), 3) + " <= 1e-2)");
    }
    const Ran b = run_shipped(c, "annulus_spot_503");
    if (b.status == kExitOk) {
        const double l = b.results["lambda"].get<double>();
        c.check(rel(l, 503.4) <= 1e-2, "spot (0.648, -0.512): lambda " + fmt(l, 8) + " vs 503.4 (rel " + fmt(rel(l, 503.4), 3) + " <= 1e-2)");
    }
    return c.finish();
}

// Nested centered differences of f along the listed directions, twice
// Richardson-extrapolated.
double nested_diff(const std::function<double(const Vec2&)>& f, const Vec2& p, const std::vector<Vec2>& dirs,
                   std::size_t level, double h) {
    if (level == dirs.size()) return f(p);
    return (nested_diff(f, p + h * dirs[level], dirs, level + 1, h) - nested_diff(f, p - h * dirs[level], dirs, level + 1, h)) /
           (2 * h);
}

double deriv(const std::function<double(const Vec2&)>& f, const Vec2& p, const std::vector<Vec2>& dirs, double h) {
    const double a = nested_diff(f, p, dirs, 0, h), b = nested_diff(f, p, dirs, 0, h / 2), c = nested_diff(f, p, dirs, 0, h / 4);
    const double r1 = (4 * b - a) / 3, r2 = (4 * c - b) / 3;
    return (16 * r2 - r1) / 15;
}

Eigen::Matrix2d kernel_oracle(Wavenumber k, const KernelPoint& t, const KernelPoint& s) {
    const Vec2 n = s.normal, tau = s.tangent;
    const double h = 0.008;
    auto G1 = [&](const Vec2& x) {
        auto f = [&](const Vec2& y) { return greens(k, x, y); };
        return deriv(f, s.x, {n, n, n}, h) + 3 * deriv(f, s.x, {n, tau, tau}, h);
    };
    auto G2 = [&](const Vec2& x) {
        auto f = [&](const Vec2& y) { return greens(k, x, y); };
        return deriv(f, s.x, {tau, tau}, h) - deriv(f, s.x, {n, n}, h);
    };
    Eigen::Matrix2d m;
    m(0, 0) = G1(t.x);
    m(0, 1) = G2(t.x);
    m(1, 0) = deriv(G1, t.x, {t.normal}, h);
    m(1, 1) = deriv(G2, t.x, {t.normal}, h);
    return m;
}

KernelPoint unit_circle_point(double t) {
    KernelPoint p;
    p.x = Vec2(std::cos(t), std::sin(t));
    p.normal = p.x;
    p.tangent = Vec2(-std::sin(t), std::cos(t));
    p.kappa = 1.0;
    return p;
}

bool criterion9() {
    Criterion c(9, "kernel and oracle property suites");
    const auto t0 = std::chrono::steady_clock::now();

    double wr = 0.0;
    for (double z = 0.05; z <= 60.0; z *= 1.07) {
        const BesselJY jy = bessel_jy(z);
        const BesselIK ik = bessel_ik(z);
        wr = std::max(wr, std::abs((jy.j1 * jy.y0 - jy.j0 * jy.y1) * kPi * z / 2 - 1));
        wr = std::max(wr, std::abs((ik.i0 * ik.k1 + ik.i1 * ik.k0) * z - 1));
    }
    c.check(wr <= 1e-10, "Wronskians J/Y and I/K on [0.05, 60]: worst relative deviation " + fmt(wr, 3) + " <= 1e-10");

    // approach to the coincident limits along the unit circle
    const Wavenumber k = Wavenumber::from_lambda(516.96);
    const KernelPoint t = unit_circle_point(0.3);
    const Eigen::Matrix2d lim = kernel_diagonal(1.0);
    auto err = [&](double ds) { return (kernel_matrix(k, t, unit_circle_point(0.3 + ds)) - lim).cwiseAbs().eval(); };
    const Eigen::Matrix2d e1 = err(std::pow(2.0, -8)), e2 = err(std::pow(2.0, -10));
    const char* names[4] = {"G11", "G21", "G12", "G22"};  // column-major
    for (int e = 0; e < 4; ++e) {
        const double order = std::log2(e1(e) / e2(e)) / 2.0;
        const double needed = e == 1 ? 1.0 : 3.0;
        c.check(order >= needed - 0.1 && e2(e) < 1e-3, std::string(names[e]) + " approaches its diagonal limit at order " +
                                                            fmt(order, 3) + " (needed " + fmt(needed, 2) + ", error " +
                                                            fmt(e2(e), 3) + " at ds = 2^-10)");
    }

    double worst = 0.0;
    for (double lambda : {104.0, 516.96, 1581.0}) {
        const Wavenumber kk = Wavenumber::from_lambda(lambda);
        for (int i = 0; i < 6; ++i) {
            KernelPoint s, tt;
            const double a = 0.4 + 1.1 * i, b = 2.0 - 0.9 * i;
            s.x = Vec2(0.3 * std::cos(a), 0.5 * std::sin(a));
            s.normal = Vec2(std::cos(a + 0.4), std::sin(a + 0.4));
            s.tangent = Vec2(-s.normal.y(), s.normal.x());
            tt.x = s.x + (0.3 + 0.25 * i) * Vec2(std::cos(b), std::sin(b));
            tt.normal = Vec2(std::cos(b - 1.0), std::sin(b - 1.0));
            tt.tangent = Vec2(-tt.normal.y(), tt.normal.x());
            const Eigen::Matrix2d got = kernel_matrix(kk, tt, s), ref = kernel_oracle(kk, tt, s);
            for (int e = 0; e < 4; ++e) {
                const double scale = std::max(std::abs(ref(e)), 1e-3 * ref.cwiseAbs().maxCoeff());
                worst = std::max(worst, std::abs(got(e) - ref(e)) / scale);
            }
        }
    }
    c.check(worst <= 1e-5, "kernels vs finite-difference composition oracle at rho >= 0.3: worst " + fmt(worst, 3) + " <= 1e-5");

    double stencil = 0.0;
    for (double mu : {2.0, 3.2, 4.77}) {
        const Wavenumber kk = Wavenumber::from_mu(mu);
        const Vec2 y(0.1, -0.2);
        const double h = 2e-3;
        for (double rho : {0.5, 1.0, 1.5, 2.0}) {
            const Vec2 x = y + rho * Vec2(std::cos(0.3 * rho), std::sin(0.3 * rho));
            auto u = [&](double i, double j) { return greens(kk, x + h * Vec2(i, j), y); };
            const double bilap = (20 * u(0, 0) - 8 * (u(1, 0) + u(-1, 0) + u(0, 1) + u(0, -1)) +
                                  2 * (u(1, 1) + u(-1, 1) + u(1, -1) + u(-1, -1)) + (u(2, 0) + u(-2, 0) + u(0, 2) + u(0, -2))) /
                                 std::pow(h, 4);
            stencil = std::max(stencil, std::abs(bilap - kk.lambda * u(0, 0)));
        }
    }
    c.check(stencil <= 1e-4, "(Delta^2 - mu^4) G stencil residual " + fmt(stencil, 3) + " <= 1e-4");

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.check(secs <= 30.0, "runtime " + fmt(secs, 3) + " s <= 30 s");
    return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string which;
    std::string configs = PLATEMODES_CONFIG_DIR, out = "acceptance_out";
    app.add_option("criterion", which, "1-9 or all")->required();
    app.add_option("--configs", configs, "Directory of shipped configs");
    app.add_option("--out", out, "Directory for run outputs");
    CLI11_PARSE(app, argc, argv);
    g_configs = configs;
    g_out = out;

    const std::vector<std::function<bool()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                    criterion6, criterion7, criterion8, criterion9};
    std::vector<int> chosen;
    if (which == "all") {
        for (int i = 1; i <= 9; ++i) chosen.push_back(i);
    } else {
        const int n = std::atoi(which.c_str());
        if (n < 1 || n > 9) {
            std::cerr << "criterion must be 1-9 or all\n";
            return 2;
        }
        chosen.push_back(n);
    }
    bool ok = true;
    for (int n : chosen) {
        try {
            ok = all[std::size_t(n - 1)]() && ok;
        } catch (const std::exception& e) {
            std::cout << "CRITERION " << n << " FAIL: " << e.what() << std::endl;
            ok = false;
        }
    }
    return ok ? 0 : 1;
}
