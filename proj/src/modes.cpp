#include "platemodes/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <boost/math/tools/roots.hpp>

#include "platemodes/errors.hpp"
#include "platemodes/unclamped.hpp"

namespace platemodes {
namespace {

constexpr double kCollapsed = 1e-6;
constexpr double kJacobianRcond = 1e-13;
// An unclamped mode counts as a clamped one when some combination of its
// null densities vanishes at every clamp to this fraction of its peak.
constexpr double kInvisibleTol = 1e-3;

double inf_norm(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

Eigen::VectorXd to_eigen(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

Eigen::VectorXd residual(const Response& r, const std::vector<double>& alpha) {
    const int m = int(alpha.size());
    const Eigen::VectorXd a = to_eigen(alpha);
    Eigen::VectorXd f(m + 1);
    f.head(m) = r.a * a;
    f(m) = a.squaredNorm() - 1.0;
    return f;
}

Response checked_response(const ModeProblem& p, double lambda) {
    try {
        return response(p, lambda);
    } catch (const NearSingularSystem& e) {
        throw NearSingularSystem("unclamped eigenvalue collision: " + std::string(e.what()), e.rcond);
    }
}

ModeSolution finish(const ModeProblem& p, const Response& r, std::vector<double> alpha, double lambda) {
    const auto first = std::find_if(alpha.begin(), alpha.end(), [](double a) { return std::abs(a) > kCollapsed; });
    if (first != alpha.end() && *first < 0)
        for (double& a : alpha) a = -a;
    ModeSolution s;
    s.lambda = lambda;
    s.alpha = alpha;
    s.density = r.combine(alpha);
    s.clamps.points = p.points;
    s.clamps.alpha = alpha;
    s.residual_norm = inf_norm(residual(r, alpha));
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (std::abs(alpha[j]) < kCollapsed) s.collapsed.push_back(int(j));
    return s;
}

struct Inertia {
    int negative = 0;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

Inertia inertia(const Response& r) {
    const Eigen::MatrixXd sym = 0.5 * (r.a + r.a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Inertia in;
    in.values = es.eigenvalues();
    in.vectors = es.eigenvectors();
    for (int i = 0; i < in.values.size(); ++i)
        if (in.values(i) < 0) ++in.negative;
    return in;
}

}  // namespace

ModeProblem::ModeProblem(Discretization d, std::vector<Vec2> p) : disc(std::move(d)), points(std::move(p)) {
    if (points.empty()) throw InvalidSpec("at least one clamp point is required");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!contains(*disc.curve, points[i])) throw RangeError("clamp " + std::to_string(i) + " lies outside the plate");
        for (std::size_t j = 0; j < i; ++j)
            if ((points[i] - points[j]).norm() <= 1e-12 * disc.curve->scale())
                throw RangeError("clamps " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
    }
}

DensityPair Response::combine(const std::vector<double>& alpha) const {
    DensityPair d{Eigen::VectorXd::Zero(unit.front().sigma1.size()), Eigen::VectorXd::Zero(unit.front().sigma2.size())};
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        d.sigma1 += alpha[k] * unit[k].sigma1;
        d.sigma2 += alpha[k] * unit[k].sigma2;
    }
    return d;
}

Response response(const ModeProblem& p, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
    Response r;
    r.k = Wavenumber::from_lambda(lambda);
    const BieSolver solver(r.k, p.disc);
    r.rcond = solver.rcond();
    const int m = int(p.size());
    r.a.resize(m, m);
    ClampSet all;
    all.points = p.points;
    all.alpha.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
        const ClampSet unit = all.unit(k);
        r.unit.push_back(solver.solve(boundary_data(r.k, unit, p.disc)));
        r.a.col(k) = clamp_values(r.k, p.disc, unit, r.unit.back());
    }
    return r;
}

Eigen::VectorXd mismatch(const ModeProblem& p, const std::vector<double>& alpha, double lambda) {
    if (alpha.size() != p.size()) throw InvalidSpec("alpha length differs from the number of clamps");
    return residual(checked_response(p, lambda), alpha);
}

ModeSolution newton_solve(const ModeProblem& p, std::vector<double> alpha, double lambda, const NewtonOptions& opts) {
    const int m = int(p.size());
    if (int(alpha.size()) != m) throw InvalidSpec("alpha length differs from the number of clamps");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("initial lambda must be positive and finite");
    for (double a : alpha)
        if (!std::isfinite(a)) throw DomainError("initial alpha must be finite");

    Response r = checked_response(p, lambda);
    Eigen::VectorXd f = residual(r, alpha);
    std::vector<double> best_alpha = alpha;
    double best_lambda = lambda, best_res = inf_norm(f);

    // Once the tolerance is met one more step is taken and kept only if it
    // lowers the residual: the lambda-scaled tolerance is loose against the
    // size of the clamp values.
    int converged_at = -1;
    for (int it = 0;; ++it) {
        const double res = inf_norm(f);
        if (res < best_res) {
            best_res = res;
            best_alpha = alpha;
            best_lambda = lambda;
        }
        if (converged_at < 0 && res <= opts.tolerance * lambda) converged_at = it;
        if (converged_at >= 0 && (it > converged_at || res == 0.0)) {
            ModeSolution s = finish(p, r, alpha, lambda);
            s.iterations = converged_at;
            return s;
        }
        if (it == opts.max_iterations)
            throw NonConvergence("Newton did not converge in " + std::to_string(opts.max_iterations) + " iterations",
                                 best_alpha, best_lambda, best_res);

        // Forward-difference Jacobian. F is linear in alpha, so those columns
        // come from the response matrix without further solves.
        Eigen::MatrixXd jac(m + 1, m + 1);
        for (int k = 0; k < m; ++k) {
            const double h = opts.fd_step * std::max(1.0, std::abs(alpha[k]));
            jac.col(k).head(m) = r.a.col(k);
            jac(m, k) = 2.0 * alpha[k] + h;
        }
        const double h = opts.fd_step * std::max(1.0, lambda);
        jac.col(m) = (residual(checked_response(p, lambda + h), alpha) - f) / h;

        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues();
        if (!(sv(m) > kJacobianRcond * sv(0))) {
            int collapsed = -1;
            double smallest = std::numeric_limits<double>::infinity();
            for (int j = 0; j < m; ++j)
                if (std::abs(alpha[j]) < smallest) smallest = std::abs(alpha[collapsed = j]);
            throw DegenerateConfiguration("singular Jacobian at lambda = " + std::to_string(lambda) +
                                              "; smallest strength at clamp " + std::to_string(collapsed),
                                          collapsed);
        }
        const Eigen::VectorXd dz = jac.colPivHouseholderQr().solve(-f);

        double t = 1.0;
        std::vector<double> trial_alpha(m);
        double trial_lambda = lambda;
        Response trial_r;
        Eigen::VectorXd trial_f;
        bool have_trial = false;
        for (int halving = 0; halving <= opts.max_halvings; ++halving, t *= 0.5) {
            const double lam = lambda + t * dz(m);
            if (!(lam > 0.0)) continue;
            for (int k = 0; k < m; ++k) trial_alpha[k] = alpha[k] + t * dz(k);
            try {
                trial_r = checked_response(p, lam);
            } catch (const NearSingularSystem&) {
                continue;
            }
            trial_lambda = lam;
            trial_f = residual(trial_r, trial_alpha);
            have_trial = true;
            if (inf_norm(trial_f) < res) break;
        }
        if (converged_at >= 0 && (!have_trial || !(inf_norm(trial_f) < res))) {
            ModeSolution s = finish(p, r, alpha, lambda);
            s.iterations = converged_at;
            return s;
        }
        if (!have_trial)
            throw NonConvergence("no admissible Newton step from lambda = " + std::to_string(lambda), best_alpha,
                                 best_lambda, best_res);
        alpha = trial_alpha;
        lambda = trial_lambda;
        r = std::move(trial_r);
        f = trial_f;
    }
}

ModeSolution bisection_solve(const ModeProblem& p, double mu_lo, double mu_hi, double rel_tol) {
    if (!(mu_lo > 0.0) || !(mu_hi > mu_lo)) throw DomainError("invalid mu interval");
    const std::vector<double> alpha(p.size(), 1.0 / std::sqrt(double(p.size())));
    int evals = 0;
    auto first_value = [&](double mu) {
        ++evals;
        return residual(checked_response(p, std::pow(mu, 4)), alpha)(0);
    };
    const double f_lo = first_value(mu_lo), f_hi = first_value(mu_hi);
    if ((f_lo < 0) == (f_hi < 0)) throw BracketError("clamp value does not change sign on the mu interval");
    ModeSolution s;
    try {
        const auto r = boost::math::tools::bisect(
            first_value, mu_lo, mu_hi, [rel_tol](double a, double b) { return std::abs(b - a) <= rel_tol * std::min(a, b); });
        const double mu = 0.5 * (r.first + r.second);
        s = finish(p, checked_response(p, std::pow(mu, 4)), alpha, std::pow(mu, 4));
    } catch (const NearSingularSystem& e) {
        throw BracketError(std::string("sign change is a pole: ") + e.what());
    }
    s.iterations = evals;
    if (s.residual_norm > std::min(std::abs(f_lo), std::abs(f_hi)))
        throw BracketError("sign change is a pole, not a root, near lambda = " + std::to_string(s.lambda));
    return s;
}

ModeSolution bisection_near(const ModeProblem& p, double mu_guess, double rel_width, int max_expand) {
    if (!(mu_guess > 0.0)) throw DomainError("mu guess must be positive");
    const std::vector<double> alpha(p.size(), 1.0 / std::sqrt(double(p.size())));
    auto f = [&](double mu) { return residual(checked_response(p, std::pow(mu, 4)), alpha)(0); };
    const double f0 = f(mu_guess);
    double lo = mu_guess, hi = mu_guess, flo = f0, fhi = f0;
    double d = rel_width * mu_guess;
    std::string poles;
    auto attempt = [&](double a, double b) -> std::optional<ModeSolution> {
        try {
            return bisection_solve(p, a, b);
        } catch (const BracketError& e) {
            poles = e.what();
            return std::nullopt;
        }
    };
    for (int i = 0; i <= max_expand; ++i, d *= 2) {
        const double a = mu_guess - d, b = mu_guess + d;
        const double fa = f(a);
        if ((fa < 0) != (flo < 0))
            if (auto s = attempt(a, lo)) return *s;
        const double fb = f(b);
        if ((fb < 0) != (fhi < 0))
            if (auto s = attempt(hi, b)) return *s;
        lo = a;
        hi = b;
        flo = fa;
        fhi = fb;
    }
    throw BracketError("no root of the clamp value near mu = " + std::to_string(mu_guess) +
                       (poles.empty() ? "" : " (" + poles + ")"));
}

std::vector<ModeSolution> response_roots(const ModeProblem& p, double mu_lo, double mu_hi, double mu_step,
                                         std::size_t max_roots) {
    if (!(mu_lo > 0.0) || !(mu_hi > mu_lo) || !(mu_step > 0.0)) throw DomainError("invalid mu range or step");
    auto sample = [&](double& mu) {
        for (int tries = 0;; ++tries) {
            try {
                return inertia(response(p, std::pow(mu, 4)));
            } catch (const NearSingularSystem&) {
                if (tries == 4) throw;
                mu += 1e-3 * mu_step;
            }
        }
    };
    std::vector<ModeSolution> roots;
    double a = mu_lo;
    Inertia ia = sample(a);
    while (a < mu_hi && roots.size() < max_roots) {
        double b = std::min(a + mu_step, mu_hi);
        Inertia ib = sample(b);
        if (ib.negative < ia.negative) {
            double lo = a, hi = b;
            int n_lo = ia.negative;
            Inertia ihi = ib;
            while (hi - lo > 1e-9 * hi) {
                double mid = 0.5 * (lo + hi);
                const Inertia im = sample(mid);
                if (im.negative < n_lo) {
                    hi = mid;
                    ihi = im;
                } else {
                    lo = mid;
                    n_lo = im.negative;
                }
            }
            int idx = 0;
            ihi.values.cwiseAbs().minCoeff(&idx);
            const Eigen::VectorXd v = ihi.vectors.col(idx);
            const std::vector<double> alpha(v.data(), v.data() + v.size());
            const double lam = std::pow(hi, 4);
            try {
                roots.push_back(newton_solve(p, alpha, lam));
            } catch (const Error&) {
                roots.push_back(finish(p, response(p, lam), alpha, lam));
            }
        }
        a = b;
        ia = std::move(ib);
    }
    return roots;
}

ModeSolution lowest_mode(const ModeProblem& p, double mu_max, double mu_step) {
    const SpectrumScan scan = scan_unclamped(p.disc, 1.0, mu_max, 0.02);
    const std::vector<UnclampedMode> genuine = scan.genuine();
    // clamping only raises eigenvalues, so the walk starts at the lowest
    // unclamped one
    const double start = genuine.empty() ? 1.0 : genuine.front().mu * (1.0 + 1e-7);
    const std::vector<ModeSolution> roots = response_roots(p, start, mu_max, mu_step, 1);
    double bound = roots.empty() ? std::numeric_limits<double>::infinity() : roots.front().lambda;

    for (const UnclampedMode& um : genuine) {
        if (um.lambda >= bound) break;
        const std::vector<DensityPair> nd = null_densities(p.disc, um.mu);
        const Wavenumber k = Wavenumber::from_mu(um.mu);
        const std::vector<Vec2> probes = interior_probes(p.disc);
        Eigen::MatrixXd b(p.size(), nd.size());
        for (std::size_t i = 0; i < nd.size(); ++i) {
            const std::vector<double> at = eval_regular(k, p.disc, nd[i], p.points);
            double peak = 0.0;
            for (double v : eval_regular(k, p.disc, nd[i], probes)) peak = std::max(peak, std::abs(v));
            for (std::size_t j = 0; j < p.size(); ++j) b(j, i) = at[j] / peak;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
        const Eigen::VectorXd c = svd.matrixV().col(nd.size() - 1);
        const double vanish = nd.size() > p.size() ? 0.0 : (b * c).lpNorm<Eigen::Infinity>() / c.cwiseAbs().maxCoeff();
        if (vanish > kInvisibleTol) continue;
        ModeSolution s;
        s.lambda = um.lambda;
        s.alpha.assign(p.size(), 0.0);
        s.density = DensityPair{Eigen::VectorXd::Zero(p.disc.total()), Eigen::VectorXd::Zero(p.disc.total())};
        for (std::size_t i = 0; i < nd.size(); ++i) {
            s.density.sigma1 += c(i) * nd[i].sigma1;
            s.density.sigma2 += c(i) * nd[i].sigma2;
        }
        s.clamps.points = p.points;
        s.clamps.alpha = s.alpha;
        s.residual_norm = vanish;
        s.unclamped = true;
        for (std::size_t j = 0; j < p.size(); ++j) s.collapsed.push_back(int(j));
        return s;
    }
    if (roots.empty()) throw BracketError("no clamped eigenvalue below mu_max");
    return roots.front();
}

std::vector<double> mode_field(const ModeProblem& p, const ModeSolution& mode, const std::vector<Vec2>& targets) {
    return eval_mode(mode.wavenumber(), p.disc, mode.clamps, mode.density, targets);
}

}  // namespace platemodes
