#include "platemodes/bie.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "platemodes/errors.hpp"

namespace platemodes {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEightPi = 8.0 * kPi;
// targets nearer than this many local spacings trigger upsampling
constexpr double kNearFactor = 5.0;

KernelPoint node(const Discretization& d, int i) {
    return {d.x.col(i), d.normal.col(i), d.tangent.col(i), d.kappa(i)};
}

// Geometry and density on a uniformly refined grid.
struct FineGrid {
    Eigen::Matrix2Xd x, normal;
    Eigen::VectorXd w, s1, s2;
};

FineGrid refine(const Discretization& d, const DensityPair& dens, int factor) {
    const int total = d.total() * factor;
    FineGrid g;
    g.x.resize(2, total);
    g.normal.resize(2, total);
    g.w.resize(total);
    g.s1.resize(total);
    g.s2.resize(total);
    int k = 0;
    for (std::size_t c = 0; c < d.count.size(); ++c) {
        const int n = d.count[c], nf = n * factor;
        const auto& comp = d.curve->components()[c];
        const Eigen::VectorXd s1 = trig_upsample(dens.sigma1.segment(d.offset[c], n), factor);
        const Eigen::VectorXd s2 = trig_upsample(dens.sigma2.segment(d.offset[c], n), factor);
        for (int m = 0; m < nf; ++m, ++k) {
            const CurveSample s = comp.eval(2.0 * kPi * m / nf);
            const double sp = s.d1.norm();
            g.x.col(k) = s.x;
            g.normal.col(k) = Vec2(s.d1.y(), -s.d1.x()) / sp;
            g.w(k) = 2.0 * kPi / nf * sp;
            g.s1(k) = s1(m);
            g.s2(k) = s2(m);
        }
    }
    return g;
}

double layer_sum(Wavenumber k, const Eigen::Matrix2Xd& x, const Eigen::Matrix2Xd& normal, const Eigen::VectorXd& w,
                 const Eigen::VectorXd& s1, const Eigen::VectorXd& s2, const Vec2& target) {
    double sum = 0.0;
    KernelPoint src;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        src.x = x.col(j);
        src.normal = normal.col(j);
        const Eigen::Vector2d g = layer_kernels(k, target, src);
        sum += (g(0) * s1(j) + g(1) * s2(j)) * w(j);
    }
    return sum;
}

}  // namespace

ClampSet ClampSet::unit(std::size_t k) const {
    ClampSet c;
    c.points = points;
    c.alpha.assign(points.size(), 0.0);
    c.alpha.at(k) = 1.0;
    return c;
}

double singular_part(Wavenumber k, const ClampSet& clamps, const Vec2& x) {
    double u = 0.0;
    for (std::size_t j = 0; j < clamps.size(); ++j) {
        if ((x - clamps.points[j]).norm() == 0.0)
            throw SingularEvaluation("singular part evaluated at a clamp point");
        if (clamps.alpha[j] != 0.0) u += clamps.alpha[j] * greens(k, x, clamps.points[j]);
    }
    return kEightPi * u;
}

BoundaryData boundary_data(Wavenumber k, const ClampSet& clamps, const Discretization& d) {
    if (clamps.alpha.size() != clamps.points.size()) throw InvalidSpec("clamp strengths and points differ in length");
    BoundaryData b;
    b.g1 = Eigen::VectorXd::Zero(d.total());
    b.g2 = Eigen::VectorXd::Zero(d.total());
    for (std::size_t j = 0; j < clamps.size(); ++j) {
        const Vec2 xj = clamps.points[j];
        const double a = clamps.alpha[j];
        double nearest = 1e300;
        for (int i = 0; i < d.total(); ++i) {
            const Vec2 xi = d.x.col(i);
            nearest = std::min(nearest, (xi - xj).norm());
            if (a == 0.0) continue;
            b.g1(i) -= kEightPi * a * greens(k, xi, xj);
            b.g2(i) -= kEightPi * a * greens_gradient(k, xi, xj).dot(d.normal.col(i));
        }
        if (nearest < 1e-6 * d.curve->scale())
            b.warnings.push_back("clamp " + std::to_string(j) + " lies within 1e-6 of the boundary; system is ill-conditioned");
    }
    return b;
}

Eigen::MatrixXd assemble(Wavenumber k, const Discretization& d) {
    const int n = d.total();
    Eigen::MatrixXd a(2 * n, 2 * n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const KernelPoint ti = node(d, i);
        for (int j = 0; j < n; ++j) {
            const Eigen::Matrix2d blk = (i == j ? kernel_diagonal(d.kappa(i)) : kernel_matrix(k, ti, node(d, j))) * d.weight(j);
            a.block<2, 2>(2 * i, 2 * j) = blk;
        }
        a(2 * i, 2 * i) += 0.5;
        a(2 * i + 1, 2 * i + 1) += 0.5;
        a(2 * i + 1, 2 * i) -= d.kappa(i);
    }
    return a;
}

BieSolver::BieSolver(Wavenumber k, const Discretization& disc) : k_(k), disc_(disc) {
    a_ = assemble(k, disc_);
    lu_.compute(a_);
    rcond_ = lu_.rcond();
    anorm_ = a_.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(rcond_ > kSingularRcond))
        throw NearSingularSystem("lambda = " + std::to_string(k.lambda) +
                                     " is (near) an unclamped eigenvalue or a resonance of the representation",
                                 rcond_);
}

DensityPair BieSolver::solve(const BoundaryData& data) const {
    const int n = disc_.total();
    Eigen::VectorXd g(2 * n);
    for (int i = 0; i < n; ++i) {
        g(2 * i) = data.g1(i);
        g(2 * i + 1) = data.g2(i);
    }
    DensityPair out;
    out.sigma1 = Eigen::VectorXd::Zero(n);
    out.sigma2 = Eigen::VectorXd::Zero(n);
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm == 0.0) return out;
    const Eigen::VectorXd s = lu_.solve(g);
    const double rnorm = (a_ * s - g).lpNorm<Eigen::Infinity>();
    // Close to an unclamped eigenvalue the relative residual of a backward
    // stable solve grows like eps cond(A); there the normwise backward error
    // is what can be asked for.
    if (!(rnorm <= 1e-10 * gnorm)) {
        const double backward = rnorm / (anorm_ * s.lpNorm<Eigen::Infinity>() + gnorm);
        if (!(backward <= kBackwardTol))
            throw NearSingularSystem("density solve backward error " + std::to_string(backward) + " exceeds " +
                                         std::to_string(kBackwardTol),
                                     rcond_);
    }
    for (int i = 0; i < n; ++i) {
        out.sigma1(i) = s(2 * i);
        out.sigma2(i) = s(2 * i + 1);
    }
    return out;
}

DensityPair solve_density(Wavenumber k, const Discretization& disc, const BoundaryData& data) {
    return BieSolver(k, disc).solve(data);
}

Eigen::VectorXd trig_upsample(const Eigen::VectorXd& v, int factor) {
    const int n = int(v.size());
    if (factor == 1) return v;
    if (n % 2 != 0) throw DomainError("trig_upsample needs an even sample count");
    const int half = n / 2;
    Eigen::VectorXd ca(half + 1), sb(half + 1);
    for (int k = 0; k <= half; ++k) {
        double c = 0.0, s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double t = 2.0 * kPi * double(k) * j / n;
            c += v(j) * std::cos(t);
            s += v(j) * std::sin(t);
        }
        const double scale = (k == 0 || k == half) ? 1.0 / n : 2.0 / n;
        ca(k) = c * scale;
        sb(k) = (k == 0 || k == half) ? 0.0 : s * scale;
    }
    const int nf = n * factor;
    Eigen::VectorXd out(nf);
    for (int m = 0; m < nf; ++m) {
        if (m % factor == 0) {
            out(m) = v(m / factor);
            continue;
        }
        double sum = 0.0;
        for (int k = 0; k <= half; ++k) {
            const double t = 2.0 * kPi * double(k) * m / nf;
            sum += ca(k) * std::cos(t) + sb(k) * std::sin(t);
        }
        out(m) = sum;
    }
    return out;
}

double trig_interpolate(const Eigen::VectorXd& v, double theta) {
    const int n = int(v.size());
    const int half = n / 2;
    double sum = 0.0;
    for (int k = 0; k <= half; ++k) {
        double c = 0.0, s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double t = 2.0 * kPi * double(k) * j / n;
            c += v(j) * std::cos(t);
            s += v(j) * std::sin(t);
        }
        const bool edge = (k == 0 || k == half);
        sum += (edge ? 1.0 : 2.0) / n * (c * std::cos(k * theta) + (edge ? 0.0 : s * std::sin(k * theta)));
    }
    return sum;
}

Eigen::Vector2d boundary_trace(Wavenumber k, const Discretization& d, const DensityPair& dens, int component,
                               double theta) {
    const CurveSample cs = d.curve->components().at(component).eval(theta);
    const double sp = cs.d1.norm();
    KernelPoint t;
    t.x = cs.x;
    t.tangent = cs.d1 / sp;
    t.normal = Vec2(cs.d1.y(), -cs.d1.x()) / sp;
    t.kappa = (cs.d1.x() * cs.d2.y() - cs.d1.y() * cs.d2.x()) / (sp * sp * sp);
    const int off = d.offset[component], n = d.count[component];
    const double s1 = trig_interpolate(dens.sigma1.segment(off, n), theta);
    const double s2 = trig_interpolate(dens.sigma2.segment(off, n), theta);
    Eigen::Vector2d out(0.5 * s1, -t.kappa * s1 + 0.5 * s2);
    for (int j = 0; j < d.total(); ++j) {
        const KernelPoint src = node(d, j);
        const bool same = (src.x - t.x).norm() <= 1e-10 * d.curve->scale();
        const Eigen::Matrix2d m = same ? kernel_diagonal(t.kappa) : kernel_matrix(k, t, src);
        out += m * Eigen::Vector2d(dens.sigma1(j), dens.sigma2(j)) * d.weight(j);
    }
    return out;
}

std::vector<double> eval_regular(Wavenumber k, const Discretization& d, const DensityPair& dens,
                                 const std::vector<Vec2>& targets) {
    const int nt = int(targets.size());
    std::vector<int> factor(nt, 1);
    for (int t = 0; t < nt; ++t) {
        const Vec2& x = targets[t];
        if (!x.allFinite()) throw DomainError("eval_regular: non-finite target");
        int inear = 0;
        const double dist = (d.x.colwise() - x).colwise().norm().minCoeff(&inear);
        const double h = d.spacing(inear);
        bool inside;
        if (dist < 2.0 * h) inside = d.curve->locate(x) == Location::Inside;
        else inside = (x - d.x.col(inear)).dot(d.normal.col(inear)) < 0.0;
        if (!inside) throw DomainError("eval_regular: target outside the domain");
        // distance to the curve, not to the nearest node: drop the tangential
        // offset and allow for the curve bending away from its tangent
        const Vec2 rel = x - d.x.col(inear);
        const double along = rel.dot(d.tangent.col(inear));
        const double gap = std::max(std::abs(rel.dot(d.normal.col(inear))) - 0.5 * std::abs(d.kappa(inear)) * along * along, 0.0);
        const double depth = std::min(dist, gap);
        int f = 1;
        while (f < kMaxUpsample && depth < kNearFactor * h / f) f *= 2;
        factor[t] = f;
    }
    std::map<int, FineGrid> grids;
    for (int f : factor)
        if (f > 1 && !grids.count(f)) grids.emplace(f, refine(d, dens, f));

    std::vector<double> out(nt, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (int t = 0; t < nt; ++t) {
        if (factor[t] == 1) {
            out[t] = layer_sum(k, d.x, d.normal, d.weight, dens.sigma1, dens.sigma2, targets[t]);
        } else {
            const FineGrid& g = grids.at(factor[t]);
            out[t] = layer_sum(k, g.x, g.normal, g.w, g.s1, g.s2, targets[t]);
        }
    }
    return out;
}

std::vector<double> eval_mode(Wavenumber k, const Discretization& d, const ClampSet& clamps,
                              const DensityPair& dens, const std::vector<Vec2>& targets) {
    std::vector<double> u = eval_regular(k, d, dens, targets);
    for (std::size_t t = 0; t < targets.size(); ++t) u[t] += singular_part(k, clamps, targets[t]);
    return u;
}

Eigen::VectorXd clamp_values(Wavenumber k, const Discretization& d, const ClampSet& clamps,
                             const DensityPair& dens) {
    const std::vector<double> ur = eval_regular(k, d, dens, clamps.points);
    Eigen::VectorXd u(clamps.size());
    for (std::size_t j = 0; j < clamps.size(); ++j) {
        double us = 0.0;
        for (std::size_t i = 0; i < clamps.size(); ++i)
            if (i != j && clamps.alpha[i] != 0.0) us += clamps.alpha[i] * greens(k, clamps.points[j], clamps.points[i]);
        u(j) = kEightPi * us + ur[j];
    }
    return u;
}

}  // namespace platemodes
