#include "platemodes/unclamped.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <boost/math/tools/minima.hpp>

#include "platemodes/errors.hpp"

namespace platemodes {
namespace {

constexpr double kAcceptRatio = 1e3;
constexpr double kNullTol = 1e-6;
// Genuine null densities give interior fields of order 1e-1 per unit RMS
// density on the test domains (4e-3 on the annulus), resonances of order 1e-5.
constexpr double kSpuriousRatio = 3e-4;

DensityPair split(const Eigen::VectorXd& v) {
    const int n = int(v.size() / 2);
    DensityPair d{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        d.sigma1(i) = v(2 * i);
        d.sigma2(i) = v(2 * i + 1);
    }
    return d;
}

double field_ratio(const Discretization& disc, double mu, const DensityPair& d) {
    const std::vector<Vec2> probes = interior_probes(disc);
    if (probes.empty()) return 0.0;
    const std::vector<double> u = eval_regular(Wavenumber::from_mu(mu), disc, d, probes);
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    const double rms = std::sqrt((d.sigma1.squaredNorm() + d.sigma2.squaredNorm()) / (2.0 * disc.total()));
    return m / rms;
}

}  // namespace

std::vector<UnclampedMode> SpectrumScan::genuine() const {
    std::vector<UnclampedMode> out;
    for (const auto& m : minima)
        if (!m.spurious) out.push_back(m);
    return out;
}

double smallest_singular_value(const Discretization& disc, double mu) {
    const Eigen::MatrixXd a = assemble(Wavenumber::from_mu(mu), disc);
    const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
    return s(s.size() - 1);
}

std::vector<Vec2> interior_probes(const Discretization& disc, int per_axis) {
    const Eigen::Vector4d bb = disc.curve->bounding_box();
    const double margin = 5.0 * disc.weight.maxCoeff();
    std::vector<Vec2> out;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j) {
            const Vec2 x(bb(0) + (bb(2) - bb(0)) * (i + 0.5) / per_axis, bb(1) + (bb(3) - bb(1)) * (j + 0.5) / per_axis);
            if (disc.curve->signed_distance(x) < -margin) out.push_back(x);
        }
    return out;
}

std::vector<DensityPair> null_densities(const Discretization& disc, double mu) {
    const Eigen::MatrixXd a = assemble(Wavenumber::from_mu(mu), disc);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    const int n = int(s.size());
    if (s(n - 1) > kNullTol * s(0))
        throw NotAnEigenvalue("smallest singular value " + std::to_string(s(n - 1) / s(0)) +
                              " of |A| at mu = " + std::to_string(mu));
    std::vector<DensityPair> out;
    for (int i = n - 1; i >= 0 && s(i) <= kNullTol * s(0); --i) out.push_back(split(svd.matrixV().col(i)));
    return out;
}

UnclampedMode refine_unclamped(const Discretization& disc, double mu_lo, double mu_hi) {
    std::uintmax_t iters = 200;
    // golden section (Brent) with bits chosen so mu is resolved to ~1e-8
    const auto r = boost::math::tools::brent_find_minima(
        [&](double m) { return smallest_singular_value(disc, m); }, mu_lo, mu_hi, 26, iters);
    UnclampedMode m;
    m.mu = r.first;
    m.lambda = std::pow(m.mu, 4);
    m.sigma_min = r.second;
    const Eigen::MatrixXd a = assemble(Wavenumber::from_mu(m.mu), disc);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    const int n = int(s.size());
    m.multiplicity = 0;
    for (int i = n - 1; i >= 0 && s(i) <= kNullTol * s(0); --i) ++m.multiplicity;
    m.multiplicity = std::max(m.multiplicity, 1);
    m.field_ratio = field_ratio(disc, m.mu, split(svd.matrixV().col(n - 1)));
    m.spurious = m.field_ratio < kSpuriousRatio;
    return m;
}

SpectrumScan scan_unclamped(const Discretization& disc, double mu_lo, double mu_hi, double grid_step) {
    if (!(mu_lo > 0.0) || !(mu_hi > mu_lo) || !(grid_step > 0.0)) throw DomainError("invalid mu range or step");
    SpectrumScan scan;
    const int n = int(std::floor((mu_hi - mu_lo) / grid_step + 1e-9)) + 1;
    scan.mu.resize(n);
    scan.sigma_min.resize(n);
    for (int i = 0; i < n; ++i) scan.mu[i] = mu_lo + i * grid_step;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) scan.sigma_min[i] = smallest_singular_value(disc, scan.mu[i]);

    for (int i = 1; i + 1 < n; ++i) {
        const double s = scan.sigma_min[i];
        if (!(s <= scan.sigma_min[i - 1] && s < scan.sigma_min[i + 1])) continue;
        double background = 0.0;
        for (int j = std::max(0, i - 5); j <= std::min(n - 1, i + 5); ++j)
            background = std::max(background, scan.sigma_min[j]);
        UnclampedMode m = refine_unclamped(disc, scan.mu[i - 1], scan.mu[i + 1]);
        m.background = background;
        if (m.sigma_min * kAcceptRatio <= background) scan.minima.push_back(m);
    }
    return scan;
}

std::vector<double> unclamped_mode_field(const Discretization& disc, double mu, const std::vector<Vec2>& targets,
                                         int which) {
    const std::vector<DensityPair> nd = null_densities(disc, mu);
    if (which < 0 || which >= int(nd.size())) throw DomainError("null density index out of range");
    std::vector<double> u = eval_regular(Wavenumber::from_mu(mu), disc, nd[which], targets);
    std::size_t imax = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
    if (!u.empty() && u[imax] < 0)
        for (double& v : u) v = -v;
    return u;
}

}  // namespace platemodes
