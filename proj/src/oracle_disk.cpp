#include "platemodes/oracle_disk.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "platemodes/errors.hpp"
#include "platemodes/kernels.hpp"
#include "platemodes/specfun.hpp"

namespace platemodes {
namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

// Scan upward from 0.5 in steps of 0.01 and return the nth root (1-based).
double nth_root(const std::function<double(double)>& f, int n) {
    double a = 0.5, fa = f(a);
    int found = 0;
    for (int i = 1; i < 20000; ++i) {
        const double b = 0.5 + 0.01 * i, fb = f(b);
        if (fa == 0.0 || (fa < 0) != (fb < 0)) {
            if (++found == n) {
                if (fa == 0.0) return a;
                std::uintmax_t iters = 200;
                const auto r = boost::math::tools::toms748_solve(
                    f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
                return 0.5 * (r.first + r.second);
            }
        }
        a = b;
        fa = fb;
    }
    throw BracketError("disk root not found in scan range");
}

double cached(std::map<std::pair<int, int>, double>& cache, std::pair<int, int> key, const std::function<double()>& f) {
    static std::mutex m;
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double v = f();
    std::lock_guard<std::mutex> lock(m);
    cache[key] = v;
    return v;
}

double jn_prime(int m, double z) {
    return m == 0 ? -bessel_j1(z) : bessel_jn(m - 1, z) - m / z * bessel_jn(m, z);
}

double in_prime(int m, double z) {
    return m == 0 ? bessel_i1(z) : bessel_in(m - 1, z) - m / z * bessel_in(m, z);
}

// Coefficient of the singular-at-origin combination that makes u(1) = 0.
double center_clamp_coefficient(double mu) {
    const BesselJY jy = bessel_jy(mu);
    const BesselIK ik = bessel_ik(mu);
    return (jy.j0 - ik.i0) / (kTwoOverPi * ik.k0 + jy.y0);
}

}  // namespace

double center_clamp_equation(double mu) {
    const BesselJY jy = bessel_jy(mu);
    const BesselIK ik = bessel_ik(mu);
    return ((jy.j0 - ik.i0) * (kTwoOverPi * ik.k1 + jy.y1) - (jy.j1 + ik.i1) * (kTwoOverPi * ik.k0 + jy.y0)) / ik.i0;
}

double disk_exact_mu(int n) {
    if (n < 1) throw DomainError("root index must be >= 1");
    static std::map<std::pair<int, int>, double> cache;
    return cached(cache, {0, n}, [n] { return nth_root(center_clamp_equation, n); });
}

double disk_exact_eigenvalue(int n) { return std::pow(disk_exact_mu(n), 4); }

double center_clamp_profile(int n, double rho) {
    if (rho < 0.0 || rho > 1.0) throw DomainError("rho must lie in [0, 1]");
    if (rho == 0.0) return 0.0;
    const double mu = disk_exact_mu(n), z = mu * rho;
    const BesselJY jy = bessel_jy(z);
    const BesselIK ik = bessel_ik(z);
    return jy.j0 - ik.i0 - center_clamp_coefficient(mu) * (kTwoOverPi * ik.k0 + jy.y0);
}

double unclamped_equation(int m, double mu) {
    return jn_prime(m, mu) - in_prime(m, mu) / bessel_in(m, mu) * bessel_jn(m, mu);
}

double disk_unclamped_mu(int m, int n) {
    if (m < 0 || n < 0) throw DomainError("mode indices must be >= 0");
    static std::map<std::pair<int, int>, double> cache;
    return cached(cache, {m, n}, [m, n] { return nth_root([m](double x) { return unclamped_equation(m, x); }, n + 1); });
}

double disk_unclamped_eigenvalue(int m, int n) { return std::pow(disk_unclamped_mu(m, n), 4); }

double unclamped_profile(int m, int n, double rho, double theta) {
    if (rho < 0.0 || rho > 1.0) throw DomainError("rho must lie in [0, 1]");
    const double mu = disk_unclamped_mu(m, n);
    const double c = bessel_jn(m, mu) / bessel_in(m, mu);
    return (bessel_jn(m, mu * rho) - c * bessel_in(m, mu * rho)) * std::cos(m * theta);
}

double unclamped_profile_drho(int m, int n, double rho, double theta) {
    if (rho <= 0.0 || rho > 1.0) throw DomainError("rho must lie in (0, 1]");
    const double mu = disk_unclamped_mu(m, n);
    const double c = bessel_jn(m, mu) / bessel_in(m, mu);
    return mu * (jn_prime(m, mu * rho) - c * in_prime(m, mu * rho)) * std::cos(m * theta);
}

Eigen::MatrixXd disk_response_matrix(double lambda, const std::vector<Vec2>& points, int mmax) {
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    if (mmax < 0 || mmax > 100) throw DomainError("mmax must lie in [0, 100]");
    const Wavenumber k = Wavenumber::from_lambda(lambda);
    const double mu = k.mu, c8 = 1.0 / (8 * mu * mu), c4 = 1.0 / (4 * std::numbers::pi * mu * mu);
    const int n = int(points.size());
    for (const Vec2& p : points)
        if (!(p.norm() < 1.0)) throw DomainError("point outside the unit disk");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    // Y_m(mu), K_m(mu) and derivatives by forward recurrence
    std::vector<double> ym(mmax + 2), km(mmax + 2);
    ym[0] = bessel_y0(mu);
    ym[1] = bessel_y1(mu);
    km[0] = bessel_k0(mu);
    km[1] = bessel_k1(mu);
    for (int m = 1; m <= mmax; ++m) {
        ym[m + 1] = 2.0 * m / mu * ym[m] - ym[m - 1];
        km[m + 1] = 2.0 * m / mu * km[m] + km[m - 1];
    }
    for (int m = 0; m <= mmax; ++m) {
        const double eps = m == 0 ? 1.0 : 2.0;
        const double jb = bessel_jn(m, mu), ib = bessel_in(m, mu);
        const double djb = mu * jn_prime(m, mu), dib = mu * in_prime(m, mu);
        const double dyb = mu * (m == 0 ? -ym[1] : ym[m - 1] - m / mu * ym[m]);
        const double dkb = mu * (m == 0 ? -km[1] : -km[m - 1] - m / mu * km[m]);
        const double det = jb * dib - ib * djb;
        std::vector<double> jr(n), ir(n), th(n);
        for (int j = 0; j < n; ++j) {
            const double r = points[j].norm();
            jr[j] = bessel_jn(m, mu * r);
            ir[j] = bessel_in(m, mu * r);
            th[j] = std::atan2(points[j].y(), points[j].x());
        }
        for (int q = 0; q < n; ++q) {
            // m-th coefficient of G(., x_q) on the unit circle, value and radial derivative
            const double g = -c8 * jr[q] * ym[m] - c4 * ir[q] * km[m];
            const double gp = -c8 * jr[q] * dyb - c4 * ir[q] * dkb;
            const double ca = (-g * dib + gp * ib) / det, cb = (-gp * jb + g * djb) / det;
            for (int j = 0; j < n; ++j)
                a(j, q) += 8 * std::numbers::pi * eps * std::cos(m * (th[j] - th[q])) * (ca * jr[j] + cb * ir[j]);
        }
    }
    for (int j = 0; j < n; ++j)
        for (int q = 0; q < n; ++q)
            if (j != q) a(j, q) += 8 * std::numbers::pi * greens(k, points[j], points[q]);
    return a;
}

}  // namespace platemodes
