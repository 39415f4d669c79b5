#include "platemodes/kernels.hpp"

#include <cmath>
#include <numbers>

#include "platemodes/errors.hpp"
#include "platemodes/specfun.hpp"

namespace platemodes {
namespace {

constexpr double kPi = std::numbers::pi;

double checked_distance(const Vec2& r) {
    const double rho = r.norm();
    if (!(rho > 0.0)) throw SingularEvaluation("kernel evaluated at coincident points");
    return rho;
}

}  // namespace

Wavenumber Wavenumber::from_mu(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("wavenumber must be positive");
    const double m2 = mu * mu;
    return {mu, m2 * m2};
}

Wavenumber Wavenumber::from_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("eigenvalue must be positive");
    return {std::sqrt(std::sqrt(lambda)), lambda};
}

double greens(Wavenumber k, const Vec2& x, const Vec2& y) {
    const double rho = checked_distance(x - y);
    const double mu = k.mu;
    const double z = mu * rho;
    const BesselYK b = bessel_yk(z);
    return -b.y0 / (8.0 * mu * mu) - b.k0 / (4.0 * kPi * mu * mu);
}

Vec2 greens_gradient(Wavenumber k, const Vec2& x, const Vec2& y) {
    const Vec2 r = x - y;
    const double rho = checked_distance(r);
    const double mu = k.mu;
    const BesselYK b = bessel_yk(mu * rho);
    const double gp = b.y1 / (8.0 * mu) + b.k1 / (4.0 * kPi * mu);
    return (gp / rho) * r;
}

namespace {

Eigen::Vector2d first_row(double mu, const BesselYK& b, const Vec2& r, double rho, const Vec2& n) {
    const double mu2 = mu * mu, mu3 = mu2 * mu;
    const double z = mu * rho;
    const double rn = r.dot(n);
    const double rn3 = rn * rn * rn;
    const double p2 = rho * rho, p3 = p2 * rho, p4 = p2 * p2, p5 = p4 * rho;

    const double g11 =
        -1.0 / (4.0 * kPi * mu2) *
            (3.0 * mu3 * b.k1 * rn / rho - 2.0 * mu3 * b.k1 * rn3 / p3 + 6.0 * mu2 * b.k0 * rn / p2 -
             8.0 * mu2 * b.k0 * rn3 / p4 - 16.0 * mu * b.k1 * rn3 / p5 + 12.0 * mu * b.k1 * rn / p3) -
        1.0 / (8.0 * mu2) *
            (-3.0 * mu3 * b.y1 * rn / rho + 2.0 * mu3 * b.y1 * rn3 / p3 - 6.0 * mu2 * b.y0 * rn / p2 +
             8.0 * mu2 * b.y0 * rn3 / p4 - 16.0 * mu * b.y1 * rn3 / p5 + 12.0 * mu * b.y1 * rn / p3);
    const double ang = 1.0 - 2.0 * rn * rn / p2;
    const double g12 = -1.0 / (4.0 * kPi) * ang * (b.k0 + 2.0 / z * b.k1) + 0.125 * ang * (b.y0 - 2.0 / z * b.y1);
    return {g11, g12};
}

}  // namespace

Eigen::Vector2d layer_kernels(Wavenumber k, const Vec2& target, const KernelPoint& source) {
    const Vec2 r = target - source.x;
    const double rho = checked_distance(r);
    return first_row(k.mu, bessel_yk(k.mu * rho), r, rho, source.normal);
}

Eigen::Matrix2d kernel_matrix(Wavenumber k, const KernelPoint& target, const KernelPoint& source) {
    const Vec2 r = target.x - source.x;
    const double rho = checked_distance(r);
    const double mu = k.mu, mu2 = mu * mu, mu3 = mu2 * mu, mu4 = mu2 * mu2;
    const BesselYK b = bessel_yk(mu * rho);
    const Eigen::Vector2d top = first_row(mu, b, r, rho, source.normal);
    const double K0 = b.k0, K1 = b.k1, Y0 = b.y0, Y1 = b.y1;
    const double rn = r.dot(source.normal);
    const double rnx = r.dot(target.normal);
    const double nn = target.normal.dot(source.normal);
    const double rn2 = rn * rn, rn3 = rn2 * rn;
    const double p2 = rho * rho, p3 = p2 * rho, p4 = p2 * p2, p5 = p4 * rho, p6 = p3 * p3, p7 = p6 * rho;

    const double g21 =
        -1.0 / (4.0 * kPi * mu2) *
            (-3.0 * mu4 * K0 * rn * rnx / p2 - 12.0 * mu3 * K1 * rn * rnx / p3 + 3.0 * mu3 * K1 * nn / rho +
             2.0 * mu4 * K0 * rn3 * rnx / p4 + 16.0 * mu3 * K1 * rn3 * rnx / p5 - 6.0 * mu3 * K1 * rn2 * nn / p3 +
             6.0 * mu2 * K0 * nn / p2 - 24.0 * mu2 * K0 * rn * rnx / p4 - 24.0 * mu2 * K0 * rn2 * nn / p4 +
             48.0 * mu2 * K0 * rn3 * rnx / p6 + 96.0 * mu * K1 * rn3 * rnx / p7 - 48.0 * mu * K1 * rn2 * nn / p5 -
             48.0 * mu * K1 * rn * rnx / p5 + 12.0 * mu * K1 * nn / p3) -
        1.0 / (8.0 * mu2) *
            (-3.0 * mu4 * Y0 * rn * rnx / p2 + 12.0 * mu3 * Y1 * rn * rnx / p3 - 3.0 * mu3 * Y1 * nn / rho +
             2.0 * mu4 * Y0 * rn3 * rnx / p4 - 16.0 * mu3 * Y1 * rn3 * rnx / p5 + 6.0 * mu3 * Y1 * rn2 * nn / p3 -
             6.0 * mu2 * Y0 * nn / p2 + 24.0 * mu2 * Y0 * rn * rnx / p4 + 24.0 * mu2 * Y0 * rn2 * nn / p4 -
             48.0 * mu2 * Y0 * rn3 * rnx / p6 + 96.0 * mu * Y1 * rn3 * rnx / p7 - 48.0 * mu * Y1 * rn2 * nn / p5 -
             48.0 * mu * Y1 * rn * rnx / p5 + 12.0 * mu * Y1 * nn / p3);
    const double g22 =
        -1.0 / (4.0 * kPi) *
            (8.0 * K0 * rn2 * rnx / p4 + 16.0 / mu * K1 * rn2 * rnx / p5 - 4.0 * K0 * rn * nn / p2 -
             8.0 / mu * K1 * rn * nn / p3 - mu * K1 * rnx / rho - 4.0 / mu * K1 * rnx / p3 - 2.0 * K0 * rnx / p2 +
             2.0 * mu * K1 * rn2 * rnx / p3) +
        0.125 * (8.0 * Y0 * rn2 * rnx / p4 - 16.0 / mu * Y1 * rn2 * rnx / p5 - 4.0 * Y0 * rn * nn / p2 +
                 8.0 / mu * Y1 * rn * nn / p3 - mu * Y1 * rnx / rho + 4.0 / mu * Y1 * rnx / p3 -
                 2.0 * Y0 * rnx / p2 + 2.0 * mu * Y1 * rn2 * rnx / p3);
    Eigen::Matrix2d m;
    m << top(0), top(1), g21, g22;
    return m;
}

Eigen::Matrix2d kernel_diagonal(double kappa) {
    if (!std::isfinite(kappa)) throw DomainError("kernel_diagonal: curvature must be finite");
    Eigen::Matrix2d m;
    m << 0.0, 1.0 / (4.0 * kPi), -3.0 * kappa * kappa / (4.0 * kPi), kappa / (2.0 * kPi);
    return m;
}

}  // namespace platemodes
