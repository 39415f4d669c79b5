#pragma once

#include <Eigen/Core>

#include "platemodes/geometry.hpp"

namespace platemodes {

struct Wavenumber {
    double mu = 1.0;
    double lambda = 1.0;  // mu^4

    static Wavenumber from_mu(double mu);
    static Wavenumber from_lambda(double lambda);
};

struct KernelPoint {
    Vec2 x;
    Vec2 normal;
    Vec2 tangent;
    double kappa = 0.0;
};

// Fundamental solution of (Delta^2 - mu^4) G = delta:
// G = -Y0(mu rho)/(8 mu^2) - K0(mu rho)/(4 pi mu^2).
double greens(Wavenumber k, const Vec2& x, const Vec2& y);
// Gradient with respect to x.
Vec2 greens_gradient(Wavenumber k, const Vec2& x, const Vec2& y);

// [[G11, G12], [G21, G22]] with derivatives taken along the source normal
// and tangent; G21, G22 are the target-normal derivatives of G11, G12.
Eigen::Matrix2d kernel_matrix(Wavenumber k, const KernelPoint& target, const KernelPoint& source);
// (G11, G12) only; the target normal is not needed.
Eigen::Vector2d layer_kernels(Wavenumber k, const Vec2& target, const KernelPoint& source);

// Coincident-point limits. The G12 limit is 1/(4 pi) for every curvature
// (the closed-form G12 tends to that value on circles of any radius).
Eigen::Matrix2d kernel_diagonal(double kappa);

}  // namespace platemodes
