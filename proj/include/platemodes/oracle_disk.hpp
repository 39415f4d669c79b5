#pragma once

#include <vector>

#include <Eigen/Core>

#include "platemodes/geometry.hpp"

// Closed-form solutions on the unit disk, used as ground truth.

namespace platemodes {

// Derivative condition at rho = 1 for the radial mode with u(0) = 0, scaled
// by 1/I0(mu). Its positive roots are the center-clamp wavenumbers.
double center_clamp_equation(double mu);
double disk_exact_mu(int n);
// nth center-clamp eigenvalue, n >= 1.
double disk_exact_eigenvalue(int n);
// Radial center-clamp mode with unit J0 coefficient, rho in [0, 1].
double center_clamp_profile(int n, double rho);

// J_m'(mu) I_m(mu) - I_m'(mu) J_m(mu), scaled by 1/I_m(mu).
double unclamped_equation(int m, double mu);
// (n+1)th positive root for angular index m, n >= 0.
double disk_unclamped_mu(int m, int n);
double disk_unclamped_eigenvalue(int m, int n);
// Unclamped mode with angular factor cos(m theta), unit J_m coefficient.
double unclamped_profile(int m, int n, double rho, double theta);
// Radial derivative of the same mode.
double unclamped_profile_drho(int m, int n, double rho, double theta);

// u at points[j] for a unit-strength clamp at points[k] on the clamped unit
// disk, from the Fourier-Bessel expansion of its Green's function (angular
// orders 0..mmax). Independent of the boundary integral solver.
Eigen::MatrixXd disk_response_matrix(double lambda, const std::vector<Vec2>& points, int mmax = 60);

}  // namespace platemodes
