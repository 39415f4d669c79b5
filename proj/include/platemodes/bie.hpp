#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "platemodes/geometry.hpp"
#include "platemodes/kernels.hpp"

namespace platemodes {

struct ClampSet {
    std::vector<Vec2> points;
    std::vector<double> alpha;

    std::size_t size() const { return points.size(); }
    // Same points, unit strength on clamp k and zero elsewhere.
    ClampSet unit(std::size_t k) const;
};

struct DensityPair {
    Eigen::VectorXd sigma1, sigma2;
};

struct BoundaryData {
    Eigen::VectorXd g1, g2;
    std::vector<std::string> warnings;
};

// u_S(x) = 8 pi sum_j alpha_j G(x, x_j)
double singular_part(Wavenumber k, const ClampSet& clamps, const Vec2& x);

// g1 = -u_S, g2 = -n . grad u_S at every node.
BoundaryData boundary_data(Wavenumber k, const ClampSet& clamps, const Discretization& disc);

// Nystrom matrix, unknowns interleaved (sigma1_0, sigma2_0, sigma1_1, ...).
Eigen::MatrixXd assemble(Wavenumber k, const Discretization& disc);

// Reciprocal condition estimate below which a factorization is reported as
// singular.
inline constexpr double kSingularRcond = 1e-13;
// Normwise backward error accepted when the relative residual exceeds 1e-10
// on an ill-conditioned system.
inline constexpr double kBackwardTol = 1e-13;

// Assembled and factored system at one wavenumber, reusable for many
// right-hand sides.
class BieSolver {
public:
    BieSolver(Wavenumber k, const Discretization& disc);

    DensityPair solve(const BoundaryData& data) const;
    double rcond() const { return rcond_; }
    Wavenumber wavenumber() const { return k_; }
    const Discretization& discretization() const { return disc_; }

private:
    Wavenumber k_;
    Discretization disc_;
    Eigen::MatrixXd a_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = 0.0;
    double anorm_ = 0.0;
};

DensityPair solve_density(Wavenumber k, const Discretization& disc, const BoundaryData& data);

// Layer potential u_R at interior targets. Targets closer than five local
// node spacings to the boundary are evaluated on a trigonometrically
// upsampled copy of the geometry and density.
std::vector<double> eval_regular(Wavenumber k, const Discretization& disc, const DensityPair& density,
                                 const std::vector<Vec2>& targets);

// u = u_S + u_R; targets must avoid the clamp points.
std::vector<double> eval_mode(Wavenumber k, const Discretization& disc, const ClampSet& clamps,
                              const DensityPair& density, const std::vector<Vec2>& targets);

// u at the clamp points themselves, using the limit 0 of each clamp's own
// singular term (G(x, x) = 0).
Eigen::VectorXd clamp_values(Wavenumber k, const Discretization& disc, const ClampSet& clamps,
                             const DensityPair& density);

// Interior limits (u_R, d_n u_R) at the boundary point with parameter theta
// on component c, from the Nystrom interpolant (jump terms plus trapezoid
// sums, density trigonometrically interpolated at theta).
Eigen::Vector2d boundary_trace(Wavenumber k, const Discretization& disc, const DensityPair& density, int component,
                               double theta);

// Trigonometric interpolant of equispaced periodic samples, evaluated at
// `factor` times as many equispaced points (factor >= 1).
Eigen::VectorXd trig_upsample(const Eigen::VectorXd& samples, int factor);
// Same interpolant at an arbitrary angle.
double trig_interpolate(const Eigen::VectorXd& samples, double theta);

// Maximum node-count multiplier used for near-boundary evaluation.
inline constexpr int kMaxUpsample = 256;

}  // namespace platemodes
