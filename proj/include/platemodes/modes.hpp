#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "platemodes/bie.hpp"

namespace platemodes {

// Fixed plate and clamp locations; strengths and lambda are the unknowns.
struct ModeProblem {
    Discretization disc;
    std::vector<Vec2> points;

    ModeProblem(Discretization d, std::vector<Vec2> p);
    std::size_t size() const { return points.size(); }
};

// u at every clamp for unit strength at each clamp in turn (column k), from
// one factorization at lambda. Column densities are kept for reuse.
struct Response {
    Wavenumber k;
    Eigen::MatrixXd a;
    std::vector<DensityPair> unit;
    double rcond = 0.0;

    DensityPair combine(const std::vector<double>& alpha) const;
};
Response response(const ModeProblem& problem, double lambda);

// (u(x_1), ..., u(x_M), sum alpha^2 - 1) from a fresh solve at lambda.
Eigen::VectorXd mismatch(const ModeProblem& problem, const std::vector<double>& alpha, double lambda);

struct ModeSolution {
    double lambda = 0.0;
    std::vector<double> alpha;
    DensityPair density;
    ClampSet clamps;
    double residual_norm = 0.0;
    int iterations = 0;
    // Clamps whose strength vanished at convergence (clamp on a nodal line).
    std::vector<int> collapsed;
    // Set when the mode is an unclamped mode vanishing at every clamp.
    bool unclamped = false;

    Wavenumber wavenumber() const { return Wavenumber::from_lambda(lambda); }
};

struct NewtonOptions {
    double tolerance = 1e-10;  // on |F|_inf / lambda
    int max_iterations = 50;
    int max_halvings = 8;
    double fd_step = 1e-6;
};

ModeSolution newton_solve(const ModeProblem& problem, std::vector<double> alpha0, double lambda0,
                          const NewtonOptions& opts = {});

// Equal strengths M^{-1/2}; bisects the first clamp value in mu. A sign
// change through a pole (the residual does not collapse, or the system turns
// singular) is a BracketError.
ModeSolution bisection_solve(const ModeProblem& problem, double mu_lo, double mu_hi, double rel_tol = 1e-10);

// Equal strengths; brackets the sign change of the first clamp value
// nearest mu_guess by expanding [mu_guess - d, mu_guess + d] from
// d = rel_width * mu_guess, doubling up to max_expand times, then bisects.
// Sign changes through poles are skipped; BracketError when no root is
// found.
ModeSolution bisection_near(const ModeProblem& problem, double mu_guess, double rel_width = 1e-3, int max_expand = 4);

// Roots of det A(lambda) located by counting negative eigenvalues of the
// symmetrized response matrix while stepping mu upward; A(lambda) is
// increasing between poles, so each drop in the count brackets a root.
std::vector<ModeSolution> response_roots(const ModeProblem& problem, double mu_lo, double mu_hi,
                                         double mu_step = 0.01, std::size_t max_roots = 1);

// Lowest clamped eigenvalue below mu_max: the smallest of the response
// roots and of the unclamped modes that vanish at every clamp.
ModeSolution lowest_mode(const ModeProblem& problem, double mu_max, double mu_step = 0.01);

std::vector<double> mode_field(const ModeProblem& problem, const ModeSolution& mode, const std::vector<Vec2>& targets);

}  // namespace platemodes
