#pragma once

#include <vector>

#include "platemodes/bie.hpp"

namespace platemodes {

struct UnclampedMode {
    double mu = 0.0, lambda = 0.0;
    double sigma_min = 0.0;   // smallest singular value at the refined mu
    double background = 0.0;  // largest nearby grid value
    int multiplicity = 1;
    // Null density produces (almost) no interior field: a resonance of the
    // representation rather than a plate eigenvalue.
    bool spurious = false;
    double field_ratio = 0.0;  // interior field size per unit density
};

struct SpectrumScan {
    std::vector<double> mu, sigma_min;
    std::vector<UnclampedMode> minima;  // genuine and spurious, by mu

    std::vector<UnclampedMode> genuine() const;
};

double smallest_singular_value(const Discretization& disc, double mu);

// Smallest singular value of the Nystrom matrix on a mu grid; local minima
// refined by golden section to 1e-8 and kept when they drop 1e3 below the
// surrounding grid values.
SpectrumScan scan_unclamped(const Discretization& disc, double mu_lo, double mu_hi, double grid_step = 0.02);

// Refine one minimum bracketed by [mu_lo, mu_hi] and classify it.
UnclampedMode refine_unclamped(const Discretization& disc, double mu_lo, double mu_hi);

// Null densities (right singular vectors) at a refined mu, one per
// multiplicity. Throws NotAnEigenvalue when sigma_min > 1e-6 |A|.
std::vector<DensityPair> null_densities(const Discretization& disc, double mu);

// Mode field of null density `which` at interior targets; sign fixed so the
// largest |u| among the targets is positive.
std::vector<double> unclamped_mode_field(const Discretization& disc, double mu, const std::vector<Vec2>& targets,
                                         int which = 0);

// Interior sample points at least five node spacings from the boundary.
std::vector<Vec2> interior_probes(const Discretization& disc, int per_axis = 16);

}  // namespace platemodes
