#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "platemodes/errors.hpp"
#include "platemodes/oracle_disk.hpp"
#include "platemodes/unclamped.hpp"

using namespace platemodes;

namespace {
const Discretization& disk(int N) {
    static std::map<int, Discretization> cache;
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, discretize(make_shape(ShapeSpec::circle(1.0)), N)).first;
    return it->second;
}

// Best least-squares scale c minimizing |u - c v|, relative misfit.
double shape_misfit(const std::vector<double>& u, const std::vector<double>& v) {
    double uv = 0, vv = 0, uu = 0;
    for (size_t i = 0; i < u.size(); ++i) uv += u[i] * v[i], vv += v[i] * v[i], uu += u[i] * u[i];
    const double c = uv / vv;
    double err = 0, peak = 0;
    for (size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - c * v[i])), peak = std::max(peak, std::abs(u[i]));
    return err / peak;
}
}  // namespace

TEST_CASE("scan finds the fundamental disk mode") {
    const SpectrumScan s = scan_unclamped(disk(128), 3.0, 3.4);
    const auto g = s.genuine();
    REQUIRE(g.size() == 1);
    CHECK(g[0].lambda == doctest::Approx(104.4).epsilon(5e-4));
    CHECK(g[0].mu == doctest::Approx(disk_unclamped_mu(0, 0)).epsilon(1e-5));
    CHECK(g[0].multiplicity == 1);
    CHECK_FALSE(g[0].spurious);
    // deterministic
    const SpectrumScan again = scan_unclamped(disk(128), 3.0, 3.4);
    CHECK(again.minima[0].mu == s.minima[0].mu);
}

TEST_CASE("representation resonance is flagged, not reported") {
    const SpectrumScan s = scan_unclamped(disk(128), 2.5, 2.8);
    REQUIRE(s.minima.size() == 1);
    CHECK(s.minima[0].spurious);
    CHECK(s.minima[0].field_ratio < 3e-4);
    CHECK(s.genuine().empty());
}

TEST_CASE("degenerate pair has multiplicity two") {
    const UnclampedMode m = refine_unclamped(disk(128), 4.55, 4.65);
    CHECK(m.lambda == doctest::Approx(452.0).epsilon(5e-4));
    CHECK(m.multiplicity == 2);
    CHECK(null_densities(disk(128), m.mu).size() == 2);
}

TEST_CASE("null densities only at eigenvalues") {
    CHECK_THROWS_AS(null_densities(disk(128), 3.5), NotAnEigenvalue);
}

TEST_CASE("mode fields match the analytic modes") {
    const std::vector<Vec2> probes = interior_probes(disk(128), 16);
    REQUIRE(probes.size() > 100);
    auto analytic = [&](int m, int n) {
        std::vector<double> v;
        for (const Vec2& x : probes) v.push_back(unclamped_profile(m, n, x.norm(), std::atan2(x.y(), x.x())));
        return v;
    };

    const UnclampedMode m00 = refine_unclamped(disk(128), 3.15, 3.25);
    const std::vector<double> u00 = unclamped_mode_field(disk(128), m00.mu, probes);
    CHECK(std::all_of(u00.begin(), u00.end(), [](double u) { return u > 0; }));
    CHECK(shape_misfit(u00, analytic(0, 0)) <= 1e-3);

    const UnclampedMode m01 = refine_unclamped(disk(128), 6.25, 6.35);
    CHECK(m01.lambda == doctest::Approx(1581.7).epsilon(5e-4));
    CHECK(shape_misfit(unclamped_mode_field(disk(128), m01.mu, probes), analytic(0, 1)) <= 1e-3);
    // nodal circle of the (0,1) mode
    std::vector<Vec2> radial;
    for (int i = 0; i <= 200; ++i) radial.push_back(Vec2(0.3 + 0.15 * i / 200.0, 0.0));
    const std::vector<double> ur = unclamped_mode_field(disk(128), m01.mu, radial);
    int crossings = 0;
    double r0 = 0;
    for (size_t i = 0; i + 1 < ur.size(); ++i)
        if (ur[i] * ur[i + 1] < 0) {
            ++crossings;
            r0 = radial[i].x() - ur[i] * (radial[i + 1].x() - radial[i].x()) / (ur[i + 1] - ur[i]);
        }
    CHECK(crossings == 1);
    CHECK(r0 == doctest::Approx(0.379).epsilon(2e-3));
}

TEST_CASE("refinement is stable under doubling N") {
    const double coarse = refine_unclamped(disk(128), 3.15, 3.25).lambda;
    const double fine = refine_unclamped(disk(256), 3.15, 3.25).lambda;
    CHECK(std::abs(coarse - fine) <= 1e-4 * fine);
}

TEST_CASE("star and annulus fundamentals") {
    const auto star = scan_unclamped(discretize(make_shape(ShapeSpec::star()), 128), 3.2, 3.4).genuine();
    REQUIRE(star.size() == 1);
    CHECK(star[0].lambda == doctest::Approx(118.3).epsilon(1e-2));
    const auto ann = scan_unclamped(discretize(make_shape(ShapeSpec::annulus()), 128), 4.5, 4.7).genuine();
    REQUIRE(ann.size() == 1);
    CHECK(ann[0].lambda == doctest::Approx(454.1).epsilon(1e-2));
}
