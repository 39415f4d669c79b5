#include <cmath>
#include <numbers>

#include "doctest.h"
#include "platemodes/errors.hpp"
#include "platemodes/specfun.hpp"

#include "oracles/bessel_reference.inc"

using namespace platemodes;

namespace {

constexpr BesselKind kKinds[8] = {BesselKind::J0, BesselKind::J1, BesselKind::Y0, BesselKind::Y1,
                                  BesselKind::I0, BesselKind::I1, BesselKind::K0, BesselKind::K1};

}  // namespace

TEST_CASE("bessel values against the mpmath table") {
    double worst_rel = 0.0, worst_abs = 0.0;
    for (const auto& row : kBesselTable) {
        const double z = row[0];
        for (int k = 0; k < 8; ++k) {
            const double ref = row[k + 1];
            const double got = bessel(kKinds[k], z);
            const double err = std::abs(got - ref);
            // J and Y: relative away from their zeros, absolute near them
            const bool oscillatory = k < 4;
            if (oscillatory && std::abs(ref) < 0.05) {
                worst_abs = std::max(worst_abs, err);
                CHECK_MESSAGE(err <= 1e-12, "kind " << k << " z=" << z);
            } else {
                worst_rel = std::max(worst_rel, err / std::abs(ref));
                CHECK_MESSAGE(err <= 1e-12 * std::abs(ref), "kind " << k << " z=" << z << " rel "
                                                                    << err / std::abs(ref));
            }
        }
    }
    MESSAGE("worst relative " << worst_rel << ", worst absolute " << worst_abs);
}

TEST_CASE("combined evaluators agree with the single-kind entry points") {
    for (double z : {1e-6, 0.3, 1.999, 2.0, 2.001, 7.5, 24.99, 25.0, 41.0}) {
        const auto yk = bessel_yk(z);
        CHECK(yk.y0 == bessel_y0(z));
        CHECK(yk.y1 == bessel_y1(z));
        CHECK(yk.k0 == bessel_k0(z));
        CHECK(yk.k1 == bessel_k1(z));
    }
}

TEST_CASE("Wronskians") {
    for (double z = 0.01; z <= 50.0; z *= 1.07) {
        const auto jy = bessel_jy(z);
        const auto ik = bessel_ik(z);
        const double w1 = jy.j0 * jy.y1 - jy.j1 * jy.y0;
        const double w2 = ik.i0 * ik.k1 + ik.i1 * ik.k0;
        CHECK(std::abs(w1 + 2.0 / (std::numbers::pi * z)) <= 1e-10 * 2.0 / (std::numbers::pi * z));
        CHECK(std::abs(w2 - 1.0 / z) <= 1e-10 / z);
    }
}

TEST_CASE("derivative consistency") {
    for (double z : {0.3, 1.0, 3.7, 12.0, 30.0}) {
        const double h = 1e-4;
        auto d = [&](BesselKind k) { return (bessel(k, z + h) - bessel(k, z - h)) / (2 * h); };
        const double tol = 1e-7;
        CHECK(d(BesselKind::J0) == doctest::Approx(-bessel_j1(z)).epsilon(tol).scale(1.0));
        CHECK(d(BesselKind::Y0) == doctest::Approx(-bessel_y1(z)).epsilon(tol).scale(1.0));
        CHECK(d(BesselKind::K0) == doctest::Approx(-bessel_k1(z)).epsilon(tol));
        CHECK(d(BesselKind::I0) == doctest::Approx(bessel_i1(z)).epsilon(tol));
    }
}

TEST_CASE("small-argument logarithmic behaviour") {
    const double gamma = std::numbers::egamma, pi = std::numbers::pi;
    for (const auto& row : kSmallArgTable) {
        const double z = row[0];
        const double k0 = bessel_k0(z) + std::log(z / 2) + gamma;
        const double y0 = 2 / pi * (bessel_y0(z) - 2 / pi * (std::log(z / 2) + gamma) * bessel_j0(z));
        CHECK(std::abs(k0 - row[1]) <= 1e-12);
        CHECK(std::abs(y0 - row[2]) <= 1e-12);
        CHECK(std::abs(k0) < 1e-6);
        CHECK(std::abs(y0) < 1e-6);
    }
}

TEST_CASE("limits at zero and domain errors") {
    CHECK(bessel_j0(1e-300) == 1.0);
    CHECK(bessel_i0(0.0) == 1.0);
    CHECK(bessel_j1(0.0) == 0.0);
    CHECK_THROWS_AS(bessel_y0(0.0), DomainError);
    CHECK_THROWS_AS(bessel_k1(-1.0), DomainError);
    CHECK_THROWS_AS(bessel_j0(std::nan("")), DomainError);
    CHECK_THROWS_AS(bessel_k0(INFINITY), DomainError);
}

TEST_CASE("integer orders") {
    // recurrence J_{n-1} + J_{n+1} = (2n/z) J_n, I_{n-1} - I_{n+1} = (2n/z) I_n
    for (double z : {0.5, 2.0, 5.5, 11.0}) {
        for (int n = 1; n <= 3; ++n) {
            CHECK(bessel_jn(n - 1, z) + bessel_jn(n + 1, z) ==
                  doctest::Approx(2.0 * n / z * bessel_jn(n, z)).scale(1.0).epsilon(1e-12));
            CHECK(bessel_in(n - 1, z) - bessel_in(n + 1, z) ==
                  doctest::Approx(2.0 * n / z * bessel_in(n, z)).epsilon(1e-12));
        }
    }
}
