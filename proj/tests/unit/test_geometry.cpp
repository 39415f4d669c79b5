#include <cmath>
#include <numbers>

#include "doctest.h"
#include "platemodes/errors.hpp"
#include "platemodes/geometry.hpp"

#include "oracles/disk_reference.inc"

using namespace platemodes;

namespace {
constexpr double kPi = std::numbers::pi;

// winding number of a polygon, used as an independent oracle
double winding(const BoundaryCurve& c, std::size_t comp, int n, const Vec2& x) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2 a = c.components()[comp].eval(2 * kPi * i / n).x - x;
        const Vec2 b = c.components()[comp].eval(2 * kPi * (i + 1) / n).x - x;
        total += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    }
    return total / (2 * kPi);
}
}  // namespace

TEST_CASE("unit circle discretization") {
    const auto d = discretize(make_shape(ShapeSpec::circle(1.0)), 128);
    CHECK(d.total() == 128);
    for (int i = 0; i < d.total(); ++i) {
        CHECK(d.kappa(i) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(d.weight(i) == doctest::Approx(2 * kPi / 128).epsilon(1e-14));
        CHECK((d.normal.col(i) - d.x.col(i)).norm() < 1e-14);
        CHECK(std::abs(d.normal.col(i).dot(d.tangent.col(i))) < 1e-15);
    }
    CHECK(d.weight.sum() == doctest::Approx(2 * kPi).epsilon(1e-14));
}

TEST_CASE("circle of radius R has curvature 1/R") {
    const auto d = discretize(make_shape(ShapeSpec::circle(0.5, Vec2(0.1, -0.2))), 32);
    for (int i = 0; i < d.total(); ++i) CHECK(d.kappa(i) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("ellipse perimeter is spectrally accurate") {
    const auto curve = make_shape(ShapeSpec::ellipse(1.5, 2.0 / 3.0));
    for (int N : {64, 128}) {
        const auto d = discretize(curve, N);
        CHECK(std::abs(d.weight.sum() - kEllipsePerimeter) < 1e-10 * kEllipsePerimeter);
    }
    // cross-check the frozen value with the standard library elliptic integral
    const double e2 = 1.0 - std::pow((2.0 / 3.0) / 1.5, 2);
    CHECK(4 * 1.5 * std::comp_ellint_2(std::sqrt(e2)) == doctest::Approx(kEllipsePerimeter).epsilon(1e-13));
}

TEST_CASE("rounded rectangle curvature peaks at the corners") {
    const auto d = discretize(make_shape(ShapeSpec::rounded_rectangle(std::sqrt(2.0), 1 / std::sqrt(2.0), 16)), 512);
    int imax = 0;
    d.kappa.maxCoeff(&imax);
    CHECK(std::isfinite(d.kappa(imax)));
    const Vec2 p = d.x.col(imax);
    // corner region: both coordinates near their extremes
    CHECK(std::abs(p.x()) > 0.8 * std::sqrt(2.0));
    CHECK(std::abs(p.y()) > 0.8 / std::sqrt(2.0));
    // all four corners carry the same maximum
    int count = 0;
    for (int i = 0; i < d.total(); ++i)
        if (d.kappa(i) > d.kappa(imax) * (1 - 1e-9)) ++count;
    CHECK(count == 4);
}

TEST_CASE("analytic derivatives match finite differences") {
    const ShapeSpec shapes[] = {ShapeSpec::ellipse(1.5, 0.7), ShapeSpec::rounded_rectangle(2.0, 0.5, 16),
                                ShapeSpec::star(), ShapeSpec::annulus()};
    for (const auto& s : shapes) {
        const auto c = make_shape(s);
        for (const auto& comp : c.components()) {
            for (double t : {0.1, 0.9, 2.3, 4.0, 5.9}) {
                for (double h : {1e-3, 5e-4}) {
                    const auto a = comp.eval(t), p = comp.eval(t + h), m = comp.eval(t - h);
                    const double scale = 1.0 + a.d2.norm();
                    CHECK(((p.x - m.x) / (2 * h) - a.d1).norm() < 50 * h * h * scale * scale);
                    CHECK(((p.d1 - m.d1) / (2 * h) - a.d2).norm() < 500 * h * h * scale * scale);
                }
            }
        }
    }
}

TEST_CASE("normals point out of the domain, holes are clockwise") {
    const ShapeSpec shapes[] = {ShapeSpec::circle(1.0), ShapeSpec::ellipse(1.5, 0.6667),
                                ShapeSpec::rounded_rectangle(2.0, 0.5, 16), ShapeSpec::star(),
                                ShapeSpec::annulus()};
    for (const auto& s : shapes) {
        const auto c = make_shape(s);
        const auto d = discretize(c, 64);
        const double eps = 1e-4 * 0.2;
        for (int i = 0; i < d.total(); ++i) {
            const Vec2 x = d.x.col(i), n = d.normal.col(i);
            CHECK_FALSE(contains(c, x + eps * n));
            CHECK(contains(c, x - eps * n));
        }
    }
    const auto d = discretize(make_shape(ShapeSpec::annulus()), 128);
    REQUIRE(d.count.size() == 2);
    CHECK(d.count[1] == 32);
    for (int i = d.offset[1]; i < d.total(); ++i) CHECK(d.kappa(i) == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("contains") {
    CHECK(contains(make_shape(ShapeSpec::circle(1.0)), Vec2(0, 0)));
    CHECK_FALSE(contains(make_shape(ShapeSpec::annulus()), Vec2(-0.3, 0)));
    CHECK(contains(make_shape(ShapeSpec::annulus()), Vec2(0.3, 0)));
    const auto star = make_shape(ShapeSpec::star());
    for (const Vec2& x : {Vec2(1.3, 0), Vec2(1.1, 0), Vec2(0, 1.2), Vec2(-0.5, -0.6), Vec2(0.9, 0.9)}) {
        const bool oracle = std::abs(winding(star, 0, 20480, x)) > 0.5;
        CHECK(contains(star, x) == oracle);
    }
    CHECK_THROWS_AS(contains(make_shape(ShapeSpec::circle(1.0)), Vec2(1.0, 0.0)), BoundaryProximity);
}

TEST_CASE("invalid shapes") {
    CHECK_THROWS_AS(make_shape(ShapeSpec::circle(-1.0)), InvalidSpec);
    CHECK_THROWS_AS(make_shape(ShapeSpec::ellipse(1.0, 0.0)), InvalidSpec);
    CHECK_THROWS_AS(make_shape(ShapeSpec::rounded_rectangle(1.0, 1.0, 3)), InvalidSpec);
    CHECK_THROWS_AS(make_shape(ShapeSpec::rounded_rectangle(1.0, 1.0, 0)), InvalidSpec);
    CHECK_THROWS_AS(make_shape(ShapeSpec::composite(ShapeSpec::circle(1.0), {ShapeSpec::circle(0.5, Vec2(0.7, 0))})),
                    InvalidSpec);
    CHECK_THROWS_AS(discretize(make_shape(ShapeSpec::circle(1.0)), 15), InvalidSpec);
}
