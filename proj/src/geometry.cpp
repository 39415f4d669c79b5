#include "platemodes/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "platemodes/errors.hpp"

namespace platemodes {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPolygonNodes = 2048;

CurveSample polar_sample(double theta, double a, double b, double r, double r1, double r2) {
    const double c = std::cos(theta), s = std::sin(theta);
    CurveSample out;
    out.x = Vec2(a * r * c, b * r * s);
    out.d1 = Vec2(a * (r1 * c - r * s), b * (r1 * s + r * c));
    out.d2 = Vec2(a * (r2 * c - 2.0 * r1 * s - r * c), b * (r2 * s + 2.0 * r1 * c - r * s));
    return out;
}

// r(theta) = (cos^p + sin^p)^(-1/p) and its first two derivatives.
CurveSample rounded_rectangle_sample(double theta, double a, double b, int p) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double cp2 = std::pow(c, p - 2), sp2 = std::pow(s, p - 2);
    const double F = cp2 * c * c + sp2 * s * s;
    const double F1 = p * (-cp2 * c * s + sp2 * s * c);
    const double F2 = p * ((p - 1) * (cp2 * s * s + sp2 * c * c) - F);
    const double e = -1.0 / p;
    const double r = std::pow(F, e);
    const double r1 = e * std::pow(F, e - 1.0) * F1;
    const double r2 = e * ((e - 1.0) * std::pow(F, e - 2.0) * F1 * F1 + std::pow(F, e - 1.0) * F2);
    return polar_sample(theta, a, b, r, r1, r2);
}

CurveSample star_sample(double theta) {
    const double r = 1.0 + 0.25 * std::sin(theta) + 0.15 * std::cos(3.0 * theta);
    const double r1 = 0.25 * std::cos(theta) - 0.45 * std::sin(3.0 * theta);
    const double r2 = -0.25 * std::sin(theta) - 1.35 * std::cos(3.0 * theta);
    return polar_sample(theta, 1.0, 1.0, r, r1, r2);
}

ParametricComponent simple_component(const ShapeSpec& s, bool hole) {
    using K = ShapeSpec::Kind;
    switch (s.kind) {
        case K::Circle: {
            const double R = s.radius;
            const Vec2 c = s.center;
            return ParametricComponent(
                [R, c](double t) {
                    CurveSample o = polar_sample(t, R, R, 1.0, 0.0, 0.0);
                    o.x += c;
                    return o;
                },
                hole);
        }
        case K::Ellipse: {
            const double a = s.a, b = s.b;
            const Vec2 c = s.center;
            return ParametricComponent(
                [a, b, c](double t) {
                    CurveSample o = polar_sample(t, a, b, 1.0, 0.0, 0.0);
                    o.x += c;
                    return o;
                },
                hole);
        }
        case K::RoundedRectangle: {
            const double a = s.a, b = s.b;
            const int p = s.p;
            const Vec2 c = s.center;
            return ParametricComponent(
                [a, b, p, c](double t) {
                    CurveSample o = rounded_rectangle_sample(t, a, b, p);
                    o.x += c;
                    return o;
                },
                hole);
        }
        case K::Star: {
            const Vec2 c = s.center;
            return ParametricComponent(
                [c](double t) {
                    CurveSample o = star_sample(t);
                    o.x += c;
                    return o;
                },
                hole);
        }
        case K::Composite: break;
    }
    throw InvalidSpec("composite shapes cannot be nested");
}

void validate(const ShapeSpec& s) {
    using K = ShapeSpec::Kind;
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidSpec(std::string(what) + " must be positive");
    };
    if (!s.center.allFinite()) throw InvalidSpec("center must be finite");
    switch (s.kind) {
        case K::Circle: positive(s.radius, "radius"); break;
        case K::Ellipse: positive(s.a, "a"); positive(s.b, "b"); break;
        case K::RoundedRectangle:
            positive(s.a, "a");
            positive(s.b, "b");
            if (s.p < 2 || s.p % 2 != 0) throw InvalidSpec("rounded-rectangle exponent p must be even and >= 2");
            break;
        case K::Star: break;
        case K::Composite:
            if (s.parts.empty()) throw InvalidSpec("composite needs an outer boundary");
            for (const auto& part : s.parts) {
                if (part.kind == K::Composite) throw InvalidSpec("composite shapes cannot be nested");
                validate(part);
            }
            break;
    }
}

double polygon_winding(const std::vector<Vec2>& v, const Vec2& x) {
    double total = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[i] - x, b = v[(i + 1) % n] - x;
        total += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    }
    return total / kTwoPi;
}

}  // namespace

ParametricComponent::ParametricComponent(Map map, bool hole) : map_(std::move(map)), hole_(hole) {}

CurveSample ParametricComponent::eval(double theta) const {
    if (!hole_) return map_(theta);
    CurveSample s = map_(-theta);
    s.d1 = -s.d1;
    return s;
}

ShapeSpec ShapeSpec::circle(double R, Vec2 center) {
    ShapeSpec s;
    s.kind = Kind::Circle;
    s.radius = R;
    s.center = center;
    return s;
}

ShapeSpec ShapeSpec::ellipse(double a, double b, Vec2 center) {
    ShapeSpec s;
    s.kind = Kind::Ellipse;
    s.a = a;
    s.b = b;
    s.center = center;
    return s;
}

ShapeSpec ShapeSpec::rounded_rectangle(double a, double b, int p) {
    ShapeSpec s;
    s.kind = Kind::RoundedRectangle;
    s.a = a;
    s.b = b;
    s.p = p;
    return s;
}

ShapeSpec ShapeSpec::star() {
    ShapeSpec s;
    s.kind = Kind::Star;
    return s;
}

ShapeSpec ShapeSpec::composite(ShapeSpec outer, std::vector<ShapeSpec> holes) {
    ShapeSpec s;
    s.kind = Kind::Composite;
    s.parts.push_back(std::move(outer));
    for (auto& h : holes) s.parts.push_back(std::move(h));
    return s;
}

ShapeSpec ShapeSpec::annulus() {
    return composite(circle(1.0), {circle(0.2, Vec2(-0.3, 0.0))});
}

std::string ShapeSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Circle: os << "circle(R=" << radius << ")"; break;
        case Kind::Ellipse: os << "ellipse(a=" << a << ",b=" << b << ")"; break;
        case Kind::RoundedRectangle: os << "rounded-rectangle(a=" << a << ",b=" << b << ",p=" << p << ")"; break;
        case Kind::Star: os << "star"; break;
        case Kind::Composite:
            os << "composite(" << parts[0].describe();
            for (std::size_t i = 1; i < parts.size(); ++i) os << " - " << parts[i].describe();
            os << ")";
            break;
    }
    if (kind != Kind::Composite && (center.x() != 0.0 || center.y() != 0.0))
        os << "@(" << center.x() << "," << center.y() << ")";
    return os.str();
}

BoundaryCurve::BoundaryCurve(std::vector<ParametricComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw InvalidSpec("boundary needs at least one component");
    for (const auto& c : components_) {
        Polygon poly;
        for (int i = 0; i < kPolygonNodes; ++i) {
            const double t = kTwoPi * i / kPolygonNodes;
            poly.theta.push_back(t);
            poly.v.push_back(c.eval(t).x);
        }
        polygons_.push_back(std::move(poly));
    }
    bbox_ << 1e300, 1e300, -1e300, -1e300;
    for (const Vec2& v : polygons_[0].v) {
        bbox_[0] = std::min(bbox_[0], v.x());
        bbox_[1] = std::min(bbox_[1], v.y());
        bbox_[2] = std::max(bbox_[2], v.x());
        bbox_[3] = std::max(bbox_[3], v.y());
    }
    // the sampled polygon can cut the extreme points by O(h^2); refine the box
    for (std::size_t i = 0; i < polygons_[0].v.size(); ++i) {
        const double t = polygons_[0].theta[i];
        for (int k = -4; k <= 4; ++k) {
            const Vec2 v = components_[0].eval(t + k * kTwoPi / (8.0 * kPolygonNodes)).x;
            bbox_[0] = std::min(bbox_[0], v.x());
            bbox_[1] = std::min(bbox_[1], v.y());
            bbox_[2] = std::max(bbox_[2], v.x());
            bbox_[3] = std::max(bbox_[3], v.y());
        }
    }
}

double BoundaryCurve::scale() const { return std::max(bbox_[2] - bbox_[0], bbox_[3] - bbox_[1]); }

Eigen::Vector4d BoundaryCurve::bounding_box() const { return bbox_; }

double BoundaryCurve::perimeter(std::size_t component) const {
    const auto& c = components_.at(component);
    const int n = 4096;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += c.eval(kTwoPi * i / n).d1.norm();
    return sum * kTwoPi / n;
}

double BoundaryCurve::signed_distance(const Vec2& x) const {
    double best = 1e300;
    std::size_t best_c = 0, best_i = 0;
    for (std::size_t c = 0; c < polygons_.size(); ++c) {
        const auto& v = polygons_[c].v;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = (v[i] - x).squaredNorm();
            if (d < best) {
                best = d;
                best_c = c;
                best_i = i;
            }
        }
    }
    // Newton on (c(t) - x) . c'(t) = 0 from the nearest polygon vertex
    const auto& comp = components_[best_c];
    const double h = kTwoPi / kPolygonNodes;
    const double t0 = polygons_[best_c].theta[best_i];
    double t = t0;
    for (int it = 0; it < 30; ++it) {
        const CurveSample s = comp.eval(t);
        const Vec2 r = s.x - x;
        const double f = r.dot(s.d1);
        const double fp = s.d1.squaredNorm() + r.dot(s.d2);
        double step = fp > 0.0 ? -f / fp : -f / s.d1.squaredNorm();
        step = std::clamp(step, -h, h);
        t = std::clamp(t + step, t0 - 1.5 * h, t0 + 1.5 * h);
        if (std::abs(step) < 1e-15) break;
    }
    const CurveSample s = comp.eval(t);
    const Vec2 n(s.d1.y(), -s.d1.x());
    const Vec2 r = x - s.x;
    const double dist = r.norm();
    return r.dot(n) > 0.0 ? dist : -dist;
}

Location BoundaryCurve::locate(const Vec2& x) const {
    if (!x.allFinite()) throw DomainError("locate: non-finite point");
    const double sd = signed_distance(x);
    const double tiny = 1e-12 * scale();
    if (std::abs(sd) <= tiny) return Location::OnBoundary;
    // the projection is reliable near the curve; elsewhere use winding numbers
    if (std::abs(sd) < 0.02 * scale()) return sd < 0.0 ? Location::Inside : Location::Outside;
    if (std::abs(polygon_winding(polygons_[0].v, x)) < 0.5) return Location::Outside;
    for (std::size_t c = 1; c < polygons_.size(); ++c)
        if (std::abs(polygon_winding(polygons_[c].v, x)) > 0.5) return Location::Outside;
    return Location::Inside;
}

bool contains(const BoundaryCurve& curve, const Vec2& x) {
    const Location loc = curve.locate(x);
    if (loc == Location::OnBoundary) throw BoundaryProximity("point lies on the boundary");
    return loc == Location::Inside;
}

BoundaryCurve make_shape(const ShapeSpec& spec) {
    validate(spec);
    if (spec.kind != ShapeSpec::Kind::Composite) return BoundaryCurve({simple_component(spec, false)});
    std::vector<ParametricComponent> comps;
    comps.push_back(simple_component(spec.parts[0], false));
    const BoundaryCurve outer({comps[0]});
    for (std::size_t h = 1; h < spec.parts.size(); ++h) {
        const ParametricComponent hole = simple_component(spec.parts[h], true);
        const BoundaryCurve alone({hole});
        const BoundaryCurve sofar(comps);
        for (int i = 0; i < 256; ++i) {
            const Vec2 p = hole.eval(kTwoPi * i / 256).x;
            if (outer.locate(p) != Location::Inside)
                throw InvalidSpec("hole " + std::to_string(h) + " is not strictly inside the outer boundary");
            if (sofar.locate(p) != Location::Inside)
                throw InvalidSpec("hole " + std::to_string(h) + " overlaps another hole");
        }
        for (std::size_t k = 1; k < comps.size(); ++k)
            if (alone.locate(comps[k].eval(0.0).x) != Location::Outside)
                throw InvalidSpec("hole " + std::to_string(h) + " encloses another hole");
        comps.push_back(hole);
    }
    return BoundaryCurve(std::move(comps));
}

int Discretization::component_of(int node) const {
    for (std::size_t c = offset.size(); c-- > 0;)
        if (node >= offset[c]) return int(c);
    return 0;
}

std::vector<int> default_node_counts(const BoundaryCurve& curve, int N) {
    std::vector<int> counts{N};
    const double outer = curve.perimeter(0);
    for (std::size_t c = 1; c < curve.size(); ++c) {
        int n = int(std::lround(N * curve.perimeter(c) / outer));
        n = std::max({n, 16, N / 4});
        n += n % 2;
        counts.push_back(n);
    }
    return counts;
}

Discretization discretize(const BoundaryCurve& curve, int N) {
    return discretize(curve, default_node_counts(curve, N));
}

Discretization discretize(const BoundaryCurve& curve, const std::vector<int>& nodes) {
    if (nodes.size() != curve.size()) throw InvalidSpec("discretize: one node count per component required");
    int total = 0;
    for (int n : nodes) {
        if (n < 16 || n % 2 != 0) throw InvalidSpec("discretize: node counts must be even and >= 16");
        total += n;
    }
    Discretization d;
    d.curve = std::make_shared<const BoundaryCurve>(curve);
    d.x.resize(2, total);
    d.normal.resize(2, total);
    d.tangent.resize(2, total);
    d.kappa.resize(total);
    d.weight.resize(total);
    d.speed.resize(total);
    int k = 0;
    for (std::size_t c = 0; c < curve.size(); ++c) {
        d.offset.push_back(k);
        d.count.push_back(nodes[c]);
        for (int i = 0; i < nodes[c]; ++i, ++k) {
            const CurveSample s = curve.components()[c].eval(kTwoPi * i / nodes[c]);
            const double sp = s.d1.norm();
            d.x.col(k) = s.x;
            d.tangent.col(k) = s.d1 / sp;
            d.normal.col(k) = Vec2(s.d1.y(), -s.d1.x()) / sp;
            d.kappa(k) = (s.d1.x() * s.d2.y() - s.d1.y() * s.d2.x()) / (sp * sp * sp);
            d.speed(k) = sp;
            d.weight(k) = kTwoPi / nodes[c] * sp;
        }
    }
    return d;
}

}  // namespace platemodes
