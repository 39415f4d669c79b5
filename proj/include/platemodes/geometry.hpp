#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace platemodes {

using Vec2 = Eigen::Vector2d;

// Position and first two theta-derivatives of a parametric curve.
struct CurveSample {
    Vec2 x, d1, d2;
};

class ParametricComponent {
public:
    using Map = std::function<CurveSample(double)>;

    // `map` must trace the curve counterclockwise; a hole is traversed
    // clockwise by reflecting the parameter.
    ParametricComponent(Map map, bool hole);

    CurveSample eval(double theta) const;
    bool is_hole() const { return hole_; }

private:
    Map map_;
    bool hole_;
};

struct ShapeSpec {
    enum class Kind { Circle, Ellipse, RoundedRectangle, Star, Composite };

    Kind kind = Kind::Circle;
    double radius = 1.0;
    double a = 1.0, b = 1.0;
    int p = 16;
    Vec2 center = Vec2::Zero();
    // Composite only: parts[0] is the outer boundary, the rest are holes.
    std::vector<ShapeSpec> parts;

    static ShapeSpec circle(double R, Vec2 center = Vec2::Zero());
    static ShapeSpec ellipse(double a, double b, Vec2 center = Vec2::Zero());
    static ShapeSpec rounded_rectangle(double a, double b, int p = 16);
    static ShapeSpec star();
    static ShapeSpec composite(ShapeSpec outer, std::vector<ShapeSpec> holes);
    // Unit disk with a hole of radius 0.2 centred at (-0.3, 0).
    static ShapeSpec annulus();

    std::string describe() const;
};

enum class Location { Inside, Outside, OnBoundary };

class BoundaryCurve {
public:
    explicit BoundaryCurve(std::vector<ParametricComponent> components);

    const std::vector<ParametricComponent>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }

    Location locate(const Vec2& x) const;
    // Signed distance to the nearest component, negative inside the domain.
    // Exact only near the boundary; far away it is the polygon distance.
    double signed_distance(const Vec2& x) const;
    double perimeter(std::size_t component) const;
    // Bounding box of the outer component: (xmin, ymin, xmax, ymax).
    Eigen::Vector4d bounding_box() const;
    double scale() const;

private:
    struct Polygon {
        std::vector<Vec2> v;
        std::vector<double> theta;
    };
    std::vector<ParametricComponent> components_;
    std::vector<Polygon> polygons_;
    Eigen::Vector4d bbox_;
};

BoundaryCurve make_shape(const ShapeSpec& spec);

// Throws BoundaryProximity when x is within 1e-12 (relative to the domain
// scale) of the boundary.
bool contains(const BoundaryCurve& curve, const Vec2& x);

struct Discretization {
    std::shared_ptr<const BoundaryCurve> curve;
    std::vector<int> offset;  // first node of each component
    std::vector<int> count;   // nodes per component
    Eigen::Matrix2Xd x, normal, tangent;
    Eigen::VectorXd kappa, weight, speed;

    int total() const { return int(kappa.size()); }
    int component_of(int node) const;
    // Distance between neighbouring nodes around node i.
    double spacing(int node) const { return weight(node); }
};

Discretization discretize(const BoundaryCurve& curve, int N);
Discretization discretize(const BoundaryCurve& curve, const std::vector<int>& nodes_per_component);
// Node counts used by discretize(curve, N): N on the outer component, holes
// proportional to their perimeter but never below max(16, N/4).
std::vector<int> default_node_counts(const BoundaryCurve& curve, int N);

}  // namespace platemodes
