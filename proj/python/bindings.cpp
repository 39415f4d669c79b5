#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "platemodes/errors.hpp"
#include "platemodes/oracle_disk.hpp"
#include "platemodes/run.hpp"
#include "platemodes/specfun.hpp"
#include "platemodes/unclamped.hpp"

namespace py = pybind11;
using namespace platemodes;

namespace {

// A discretized plate together with its shape, so Python callers never see
// the shared boundary pointer.
struct Plate {
    ShapeSpec shape;
    Discretization disc;

    Plate(const ShapeSpec& s, int N) : shape(s), disc(discretize(make_shape(s), N)) {}
};

NewtonOptions newton_options(double tolerance, int max_iterations) {
    NewtonOptions o;
    o.tolerance = tolerance;
    o.max_iterations = max_iterations;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Clamped plate eigenmodes with clamped interior points";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "PlatemodesError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<RangeError>(m, "RangeError", base);
    py::register_exception<InvalidSpec>(m, "InvalidSpec", base);
    py::register_exception<BracketError>(m, "BracketError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<NotAnEigenvalue>(m, "NotAnEigenvalue", base);
    py::register_exception<NonConvergence>(m, "NonConvergence", base);
    py::register_exception<NearSingularSystem>(m, "NearSingularSystem", base);
    py::register_exception<DegenerateConfiguration>(m, "DegenerateConfiguration", base);
    py::register_exception<BoundaryProximity>(m, "BoundaryProximity", base);

    m.def("bessel_j0", &bessel_j0);
    m.def("bessel_y0", &bessel_y0);
    m.def("bessel_i0", &bessel_i0);
    m.def("bessel_k0", &bessel_k0);
    m.def("bessel_jn", &bessel_jn, py::arg("n"), py::arg("z"));
    m.def("bessel_in", &bessel_in, py::arg("n"), py::arg("z"));

    py::class_<ShapeSpec>(m, "Shape")
        .def_static("circle", [](double R) { return ShapeSpec::circle(R); }, py::arg("R") = 1.0)
        .def_static("ellipse", [](double a, double b) { return ShapeSpec::ellipse(a, b); }, py::arg("a"), py::arg("b"))
        .def_static("rounded_rectangle", &ShapeSpec::rounded_rectangle, py::arg("a"), py::arg("b"), py::arg("p") = 16)
        .def_static("star", &ShapeSpec::star)
        .def_static("annulus", &ShapeSpec::annulus)
        .def("__repr__", &ShapeSpec::describe);

    py::class_<Plate>(m, "Plate")
        .def(py::init<const ShapeSpec&, int>(), py::arg("shape"), py::arg("N") = 128)
        .def_property_readonly("nodes", [](const Plate& p) { return Eigen::MatrixXd(p.disc.x.transpose()); })
        .def_property_readonly("normals", [](const Plate& p) { return Eigen::MatrixXd(p.disc.normal.transpose()); })
        .def("contains", [](const Plate& p, const Vec2& x) { return contains(*p.disc.curve, x); })
        .def("__repr__", [](const Plate& p) { return "Plate(" + p.shape.describe() + ", " + std::to_string(p.disc.total()) + " nodes)"; });

    py::class_<ModeSolution>(m, "Mode")
        .def_readonly("lam", &ModeSolution::lambda)
        .def_readonly("alpha", &ModeSolution::alpha)
        .def_readonly("residual_norm", &ModeSolution::residual_norm)
        .def_readonly("iterations", &ModeSolution::iterations)
        .def_readonly("collapsed", &ModeSolution::collapsed)
        .def_readonly("unclamped", &ModeSolution::unclamped)
        .def_property_readonly("clamps", [](const ModeSolution& s) { return s.clamps.points; })
        .def("__repr__", [](const ModeSolution& s) { return "Mode(lambda=" + format_double(s.lambda) + ")"; });

    m.def(
        "newton_solve",
        [](const Plate& p, const std::vector<Vec2>& clamps, std::vector<double> alpha, double lam, double tol, int maxit) {
            return newton_solve(ModeProblem(p.disc, clamps), std::move(alpha), lam, newton_options(tol, maxit));
        },
        py::arg("plate"), py::arg("clamps"), py::arg("alpha"), py::arg("lam"), py::arg("tolerance") = 1e-10,
        py::arg("max_iterations") = 50);
    m.def(
        "bisection_solve",
        [](const Plate& p, const std::vector<Vec2>& clamps, double mu_lo, double mu_hi) {
            return bisection_solve(ModeProblem(p.disc, clamps), mu_lo, mu_hi);
        },
        py::arg("plate"), py::arg("clamps"), py::arg("mu_lo"), py::arg("mu_hi"));
    m.def(
        "lowest_mode",
        [](const Plate& p, const std::vector<Vec2>& clamps, double mu_max, double mu_step) {
            return lowest_mode(ModeProblem(p.disc, clamps), mu_max, mu_step);
        },
        py::arg("plate"), py::arg("clamps"), py::arg("mu_max"), py::arg("mu_step") = 0.01);
    m.def(
        "mismatch",
        [](const Plate& p, const std::vector<Vec2>& clamps, const std::vector<double>& alpha, double lam) {
            return Eigen::VectorXd(mismatch(ModeProblem(p.disc, clamps), alpha, lam));
        },
        py::arg("plate"), py::arg("clamps"), py::arg("alpha"), py::arg("lam"));
    m.def(
        "mode_field",
        [](const Plate& p, const ModeSolution& s, const std::vector<Vec2>& targets) {
            return eval_mode(s.wavenumber(), p.disc, s.clamps, s.density, targets);
        },
        py::arg("plate"), py::arg("mode"), py::arg("targets"));

    py::class_<UnclampedMode>(m, "UnclampedMode")
        .def_readonly("mu", &UnclampedMode::mu)
        .def_readonly("lam", &UnclampedMode::lambda)
        .def_readonly("multiplicity", &UnclampedMode::multiplicity)
        .def_readonly("spurious", &UnclampedMode::spurious)
        .def_readonly("field_ratio", &UnclampedMode::field_ratio)
        .def("__repr__", [](const UnclampedMode& u) {
            return "UnclampedMode(lambda=" + format_double(u.lambda) + (u.spurious ? ", spurious" : "") + ")";
        });
    m.def(
        "scan_unclamped",
        [](const Plate& p, double mu_lo, double mu_hi, double step) { return scan_unclamped(p.disc, mu_lo, mu_hi, step).minima; },
        py::arg("plate"), py::arg("mu_lo"), py::arg("mu_hi"), py::arg("grid_step") = 0.02);

    m.def("disk_exact_eigenvalue", &disk_exact_eigenvalue, py::arg("n") = 1);
    m.def("disk_unclamped_eigenvalue", &disk_unclamped_eigenvalue, py::arg("m"), py::arg("n"));

    m.def(
        "run_config",
        [](const std::string& text, const std::filesystem::path& out, int threads) {
            const RunOutcome o = run(parse_config(text), out, threads);
            return py::make_tuple(o.status, o.manifest.dump());
        },
        py::arg("config_json"), py::arg("out_dir"), py::arg("threads") = 0,
        "Run a config given as JSON text; returns (exit status, manifest JSON text).");
    m.def(
        "validate_config", [](const std::string& text) { return task_name(parse_config(text).task); },
        py::arg("config_json"));
}
