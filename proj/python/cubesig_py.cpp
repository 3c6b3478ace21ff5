#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cubesig/engine.hpp"
#include "cubesig/errors.hpp"
#include "cubesig/grid_map.hpp"
#include "cubesig/io.hpp"
#include "cubesig/oracles.hpp"
#include "cubesig/tensor.hpp"
#include "cubesig/verify.hpp"

namespace py = pybind11;
using namespace cubesig;

namespace {

QuadratureSpec make_quad(const std::string& mode, int mc_samples, std::uint64_t seed) {
    QuadratureSpec q;
    q.mode = mode == "mc" ? QuadratureMode::MonteCarlo : QuadratureMode::Grid;
    q.mc_samples = mc_samples;
    q.seed = seed;
    return q;
}

py::list tensor_terms(const GradedTensor& t) {
    py::list out;
    for (const auto& [idx, v] : t.coeffs) {
        py::list forms, perms;
        for (const auto& inj : idx.forms) forms.append(inj.image);
        for (const auto& comp : idx.perms.components) perms.append(comp.images);
        out.append(py::make_tuple(idx.level(), forms, perms, v));
    }
    return out;
}

LevelIndex index_from_lists(const std::vector<std::vector<int>>& forms,
                            const std::vector<std::vector<int>>& perms) {
    std::vector<OrderedInjection> f;
    for (const auto& img : forms) f.emplace_back(img);
    std::vector<Permutation> p;
    for (const auto& img : perms) p.emplace_back(img);
    return LevelIndex(std::move(f), PermutationTuple(std::move(p)));
}

}  // namespace

PYBIND11_MODULE(_cubesig, m) {
    m.doc() = "mapping space signatures of gridded maps";

    py::class_<GridMap>(m, "GridMap")
        .def(py::init<int, int, std::vector<std::vector<double>>, std::vector<double>>(),
             py::arg("d"), py::arg("n"), py::arg("breakpoints"), py::arg("samples"))
        .def_property_readonly("d", &GridMap::d)
        .def_property_readonly("n", &GridMap::n)
        .def_property_readonly("breakpoints", &GridMap::breakpoints)
        .def_property_readonly("samples", &GridMap::samples)
        .def("to_json", [](const GridMap& x) { return grid_map_to_json(x).dump(); });

    py::class_<GradedTensor>(m, "GradedTensor")
        .def_property_readonly("level0", [](const GradedTensor& t) { return t.level0; })
        .def_property_readonly("d", [](const GradedTensor& t) { return t.d; })
        .def_property_readonly("n", [](const GradedTensor& t) { return t.n; })
        .def("terms", &tensor_terms)
        .def("norm", [](const GradedTensor& t) { return norm(t); })
        .def("to_json", [](const GradedTensor& t) { return tensor_to_json(t).dump(); })
        .def("to_csv", [](const GradedTensor& t) { return tensor_to_csv(t); });

    m.def("grid_map_from_json",
          [](const std::string& text) { return grid_map_from_json(nlohmann::json::parse(text)); });

    m.def(
        "from_linear_map",
        [](const std::vector<std::vector<double>>& rows, const std::vector<int>& resolution) {
            if (rows.empty()) throw InvalidInput("matrix must be non-empty");
            Matrix a(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
            for (std::size_t r = 0; r < rows.size(); ++r)
                for (std::size_t c = 0; c < rows[r].size(); ++c)
                    a(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
            return from_linear_map(a, resolution);
        },
        py::arg("matrix"), py::arg("resolution"));

    m.def(
        "signature",
        [](const GridMap& x, int level, const std::string& quadrature, int mc_samples,
           std::uint64_t seed, std::uint64_t budget) {
            return signature(jacobian_field(x), level, make_quad(quadrature, mc_samples, seed),
                             budget);
        },
        py::arg("map"), py::arg("level") = 2, py::arg("quadrature") = "grid",
        py::arg("mc_samples") = 100000, py::arg("seed") = 0,
        py::arg("budget") = kDefaultBudget);

    m.def(
        "parametrized_signature",
        [](const GridMap& x, int level, const std::string& quadrature, int mc_samples,
           std::uint64_t seed, std::uint64_t budget) {
            return parametrized_signature(x, level, make_quad(quadrature, mc_samples, seed),
                                          budget);
        },
        py::arg("map"), py::arg("level") = 2, py::arg("quadrature") = "grid",
        py::arg("mc_samples") = 100000, py::arg("seed") = 0,
        py::arg("budget") = kDefaultBudget);

    m.def(
        "monomial",
        [](const GridMap& x, const std::vector<std::vector<int>>& forms,
           const std::vector<std::vector<int>>& perms, const std::string& quadrature,
           int mc_samples, std::uint64_t seed, std::uint64_t budget) {
            return monomial(jacobian_field(x), index_from_lists(forms, perms),
                            make_quad(quadrature, mc_samples, seed), std::nullopt, budget);
        },
        py::arg("map"), py::arg("forms"), py::arg("perms"), py::arg("quadrature") = "grid",
        py::arg("mc_samples") = 100000, py::arg("seed") = 0,
        py::arg("budget") = kDefaultBudget);

    m.def(
        "metric",
        [](const GridMap& x, const GridMap& y, const std::string& which) {
            return metric_mu(x, y, which == "inf" ? Metric::Inf : Metric::One);
        },
        py::arg("x"), py::arg("y"), py::arg("which") = "one");

    m.def("inner_product", &inner_product);

    m.def(
        "normalize",
        [](const GradedTensor& t, double cap, double tolerance) {
            NormalizationConfig cfg;
            cfg.cap = cap;
            cfg.tolerance = tolerance;
            auto [out, lambda] = normalize(t, cfg);
            return py::make_tuple(out, lambda);
        },
        py::arg("tensor"), py::arg("cap") = 4.0, py::arg("tolerance") = 1e-12);

    m.def(
        "extract_moment",
        [](const GridMap& x, const std::vector<int>& exponents, const std::vector<int>& target,
           std::uint64_t budget) {
            auto [plan, func] = moment_functional(exponents, OrderedInjection(target), x.n());
            (void)func;
            return extract_moment(x, plan, {}, budget);
        },
        py::arg("map"), py::arg("exponents"), py::arg("target"),
        py::arg("budget") = kDefaultBudget);

    m.def(
        "scale_map", [](const GridMap& x, double nu) { return scale_map(x, nu); },
        py::arg("map"), py::arg("nu"));

    m.def(
        "identity_signature",
        [](const GridMap& x, int level, std::uint64_t budget) {
            return identity_signature(jacobian_field(x), level, std::nullopt, budget);
        },
        py::arg("map"), py::arg("level") = 2, py::arg("budget") = kDefaultBudget);

    m.def(
        "compose",
        [](const GridMap& x, const GridMap& y, int axis, double face_tol) {
            return compose_j(x, y, axis, face_tol);
        },
        py::arg("x"), py::arg("y"), py::arg("axis"), py::arg("face_tol") = 1e-9);

    m.def(
        "cube_transform",
        [](const GridMap& x, const std::vector<int>& reflections,
           const std::vector<int>& rotation) {
            std::vector<std::uint8_t> tau(reflections.begin(), reflections.end());
            return bd_transform(x, HyperoctahedralElement(std::move(tau),
                                                          Permutation(rotation)));
        },
        py::arg("map"), py::arg("reflections"), py::arg("rotation"));

    m.def(
        "reparametrize",
        [](const GridMap& x, const std::vector<std::vector<double>>& relabelings) {
            return reparametrize(x, relabelings);
        },
        py::arg("map"), py::arg("relabelings"));

    m.def("lift_parametrized",
          [](const GridMap& x) { return lift_parametrized(x); });

    m.def(
        "from_sum_of_paths",
        [](const std::vector<std::pair<std::vector<double>,
                                       std::vector<std::vector<double>>>>& paths) {
            std::vector<PathSamples> ps;
            ps.reserve(paths.size());
            for (const auto& [times, values] : paths) ps.emplace_back(times, values);
            return from_sum_of_paths(ps);
        },
        py::arg("paths"));

    m.def(
        "path_signature",
        [](const std::vector<double>& times, const std::vector<std::vector<double>>& values,
           const std::vector<int>& multi_index, const std::string& kind) {
            const PathSamples p(times, values);
            return kind == "piecewise_linear" ? path_signature_pl(p, multi_index)
                                              : path_signature(p, multi_index);
        },
        py::arg("times"), py::arg("values"), py::arg("multi_index"),
        py::arg("kind") = "strict");

    m.def(
        "mc_monomial",
        [](const GridMap& x, const std::vector<std::vector<int>>& forms,
           const std::vector<std::vector<int>>& perms, int samples, std::uint64_t seed,
           const std::string& ties) {
            const auto r = mc_monomial(jacobian_field(x), index_from_lists(forms, perms),
                                       samples, seed, std::nullopt,
                                       ties == "drop" ? TiePolicy::Drop : TiePolicy::Include);
            return py::make_tuple(r.estimate, r.std_error);
        },
        py::arg("map"), py::arg("forms"), py::arg("perms"), py::arg("samples") = 100000,
        py::arg("seed") = 0, py::arg("ties") = "include");

    m.def(
        "run_verification",
        [](std::uint64_t seed, const std::string& config_path, std::uint64_t budget) {
            VerifyOptions opts;
            opts.seed = seed;
            opts.budget = budget;
            opts.tolerances = load_tolerances(config_path);
            return report_to_json(run_verification(opts)).dump();
        },
        py::arg("seed"), py::arg("config_path"), py::arg("budget") = 100000000ull);

    py::register_exception<BudgetExceeded>(m, "BudgetExceeded");
    py::register_exception<NotComposable>(m, "NotComposable");
}
