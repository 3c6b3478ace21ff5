// Acceptance suite: one test case per criterion, each printing a single
// [PASS]/[FAIL] line. Fixtures are seeded; tolerances are pinned inline.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cubesig/engine.hpp"
#include "cubesig/io.hpp"
#include "cubesig/oracles.hpp"
#include "cubesig/tensor.hpp"
#include "cubesig/verify.hpp"

using namespace cubesig;

namespace {

constexpr std::uint64_t kBigBudget = 4'000'000'000ull;

struct Criterion {
    int number;
    std::string name;
    bool pass = true;
    double worst = 0.0;
    std::string detail;

    void observe(double err, double tol, const std::string& what) {
        worst = std::max(worst, err);
        if (err > tol && pass) {
            pass = false;
            std::ostringstream ss;
            ss << what << " error " << err << " exceeds " << tol;
            detail = ss.str();
        }
    }
    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
    void print() const {
        std::printf("[%s] criterion %d: %s (worst %.3g)%s%s\n", pass ? "PASS" : "FAIL",
                    number, name.c_str(), worst, detail.empty() ? "" : " -- ",
                    detail.c_str());
        std::fflush(stdout);
    }
};

GridMap grid_of_path(const PathSamples& p) {
    std::vector<double> flat;
    for (const auto& v : p.values) flat.insert(flat.end(), v.begin(), v.end());
    return GridMap(1, p.dimension(), {p.times}, flat);
}

std::pair<GridMap, GridMap> composable_pair(std::mt19937_64& rng, int axis,
                                            const std::vector<int>& cells) {
    const GridMap x = random_grid_map(rng, 2, 3, cells);
    GridMap y0 = random_grid_map(rng, 2, 3, cells);
    std::vector<double> ys = y0.samples();
    const auto counts = x.vertex_counts();
    std::vector<int> extents = counts;
    extents[static_cast<std::size_t>(axis)] = 1;
    std::vector<int> v(2, 0);
    do {
        std::vector<int> vx = v;
        vx[static_cast<std::size_t>(axis)] = counts[static_cast<std::size_t>(axis)] - 1;
        for (int c = 0; c < 3; ++c)
            ys[y0.flat_vertex(v) * 3 + static_cast<std::size_t>(c)] = x.at(vx, c);
    } while (next_multi_index(v, extents));
    return {x, GridMap(2, 3, x.breakpoints(), std::move(ys))};
}

GridMap apply_linear(const Matrix& a, const GridMap& x) {
    std::vector<double> samples(x.vertex_total() * static_cast<std::size_t>(a.rows));
    const auto counts = x.vertex_counts();
    std::vector<int> v(static_cast<std::size_t>(x.d()), 0);
    std::size_t flat = 0;
    do {
        for (int r = 0; r < a.rows; ++r) {
            double acc = 0.0;
            for (int c = 0; c < x.n(); ++c) acc += a(r, c) * x.at(v, c);
            samples[flat * static_cast<std::size_t>(a.rows) + static_cast<std::size_t>(r)] =
                acc;
        }
        ++flat;
    } while (next_multi_index(v, counts));
    return GridMap(x.d(), a.rows, x.breakpoints(), std::move(samples));
}

GradedTensor tensor_diff(const GradedTensor& a, const GradedTensor& b) {
    GradedTensor diff(a.d, a.n, a.level0 - b.level0);
    for (const auto& [idx, v] : a.coeffs) diff.add(idx, v);
    for (const auto& [idx, v] : b.coeffs) diff.add(idx, -v);
    return diff;
}

GridMap worked_example_map(int cells) {
    std::vector<std::vector<double>> bps(2);
    for (auto& bp : bps) {
        bp.resize(static_cast<std::size_t>(cells) + 1);
        for (int k = 0; k <= cells; ++k) bp[static_cast<std::size_t>(k)] = double(k) / cells;
        bp.back() = 1.0;
    }
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(cells + 1) * (cells + 1) * 4);
    for (int i = 0; i <= cells; ++i)
        for (int k = 0; k <= cells; ++k) {
            const double s1 = bps[0][static_cast<std::size_t>(i)];
            const double s2 = bps[1][static_cast<std::size_t>(k)];
            samples.push_back(s1);
            samples.push_back(s1 * s2 * s2);
            samples.push_back(s1 * s1 * s2 * s2 * s2);
            samples.push_back(s2 * s2 * s2 * s2);
        }
    return GridMap(2, 4, std::move(bps), std::move(samples));
}

}  // namespace

TEST_CASE("criterion 1: exact identity suite at 1e-12") {
    Criterion crit{1, "exact identities (permutation, cube symmetry, reparametrization, "
                      "d=1 reduction, composition, minor-field equality)"};
    const double tol = 1e-12;
    std::mt19937_64 rng(1001);

    // permutation invariance, 60 cases
    for (int t = 0; t < 60; ++t) {
        const int m = 1 + (t % 3);
        const JacobianField f = random_field(rng, 2, 3, {6, 6});
        const LevelIndex idx = random_level_index(rng, 2, 3, m);
        const Permutation sigma = random_permutation(rng, m);
        const auto [lhs, rhs] = act_on_level_index(sigma, idx);
        crit.observe(std::abs(monomial(f, lhs, {}, std::nullopt, kBigBudget) -
                              monomial(f, rhs, {}, std::nullopt, kBigBudget)),
                     tol, "permutation invariance");
    }
    // cube symmetry with sign: 8 group elements x 7 indices
    {
        const GridMap x = random_nonuniform_grid_map(rng, 2, 3, {5, 6});
        const JacobianField fx = jacobian_field(x);
        for (const auto& g : enumerate_hyperoctahedral(2)) {
            const JacobianField fg = jacobian_field(bd_transform(x, g));
            for (int t = 0; t < 7; ++t) {
                const LevelIndex idx = random_level_index(rng, 2, 3, 1 + (t % 3));
                auto [pi, sign] = bd_act_on_perms(g, idx.perms);
                crit.observe(
                    std::abs(monomial(fg, idx, {}, std::nullopt, kBigBudget) -
                             sign * monomial(fx, LevelIndex(idx.forms, std::move(pi)), {},
                                             std::nullopt, kBigBudget)),
                    tol, "cube symmetry");
            }
        }
    }
    // reparametrization invariance, 50 cases
    for (int t = 0; t < 50; ++t) {
        const GridMap x = random_grid_map(rng, 2, 3, {5, 5});
        std::vector<std::vector<double>> rel;
        for (int j = 0; j < 2; ++j)
            rel.push_back(
                random_relabeling(rng, x.breakpoints()[static_cast<std::size_t>(j)].size()));
        const LevelIndex idx = random_level_index(rng, 2, 3, 1 + (t % 3));
        crit.observe(std::abs(monomial(jacobian_field(x), idx, {}, std::nullopt, kBigBudget) -
                              monomial(jacobian_field(reparametrize(x, rel)), idx, {},
                                       std::nullopt, kBigBudget)),
                     tol, "reparametrization");
    }
    // d=1 engine vs path-signature oracle, 60 cases
    for (int t = 0; t < 60; ++t) {
        const PathSamples p = random_path(rng, 3, 10 + (t % 6));
        const JacobianField f = jacobian_field(grid_of_path(p));
        const int m = 1 + (t % 3);
        const LevelIndex idx = random_level_index(rng, 1, 3, m);
        std::vector<int> q(static_cast<std::size_t>(m));
        for (int i = 1; i <= m; ++i)
            q[static_cast<std::size_t>(i - 1)] =
                idx.forms[static_cast<std::size_t>(idx.perms[0](i) - 1)](1);
        crit.observe(std::abs(monomial(f, idx, {}, std::nullopt, kBigBudget) -
                              path_signature(p, q)),
                     tol, "d=1 reduction");
    }
    // modified composition identity at the identity permutation, 54 cases
    {
        const auto injections = enumerate_injections(2, 3);
        for (int t = 0; t < 54; ++t) {
            const int axis = t % 2;
            const int m = 1 + (t % 3);
            auto [x, y] = composable_pair(rng, axis, {4, 4});
            std::vector<OrderedInjection> forms(static_cast<std::size_t>(m));
            for (auto& p : forms) p = injections[rng() % injections.size()];
            const double lhs =
                monomial(jacobian_field(compose_j(x, y, axis)),
                         LevelIndex(forms, PermutationTuple::identity(2, m)), {},
                         std::nullopt, kBigBudget);
            crit.observe(std::abs(lhs - chen_rhs(x, y, axis, forms, m)), tol, "composition");
        }
    }
    // equal minor fields give equal signatures, 50 cases
    for (int t = 0; t < 50; ++t) {
        const GridMap x = random_grid_map(rng, 2, 3, {4, 4});
        std::vector<double> shifted = x.samples();
        const double off[3] = {std::uniform_real_distribution<double>(-3, 3)(rng),
                               std::uniform_real_distribution<double>(-3, 3)(rng),
                               std::uniform_real_distribution<double>(-3, 3)(rng)};
        for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] += off[k % 3];
        const GridMap y(2, 3, x.breakpoints(), std::move(shifted));
        const LevelIndex idx = random_level_index(rng, 2, 3, 1 + (t % 3));
        crit.observe(std::abs(monomial(jacobian_field(x), idx, {}, std::nullopt, kBigBudget) -
                              monomial(jacobian_field(y), idx, {}, std::nullopt, kBigBudget)),
                     tol, "minor-field equality");
    }

    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 2: linear-map closed form and factorial limit") {
    Criterion crit{2, "linear maps count ordered tuples exactly and approach the "
                      "factorial volume"};
    std::mt19937_64 rng(1002);
    const OrderedInjection cols({1, 2});
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = random_matrix(rng, 3, 2);
        for (int cells : {8, 16, 32}) {
            const JacobianField f = jacobian_field(from_linear_map(a, {cells, cells}));
            for (int m = 1; m <= 3; ++m)
                for (int t = 0; t < 4; ++t) {
                    const LevelIndex idx = random_level_index(rng, 2, 3, m);
                    double dets = 1.0;
                    for (const auto& p : idx.forms) dets *= submatrix_det(a, p, cols);
                    double counted = dets;
                    for (int j = 0; j < 2; ++j)
                        counted *=
                            static_cast<double>(binomial(cells, m)) / std::pow(cells, m);
                    const double value = monomial(f, idx, {}, std::nullopt, kBigBudget);
                    crit.observe(std::abs(value - counted), 1e-12, "exact count");
                    double lim = dets;
                    for (int j = 0; j < 2; ++j)
                        for (int i = 1; i <= m; ++i) lim /= i;
                    if (std::abs(lim) > 1e-9)
                        crit.observe(std::abs(value - lim) / std::abs(lim),
                                     3.0 * m * m * 2 / cells, "factorial limit");
                }
        }
    }
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 3: decay and continuity bounds on 100 field pairs") {
    Criterion crit{3, "factorial decay and continuity bounds, zero violations"};
    std::mt19937_64 rng(1003);
    for (int pair = 0; pair < 100; ++pair) {
        const JacobianField f = random_field(rng, 2, 3, {5, 5});
        const JacobianField g = perturb_field(rng, f, 0.05);
        double eps = 0.0;
        for (std::size_t i = 0; i < f.minors.size(); ++i)
            eps = std::max(eps, std::abs(f.minors[i] - g.minors[i]));
        const double big = std::max(f.max_abs_minor(), g.max_abs_minor());
        const GradedTensor sf = signature(f, 3, {}, kBigBudget);
        const GradedTensor sg = signature(g, 3, {}, kBigBudget);
        for (const auto& [idx, v] : sf.coeffs) {
            const int m = idx.level();
            double fact_d = 1.0;
            for (int j = 0; j < 2; ++j)
                for (int i = 1; i <= m; ++i) fact_d *= i;
            crit.observe(std::max(0.0, std::abs(v) - std::pow(big, m) / fact_d), 1e-12,
                         "factorial decay");
            crit.observe(std::max(0.0, std::abs(v - sg.at(idx)) -
                                           m * std::pow(big, m - 1) * eps / fact_d),
                         1e-12, "continuity bound");
        }
    }
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 4: shuffle identity converges at rate >= 1.7 per doubling") {
    Criterion crit{4, "shuffle identity within 0.05 at N=32 and ratio >= 1.7 on 8->16->32"};
    std::mt19937_64 rng(1004);
    const SmoothMap smooth = random_smooth_map(rng, 2, 3);

    std::vector<std::pair<LevelIndex, LevelIndex>> pairs;
    for (int k = 0; k < 6; ++k)
        pairs.emplace_back(random_level_index(rng, 2, 3, 1),
                           random_level_index(rng, 2, 3, 1 + (k % 2)));

    auto deviation = [&](const JacobianField& f) {
        double total = 0.0;
        for (const auto& [ia, ib] : pairs) {
            const double va = monomial(f, ia, {}, std::nullopt, kBigBudget);
            const double vb = monomial(f, ib, {}, std::nullopt, kBigBudget);
            const Functional prod =
                shuffle_product(Functional::basis(2, 3, ia), Functional::basis(2, 3, ib));
            double vs = 0.0;
            for (const auto& [w, idx] : prod.terms)
                vs += w * monomial(f, idx, {}, std::nullopt, kBigBudget);
            total += std::abs(va * vb - vs) / std::max(1.0, std::abs(va * vb));
        }
        return total / static_cast<double>(pairs.size());
    };

    const double dev8 = deviation(jacobian_field(smooth.sample({8, 8})));
    const double dev16 = deviation(jacobian_field(smooth.sample({16, 16})));
    const double dev32 = deviation(jacobian_field(smooth.sample({32, 32})));
    crit.observe(dev32, 0.05, "relative deviation at N=32");
    crit.require(dev8 / dev16 >= 1.7, "ratio 8->16 below 1.7");
    crit.require(dev16 / dev32 >= 1.7, "ratio 16->32 below 1.7");
    std::printf("    shuffle deviations: N=8 %.4g, N=16 %.4g, N=32 %.4g\n", dev8, dev16,
                dev32);
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 5: sum-of-paths closed form and tree-like triviality") {
    Criterion crit{5, "sum-of-paths closed form within 1e-10; tree-like component "
                      "cancels all levels <= 3"};
    std::mt19937_64 rng(1005);
    for (int t = 0; t < 30; ++t) {
        std::vector<PathSamples> paths{random_path(rng, 3, 5 + (t % 3)),
                                       random_path(rng, 3, 4 + (t % 4))};
        const JacobianField f = jacobian_field(from_sum_of_paths(paths));
        const int m = 1 + (t % 3);
        const LevelIndex idx = random_level_index(rng, 2, 3, m);
        crit.observe(std::abs(monomial(f, idx, {}, std::nullopt, kBigBudget) -
                              sum_of_paths_monomial(paths, idx)),
                     1e-10, "closed form");
    }
    {
        std::vector<PathSamples> paths{out_and_back_path(rng, 3, 4), random_path(rng, 3, 6)};
        const auto injections = enumerate_injections(2, 3);
        for (int m = 1; m <= 3; ++m) {
            const auto perms = enumerate_permutations(m);
            std::vector<std::size_t> fp(static_cast<std::size_t>(m), 0);
            while (true) {
                std::vector<OrderedInjection> forms(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i)
                    forms[static_cast<std::size_t>(i)] = injections[fp[static_cast<std::size_t>(i)]];
                for (const auto& p1 : perms)
                    for (const auto& p2 : perms)
                        crit.observe(
                            std::abs(sum_of_paths_monomial(
                                paths, LevelIndex(forms, PermutationTuple({p1, p2})),
                                PathSignatureKind::PiecewiseLinear)),
                            1e-8, "tree-like triviality");
                int i = m - 1;
                while (i >= 0 && ++fp[static_cast<std::size_t>(i)] == injections.size()) {
                    fp[static_cast<std::size_t>(i)] = 0;
                    --i;
                }
                if (i < 0) break;
            }
        }
    }
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 6: linear-map equivariance for 20 matrices") {
    Criterion crit{6, "signature of A.x equals the induced compound action within 1e-9"};
    std::mt19937_64 rng(1006);
    const GridMap x = random_grid_map(rng, 2, 3, {5, 5});
    const GradedTensor sig = signature(jacobian_field(x), 2, {}, kBigBudget);
    std::vector<Matrix> mats;
    for (int k = 0; k < 10; ++k) mats.push_back(random_matrix(rng, 3, 3));
    for (int k = 0; k < 3; ++k)
        mats.push_back(matmul(random_matrix(rng, 3, 1), random_matrix(rng, 1, 3)));
    for (int k = 0; k < 3; ++k)
        mats.push_back(matmul(random_matrix(rng, 3, 2), random_matrix(rng, 2, 3)));
    for (int k = 0; k < 4; ++k) mats.push_back(random_matrix(rng, 4, 3));
    REQUIRE(mats.size() == 20);
    for (const auto& a : mats) {
        const GradedTensor lhs =
            signature(jacobian_field(apply_linear(a, x)), 2, {}, kBigBudget);
        const GradedTensor rhs = induced_map(a, sig);
        crit.observe(norm(tensor_diff(lhs, rhs)) / norm(rhs), 1e-9, "equivariance");
    }
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 7: moment extraction against the direct discrete moment") {
    Criterion crit{7, "moments within 0.1 at N=32 for |c| <= 2, decreasing at 2N; "
                      "equivalent-family parametrized signatures agree"};
    std::mt19937_64 rng(1007);
    const SmoothMap smooth = random_smooth_map(rng, 2, 3);
    const GridMap x32 = smooth.sample({32, 32});
    const GridMap x64 = smooth.sample({64, 64});
    for (const auto& c : std::vector<std::vector<int>>{
             {0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}}) {
        for (const auto& p : enumerate_injections(2, 3)) {
            const auto [plan, func] = moment_functional(c, p, 3);
            (void)func;
            const double d32 = direct_discrete_moment(x32, c, p);
            const double e32 =
                std::abs(extract_moment(x32, plan, {}, kBigBudget) - d32) / std::abs(d32);
            const double d64 = direct_discrete_moment(x64, c, p);
            const double e64 =
                std::abs(extract_moment(x64, plan, {}, kBigBudget) - d64) / std::abs(d64);
            std::ostringstream what;
            what << "moment c=(" << c[0] << "," << c[1] << ")";
            crit.observe(e32, 0.1, what.str());
            // decreasing unless already at numerical exactness
            crit.require(e64 < e32 || e32 < 1e-12, what.str() + " not decreasing at 2N");
        }
    }
    // identical parametrized signatures across a minor-field-equal family
    {
        auto family = [](double a) {
            Matrix m(3, 2);
            m(0, 0) = a;
            m(1, 1) = 1.0 / a;
            m(2, 0) = -a;
            m(2, 1) = 1.0 / a;
            return from_linear_map(m, {8, 8});
        };
        const GradedTensor s1 = parametrized_signature(family(1.0), 2, {}, kBigBudget);
        for (double a : {2.0, -0.5}) {
            const GradedTensor s2 = parametrized_signature(family(a), 2, {}, kBigBudget);
            double worst = std::abs(s1.level0 - s2.level0);
            for (const auto& [idx, v] : s1.coeffs)
                worst = std::max(worst, std::abs(v - s2.at(idx)));
            crit.observe(worst, 1e-12, "equivalent family");
        }
    }
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 8: normalization and graded scaling") {
    Criterion crit{8, "normalized signatures respect the cap; scaling matches the "
                      "graded rescale"};
    std::mt19937_64 rng(1008);
    const NormalizationConfig cfg;  // cap 4, tolerance 1e-12
    for (int t = 0; t < 10; ++t) {
        const GridMap x = random_grid_map(rng, 2, 3, {4, 4});
        GradedTensor sig = parametrized_signature(x, 2, {}, kBigBudget);
        for (double inflate : {1.0, 25.0}) {
            GradedTensor t2 = sig;
            for (auto& [k, v] : t2.coeffs) v *= inflate;
            const auto [normed, lambda] = normalize(t2, cfg);
            crit.observe(std::max(0.0, norm(normed) - cfg.cap - 1e-9), 0.0, "cap");
            if (norm(t2) <= cfg.cap) {
                crit.require(lambda == 1.0, "identity below cap");
                crit.observe(norm(tensor_diff(normed, t2)), 1e-15, "identity below cap");
            } else {
                crit.require(lambda < 1.0, "lambda below one past cap");
            }
        }
        const double nu = 0.6 + 0.1 * (t % 5);
        const GradedTensor lhs =
            signature(jacobian_field(scale_map(x, nu)), 2, {}, kBigBudget);
        const GradedTensor rhs =
            graded_scale(nu * nu, signature(jacobian_field(x), 2, {}, kBigBudget));
        double worst = 0.0;
        for (const auto& [idx, v] : rhs.coeffs)
            worst = std::max(worst, std::abs(lhs.at(idx) - v));
        crit.observe(worst, 1e-10, "graded scaling");
    }
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 9: monte-carlo oracle agreement") {
    Criterion crit{9, "worked-example monomial within 2 standard errors at 1e7 samples; "
                      "constant fields exact with zero variance"};
    const GridMap x = worked_example_map(64);
    const JacobianField f = jacobian_field(x);
    const LevelIndex idx(
        {OrderedInjection({1, 3}), OrderedInjection({1, 4}), OrderedInjection({2, 3})},
        PermutationTuple({Permutation({1, 2, 3}), Permutation({3, 1, 2})}));
    const double strict = monomial(f, idx, {}, std::nullopt, kBigBudget);
    const McResult est = mc_monomial(f, idx, 10'000'000, 7, std::nullopt, TiePolicy::Drop);
    std::printf("    worked example: strict %.8g, estimate %.8g +- %.3g\n", strict,
                est.estimate, est.std_error);
    crit.observe(std::abs(est.estimate - strict), 2.0 * est.std_error, "worked example");

    std::mt19937_64 rng(1009);
    const Matrix a = random_matrix(rng, 3, 2);
    const JacobianField cf = jacobian_field(from_linear_map(a, {6, 6}));
    for (int t = 0; t < 5; ++t) {
        const LevelIndex cidx = random_level_index(rng, 2, 3, 1 + (t % 3));
        const McResult r = mc_monomial(cf, cidx, 1000, 17 + t);
        const OrderedInjection cols({1, 2});
        double expect = 1.0;
        for (const auto& p : cidx.forms) expect *= submatrix_det(a, p, cols);
        for (int j = 0; j < 2; ++j)
            for (int i = 1; i <= cidx.level(); ++i) expect /= i;
        crit.observe(std::abs(r.estimate - expect), 1e-12, "constant exact");
        crit.observe(r.std_error, 1e-12, "zero variance");
    }
    crit.print();
    CHECK(crit.pass);
}

TEST_CASE("criterion 10: byte-identical outputs for identical run configs") {
    Criterion crit{10, "repeated CLI runs with one config produce identical bytes"};
    const char* cli = std::getenv("CUBESIG_CLI");
    crit.require(cli != nullptr, "CUBESIG_CLI not set");
    if (cli) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "cubesig_acceptance";
        fs::create_directories(dir);
        std::mt19937_64 rng(1010);
        const GridMap x = random_grid_map(rng, 2, 3, {4, 4});
        const fs::path map_path = dir / "map.json";
        {
            std::ofstream out(map_path);
            out << grid_map_to_json(x).dump(2) << "\n";
        }
        auto read_file = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        int case_id = 0;
        for (const std::string extra :
             {std::string{"--level 2 --seed 5"},
              std::string{"--level 2 --quadrature mc --mc-samples 20000 --seed 5"},
              std::string{"--level 2 --seed 5 --normalize 4"},
              std::string{"--level 2 --seed 5 --format csv"}}) {
            const fs::path out_a = dir / ("out_a" + std::to_string(case_id));
            const fs::path out_b = dir / ("out_b" + std::to_string(case_id));
            ++case_id;
            for (const fs::path& path : {out_a, out_b}) {
                const std::string cmd = std::string(cli) + " compute " + map_path.string() +
                                        " " + extra + " --out " + path.string();
                crit.require(std::system(cmd.c_str()) == 0, "compute run failed");
            }
            crit.require(read_file(out_a) == read_file(out_b),
                         "outputs differ for config: " + extra);
        }
    }
    crit.print();
    CHECK(crit.pass);
}
