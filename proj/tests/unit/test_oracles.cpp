#include <doctest.h>

#include <cmath>
#include <random>

#include "cubesig/engine.hpp"
#include "cubesig/errors.hpp"
#include "cubesig/oracles.hpp"
#include "cubesig/verify.hpp"

using namespace cubesig;

namespace {

PathSamples concat_paths(const PathSamples& a, const PathSamples& b) {
    // b translated to start at a's endpoint; times packed into [0,1]
    const int n = a.dimension();
    std::vector<double> times;
    for (double t : a.times) times.push_back(t / 2.0);
    for (std::size_t k = 1; k < b.times.size(); ++k) times.push_back(0.5 + b.times[k] / 2.0);
    times.back() = 1.0;
    std::vector<std::vector<double>> values = a.values;
    for (std::size_t k = 1; k < b.values.size(); ++k) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c)
            v[static_cast<std::size_t>(c)] =
                a.values.back()[static_cast<std::size_t>(c)] +
                b.values[k][static_cast<std::size_t>(c)] -
                b.values.front()[static_cast<std::size_t>(c)];
        values.push_back(std::move(v));
    }
    return PathSamples(std::move(times), std::move(values));
}

}  // namespace

TEST_CASE("path_signature") {
    std::mt19937_64 rng(151);

    SUBCASE("unit-speed line counts tuples") {
        const int segs = 10;
        std::vector<double> times(segs + 1);
        std::vector<std::vector<double>> values(segs + 1, std::vector<double>(1));
        for (int k = 0; k <= segs; ++k) {
            times[static_cast<std::size_t>(k)] = static_cast<double>(k) / segs;
            values[static_cast<std::size_t>(k)][0] = static_cast<double>(k) / segs;
        }
        times.back() = values.back()[0] = 1.0;
        const PathSamples p(times, values);
        for (int m = 1; m <= 4; ++m) {
            const std::vector<int> idx(static_cast<std::size_t>(m), 1);
            CHECK(path_signature(p, idx) ==
                  doctest::Approx(static_cast<double>(binomial(segs, m)) / std::pow(segs, m))
                      .epsilon(1e-12));
        }
    }
    SUBCASE("level 1 telescopes to the total increment") {
        const PathSamples p = random_path(rng, 3, 9);
        for (int c = 1; c <= 3; ++c)
            CHECK(path_signature(p, {c}) ==
                  doctest::Approx(p.values.back()[static_cast<std::size_t>(c - 1)] -
                                  p.values.front()[static_cast<std::size_t>(c - 1)])
                      .epsilon(1e-13));
    }
    SUBCASE("empty index gives 1") {
        const PathSamples p = random_path(rng, 2, 4);
        CHECK(path_signature(p, {}) == 1.0);
    }
    SUBCASE("discrete Chen identity is exact") {
        const PathSamples a = random_path(rng, 2, 5);
        const PathSamples b = random_path(rng, 2, 6);
        const PathSamples ab = concat_paths(a, b);
        for (int t = 0; t < 20; ++t) {
            const int m = 1 + (t % 3);
            std::vector<int> idx(static_cast<std::size_t>(m));
            for (int& e : idx) e = 1 + (rng() % 2);
            double expect = 0.0;
            for (int r = 0; r <= m; ++r) {
                const std::vector<int> left(idx.begin(), idx.begin() + r);
                const std::vector<int> right(idx.begin() + r, idx.end());
                expect += path_signature(a, left) * path_signature(b, right);
            }
            CHECK(path_signature(ab, idx) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("path_signature_pl") {
    std::mt19937_64 rng(153);

    SUBCASE("level 1 telescopes like the strict sum") {
        const PathSamples p = random_path(rng, 3, 8);
        for (int c = 1; c <= 3; ++c)
            CHECK(path_signature_pl(p, {c}) ==
                  doctest::Approx(path_signature(p, {c})).epsilon(1e-13));
    }
    SUBCASE("single segment gives the divided power") {
        const PathSamples p({0.0, 1.0}, {{0.0, 0.0}, {2.0, -3.0}});
        CHECK(path_signature_pl(p, {1, 1}) == doctest::Approx(2.0));        // 2^2/2
        CHECK(path_signature_pl(p, {1, 1, 1}) == doctest::Approx(8.0 / 6));  // 2^3/3!
        CHECK(path_signature_pl(p, {1, 2}) == doctest::Approx(-3.0));        // 2*(-3)/2
    }
    SUBCASE("group-like Chen identity is exact") {
        const PathSamples a = random_path(rng, 2, 5);
        const PathSamples b = random_path(rng, 2, 6);
        const PathSamples ab = concat_paths(a, b);
        for (int t = 0; t < 20; ++t) {
            const int m = 1 + (t % 3);
            std::vector<int> idx(static_cast<std::size_t>(m));
            for (int& e : idx) e = 1 + (rng() % 2);
            double expect = 0.0;
            for (int r = 0; r <= m; ++r) {
                const std::vector<int> left(idx.begin(), idx.begin() + r);
                const std::vector<int> right(idx.begin() + r, idx.end());
                expect += path_signature_pl(a, left) * path_signature_pl(b, right);
            }
            CHECK(path_signature_pl(ab, idx) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("exact retrace kills every coefficient") {
        const PathSamples p = out_and_back_path(rng, 3, 5);
        for (int t = 0; t < 20; ++t) {
            const int m = 1 + (t % 4);
            std::vector<int> idx(static_cast<std::size_t>(m));
            for (int& e : idx) e = 1 + (rng() % 3);
            CHECK(std::abs(path_signature_pl(p, idx)) < 1e-12);
        }
    }
    SUBCASE("strict and piecewise-linear agree up to tie terms") {
        const PathSamples coarse = random_path(rng, 2, 8);
        // refine the same walk by splitting each segment in two
        std::vector<double> times;
        std::vector<std::vector<double>> values;
        for (std::size_t k = 0; k + 1 < coarse.times.size(); ++k) {
            times.push_back(coarse.times[k]);
            values.push_back(coarse.values[k]);
            times.push_back(0.5 * (coarse.times[k] + coarse.times[k + 1]));
            std::vector<double> mid(2);
            for (int c = 0; c < 2; ++c)
                mid[static_cast<std::size_t>(c)] =
                    0.5 * (coarse.values[k][static_cast<std::size_t>(c)] +
                           coarse.values[k + 1][static_cast<std::size_t>(c)]);
            values.push_back(std::move(mid));
        }
        times.push_back(1.0);
        values.push_back(coarse.values.back());
        const PathSamples fine(times, values);
        const std::vector<int> idx{1, 2};
        // pl is refinement-invariant; strict approaches it as ties thin out
        CHECK(path_signature_pl(fine, idx) ==
              doctest::Approx(path_signature_pl(coarse, idx)).epsilon(1e-12));
        const double gap_coarse = std::abs(path_signature(coarse, idx) -
                                           path_signature_pl(coarse, idx));
        const double gap_fine =
            std::abs(path_signature(fine, idx) - path_signature_pl(fine, idx));
        CHECK(gap_fine < 0.75 * gap_coarse + 1e-12);
    }
}

TEST_CASE("mc_monomial") {
    std::mt19937_64 rng(157);

    SUBCASE("constant fields are exact with zero standard error") {
        const Matrix a = random_matrix(rng, 3, 2);
        const JacobianField f = jacobian_field(from_linear_map(a, {4, 4}));
        const LevelIndex idx = random_level_index(rng, 2, 3, 2);
        const McResult r = mc_monomial(f, idx, 500, 7);
        const OrderedInjection cols({1, 2});
        double expect = 0.25;
        for (const auto& p : idx.forms) expect *= submatrix_det(a, p, cols);
        CHECK(r.estimate == doctest::Approx(expect).epsilon(1e-13));
        CHECK(r.std_error == doctest::Approx(0.0));
    }
    SUBCASE("same seed, same estimate") {
        const JacobianField f = random_field(rng, 2, 3, {4, 4});
        const LevelIndex idx = random_level_index(rng, 2, 3, 2);
        const McResult r1 = mc_monomial(f, idx, 2000, 99);
        const McResult r2 = mc_monomial(f, idx, 2000, 99);
        CHECK(r1.estimate == r2.estimate);
        CHECK(r1.std_error == r2.std_error);
    }
    SUBCASE("include-ties estimates sit in the self-consistency band") {
        for (int t = 0; t < 5; ++t) {
            const JacobianField f = random_field(rng, 2, 3, {8, 8});
            const int m = 2 + (t % 2);
            const LevelIndex idx = random_level_index(rng, 2, 3, m);
            const double strict = monomial(f, idx);
            const McResult r = mc_monomial(f, idx, 40000, 1234 + t);
            const double band =
                3.0 * (r.std_error + m * m * 2 / 8.0 * std::abs(r.estimate));
            CHECK(std::abs(r.estimate - strict) <= band + 1e-12);
        }
    }
    SUBCASE("drop-ties estimates the strict-order sum unbiasedly") {
        for (int t = 0; t < 5; ++t) {
            const JacobianField f = random_field(rng, 2, 3, {6, 6});
            const LevelIndex idx = random_level_index(rng, 2, 3, 2);
            const double strict = monomial(f, idx);
            const McResult r =
                mc_monomial(f, idx, 60000, 4321 + t, std::nullopt, TiePolicy::Drop);
            CHECK(std::abs(r.estimate - strict) <= 4.0 * r.std_error + 1e-12);
        }
    }
    SUBCASE("standard error shrinks like the square root of the sample count") {
        const JacobianField f = random_field(rng, 2, 3, {6, 6});
        const LevelIndex idx = random_level_index(rng, 2, 3, 2);
        const McResult small = mc_monomial(f, idx, 20000, 5);
        const McResult big = mc_monomial(f, idx, 80000, 5);
        CHECK(big.std_error < 0.7 * small.std_error);
        CHECK(big.std_error > 0.3 * small.std_error);
    }
    SUBCASE("needs at least two samples") {
        const JacobianField f = random_field(rng, 2, 3, {4, 4});
        CHECK_THROWS_AS(mc_monomial(f, random_level_index(rng, 2, 3, 1), 1, 0), InvalidInput);
    }
}

TEST_CASE("sum_of_paths_monomial") {
    std::mt19937_64 rng(163);

    SUBCASE("d=1 reduces to one path-signature coefficient") {
        const PathSamples p = random_path(rng, 3, 7);
        for (int t = 0; t < 10; ++t) {
            const int m = 1 + (t % 3);
            const LevelIndex idx = random_level_index(rng, 1, 3, m);
            std::vector<int> q(static_cast<std::size_t>(m));
            for (int i = 1; i <= m; ++i)
                q[static_cast<std::size_t>(i - 1)] =
                    idx.forms[static_cast<std::size_t>(idx.perms[0](i) - 1)](1);
            CHECK(sum_of_paths_monomial({p}, idx) ==
                  doctest::Approx(path_signature(p, q)).epsilon(1e-12));
        }
    }
    SUBCASE("matches the engine on sum-of-paths grids") {
        std::vector<PathSamples> paths{random_path(rng, 3, 5), random_path(rng, 3, 4)};
        const JacobianField f = jacobian_field(from_sum_of_paths(paths));
        for (int t = 0; t < 15; ++t) {
            const int m = 1 + (t % 3);
            const LevelIndex idx = random_level_index(rng, 2, 3, m);
            CHECK(monomial(f, idx) ==
                  doctest::Approx(sum_of_paths_monomial(paths, idx)).epsilon(1e-10));
        }
    }
    SUBCASE("a tree-like component kills every piecewise-linear monomial") {
        std::vector<PathSamples> paths{out_and_back_path(rng, 3, 4), random_path(rng, 3, 5)};
        for (int t = 0; t < 10; ++t) {
            const int m = 1 + (t % 3);
            CHECK(std::abs(sum_of_paths_monomial(paths, random_level_index(rng, 2, 3, m),
                                                 PathSignatureKind::PiecewiseLinear)) < 1e-10);
        }
    }
}

TEST_CASE("chen_rhs") {
    std::mt19937_64 rng(167);
    const auto injections = enumerate_injections(2, 3);
    auto composable_pair = [&](int axis) {
        GridMap x = random_grid_map(rng, 2, 3, {3, 3});
        std::vector<double> ys = random_grid_map(rng, 2, 3, {3, 3}).samples();
        GridMap shape(2, 3, x.breakpoints(), ys);
        const auto counts = x.vertex_counts();
        std::vector<int> extents = counts;
        extents[static_cast<std::size_t>(axis)] = 1;
        std::vector<int> v(2, 0);
        do {
            std::vector<int> vx = v;
            vx[static_cast<std::size_t>(axis)] = counts[static_cast<std::size_t>(axis)] - 1;
            for (int c = 0; c < 3; ++c)
                ys[shape.flat_vertex(v) * 3 + static_cast<std::size_t>(c)] = x.at(vx, c);
        } while (next_multi_index(v, extents));
        return std::pair<GridMap, GridMap>(std::move(x),
                                           GridMap(2, 3, shape.breakpoints(), std::move(ys)));
    };

    SUBCASE("level 1 is additive") {
        auto [x, y] = composable_pair(0);
        for (const auto& p : injections) {
            const std::vector<OrderedInjection> forms{p};
            const double lhs = chen_rhs(x, y, 0, forms, 1);
            const double phix =
                monomial(jacobian_field(x), LevelIndex(forms, PermutationTuple::identity(2, 1)));
            const double phiy =
                monomial(jacobian_field(y), LevelIndex(forms, PermutationTuple::identity(2, 1)));
            CHECK(lhs == doctest::Approx(phix + phiy).epsilon(1e-13));
        }
    }
    SUBCASE("equals the engine on the composed map for identity indices") {
        for (int t = 0; t < 8; ++t) {
            const int axis = t % 2;
            const int m = 1 + (t % 3);
            auto [x, y] = composable_pair(axis);
            std::vector<OrderedInjection> forms(static_cast<std::size_t>(m));
            for (auto& p : forms)
                p = injections[rng() % injections.size()];
            const GridMap z = compose_j(x, y, axis);
            const double lhs = monomial(jacobian_field(z),
                                        LevelIndex(forms, PermutationTuple::identity(2, m)));
            CHECK(std::abs(lhs - chen_rhs(x, y, axis, forms, m)) < 1e-12);
        }
    }
    SUBCASE("d=1 recovers the classical Chen expansion") {
        const PathSamples a = random_path(rng, 3, 4);
        PathSamples b = random_path(rng, 3, 4);
        // translate b to continue from a and share the time grid
        b.times = a.times;
        const auto delta = [&](int c) {
            return a.values.back()[static_cast<std::size_t>(c)] -
                   b.values.front()[static_cast<std::size_t>(c)];
        };
        for (auto& v : b.values)
            for (int c = 0; c < 3; ++c) v[static_cast<std::size_t>(c)] += delta(c);
        auto to_grid = [](const PathSamples& p) {
            std::vector<double> flat;
            for (const auto& v : p.values) flat.insert(flat.end(), v.begin(), v.end());
            return GridMap(1, 3, {p.times}, flat);
        };
        const GridMap gx = to_grid(a), gy = to_grid(b);
        for (int t = 0; t < 10; ++t) {
            const int m = 1 + (t % 3);
            std::vector<OrderedInjection> forms;
            std::vector<int> multi;
            for (int i = 0; i < m; ++i) {
                const int c = 1 + static_cast<int>(rng() % 3);
                forms.push_back(OrderedInjection({c}));
                multi.push_back(c);
            }
            double expect = 0.0;
            for (int r = 0; r <= m; ++r) {
                const std::vector<int> left(multi.begin(), multi.begin() + r);
                const std::vector<int> right(multi.begin() + r, multi.end());
                expect += path_signature(a, left) * path_signature(b, right);
            }
            CHECK(chen_rhs(gx, gy, 0, forms, m) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("rejects non-composable inputs") {
        const GridMap x = random_grid_map(rng, 2, 3, {3, 3});
        const GridMap y = random_grid_map(rng, 2, 3, {3, 3});
        CHECK_THROWS_AS(chen_rhs(x, y, 0, {injections[0]}, 1), NotComposable);
    }
}
