#include "cubesig/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "cubesig/errors.hpp"
#include "cubesig/io.hpp"
#include "cubesig/oracles.hpp"
#include "cubesig/tensor.hpp"

namespace cubesig {

namespace {

double uniform(std::mt19937_64& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

int uniform_int(std::mt19937_64& rng, int a, int b) {
    return std::uniform_int_distribution<int>(a, b)(rng);
}

std::vector<std::vector<double>> uniform_breakpoints(const std::vector<int>& cells) {
    std::vector<std::vector<double>> bps(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
        auto& bp = bps[j];
        bp.resize(static_cast<std::size_t>(cells[j]) + 1);
        for (int k = 0; k <= cells[j]; ++k)
            bp[static_cast<std::size_t>(k)] = static_cast<double>(k) / cells[j];
        bp.back() = 1.0;
    }
    return bps;
}

}  // namespace

GridMap random_grid_map(std::mt19937_64& rng, int d, int n, const std::vector<int>& cells) {
    auto bps = uniform_breakpoints(cells);
    std::size_t total = static_cast<std::size_t>(n);
    for (const auto& bp : bps) total *= bp.size();
    std::vector<double> samples(total);
    for (double& s : samples) s = uniform(rng, -1.0, 1.0);
    return GridMap(d, n, std::move(bps), std::move(samples));
}

GridMap random_nonuniform_grid_map(std::mt19937_64& rng, int d, int n,
                                   const std::vector<int>& cells) {
    std::vector<std::vector<double>> bps(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        std::vector<double> inner(static_cast<std::size_t>(cells[static_cast<std::size_t>(j)]) -
                                  1);
        for (double& t : inner) t = uniform(rng, 0.05, 0.95);
        std::sort(inner.begin(), inner.end());
        auto& bp = bps[static_cast<std::size_t>(j)];
        bp.push_back(0.0);
        for (double t : inner) bp.push_back(t);
        bp.push_back(1.0);
        for (std::size_t k = 1; k < bp.size(); ++k)
            if (bp[k] <= bp[k - 1]) bp[k] = bp[k - 1] + 1e-6;
        bp.back() = 1.0;
    }
    std::size_t total = static_cast<std::size_t>(n);
    for (const auto& bp : bps) total *= bp.size();
    std::vector<double> samples(total);
    for (double& s : samples) s = uniform(rng, -1.0, 1.0);
    return GridMap(d, n, std::move(bps), std::move(samples));
}

double SmoothMap::value(const std::vector<double>& s, int component) const {
    double acc = 0.0;
    for (const auto& [comp, coef, exps] : terms) {
        if (comp != component) continue;
        double t = coef;
        for (int j = 0; j < d; ++j) {
            const int e = exps[static_cast<std::size_t>(j)];
            for (int k = 0; k < e; ++k) t *= s[static_cast<std::size_t>(j)];
        }
        acc += t;
    }
    return acc;
}

GridMap SmoothMap::sample(const std::vector<int>& cells) const {
    auto bps = uniform_breakpoints(cells);
    std::vector<int> extents;
    std::size_t total = static_cast<std::size_t>(n);
    for (const auto& bp : bps) {
        extents.push_back(static_cast<int>(bp.size()));
        total *= bp.size();
    }
    std::vector<double> samples(total);
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    std::vector<double> s(static_cast<std::size_t>(d), 0.0);
    std::size_t flat = 0;
    do {
        for (int j = 0; j < d; ++j)
            s[static_cast<std::size_t>(j)] =
                bps[static_cast<std::size_t>(j)]
                   [static_cast<std::size_t>(v[static_cast<std::size_t>(j)])];
        for (int c = 0; c < n; ++c)
            samples[flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] =
                value(s, c);
        ++flat;
    } while (next_multi_index(v, extents));
    return GridMap(d, n, std::move(bps), std::move(samples));
}

SmoothMap random_smooth_map(std::mt19937_64& rng, int d, int n, int terms_per_component) {
    SmoothMap m;
    m.d = d;
    m.n = n;
    for (int c = 0; c < n; ++c)
        for (int t = 0; t < terms_per_component; ++t) {
            std::vector<int> exps(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j) exps[static_cast<std::size_t>(j)] = uniform_int(rng, 0, 3);
            m.terms.emplace_back(c, uniform(rng, -1.0, 1.0), std::move(exps));
        }
    return m;
}

JacobianField random_field(std::mt19937_64& rng, int d, int n, const std::vector<int>& cells,
                           double scale) {
    JacobianField f;
    f.d = d;
    f.n = n;
    f.cells_per_axis = cells;
    f.axis_increments.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        f.axis_increments[static_cast<std::size_t>(j)].assign(
            static_cast<std::size_t>(cells[static_cast<std::size_t>(j)]),
            1.0 / cells[static_cast<std::size_t>(j)]);
    f.minors.resize(f.cell_total() * static_cast<std::size_t>(f.num_minors()));
    for (double& v : f.minors) v = uniform(rng, -scale, scale);
    return f;
}

JacobianField perturb_field(std::mt19937_64& rng, const JacobianField& f, double epsilon) {
    JacobianField g = f;
    for (double& v : g.minors) v += uniform(rng, -epsilon, epsilon);
    return g;
}

Permutation random_permutation(std::mt19937_64& rng, int m) {
    std::vector<int> img(static_cast<std::size_t>(m));
    std::iota(img.begin(), img.end(), 1);
    std::shuffle(img.begin(), img.end(), rng);
    Permutation p;
    p.images = std::move(img);
    return p;
}

LevelIndex random_level_index(std::mt19937_64& rng, int d, int n, int m) {
    const auto injections = enumerate_injections(d, n);
    std::vector<OrderedInjection> forms(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        forms[static_cast<std::size_t>(i)] =
            injections[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(injections.size()) - 1))];
    PermutationTuple tuple;
    tuple.components.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        tuple.components[static_cast<std::size_t>(j)] = random_permutation(rng, m);
    return LevelIndex(std::move(forms), std::move(tuple));
}

PathSamples random_path(std::mt19937_64& rng, int n, int segments) {
    std::vector<double> times(static_cast<std::size_t>(segments) + 1);
    for (int k = 0; k <= segments; ++k)
        times[static_cast<std::size_t>(k)] = static_cast<double>(k) / segments;
    times.back() = 1.0;
    std::vector<std::vector<double>> values(times.size(),
                                            std::vector<double>(static_cast<std::size_t>(n)));
    for (int c = 0; c < n; ++c) values[0][static_cast<std::size_t>(c)] = uniform(rng, -1.0, 1.0);
    for (std::size_t k = 1; k < values.size(); ++k)
        for (int c = 0; c < n; ++c)
            values[k][static_cast<std::size_t>(c)] =
                values[k - 1][static_cast<std::size_t>(c)] + uniform(rng, -1.0, 1.0);
    return PathSamples(std::move(times), std::move(values));
}

PathSamples out_and_back_path(std::mt19937_64& rng, int n, int segments) {
    const int total = 2 * segments;
    std::vector<double> times(static_cast<std::size_t>(total) + 1);
    for (int k = 0; k <= total; ++k)
        times[static_cast<std::size_t>(k)] = static_cast<double>(k) / total;
    times.back() = 1.0;
    std::vector<std::vector<double>> values(times.size(),
                                            std::vector<double>(static_cast<std::size_t>(n)));
    for (int c = 0; c < n; ++c) values[0][static_cast<std::size_t>(c)] = uniform(rng, -1.0, 1.0);
    for (int k = 1; k <= segments; ++k)
        for (int c = 0; c < n; ++c)
            values[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] =
                values[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(c)] +
                uniform(rng, -1.0, 1.0);
    // exact retrace
    for (int k = 1; k <= segments; ++k)
        values[static_cast<std::size_t>(segments + k)] =
            values[static_cast<std::size_t>(segments - k)];
    return PathSamples(std::move(times), std::move(values));
}

std::vector<double> random_relabeling(std::mt19937_64& rng, std::size_t count) {
    std::vector<double> inner(count - 2);
    for (double& t : inner) t = uniform(rng, 0.02, 0.98);
    std::sort(inner.begin(), inner.end());
    for (std::size_t k = 1; k < inner.size(); ++k)
        if (inner[k] <= inner[k - 1]) inner[k] = inner[k - 1] + 1e-6;
    std::vector<double> out;
    out.push_back(0.0);
    for (double t : inner) out.push_back(t);
    out.push_back(1.0);
    return out;
}

std::vector<HyperoctahedralElement> enumerate_hyperoctahedral(int d) {
    std::vector<HyperoctahedralElement> out;
    for (const auto& sigma : enumerate_permutations(d)) {
        for (int mask = 0; mask < (1 << d); ++mask) {
            std::vector<std::uint8_t> tau(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j)
                tau[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((mask >> j) & 1);
            out.emplace_back(std::move(tau), sigma);
        }
    }
    return out;
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = uniform(rng, -1.0, 1.0);
    return m;
}

std::map<std::string, double> load_tolerances(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw InvalidInput("cannot open tolerance config " + config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(config_path + ": " + e.what());
    }
    std::map<std::string, double> out;
    for (const auto& [k, v] : j.at("tolerances").items()) out[k] = v.get<double>();
    return out;
}

namespace {

GridMap apply_linear(const Matrix& a, const GridMap& x) {
    const int n_out = a.rows;
    std::vector<double> samples(x.vertex_total() * static_cast<std::size_t>(n_out), 0.0);
    const auto counts = x.vertex_counts();
    std::vector<int> v(static_cast<std::size_t>(x.d()), 0);
    std::size_t flat = 0;
    do {
        for (int r = 0; r < n_out; ++r) {
            double acc = 0.0;
            for (int c = 0; c < x.n(); ++c) acc += a(r, c) * x.at(v, c);
            samples[flat * static_cast<std::size_t>(n_out) + static_cast<std::size_t>(r)] = acc;
        }
        ++flat;
    } while (next_multi_index(v, counts));
    return GridMap(x.d(), n_out, x.breakpoints(), std::move(samples));
}

double tensor_max_diff(const GradedTensor& a, const GradedTensor& b) {
    double mx = std::abs(a.level0 - b.level0);
    for (const auto& [idx, v] : a.coeffs) mx = std::max(mx, std::abs(v - b.at(idx)));
    for (const auto& [idx, v] : b.coeffs) mx = std::max(mx, std::abs(v - a.at(idx)));
    return mx;
}

GradedTensor tensor_diff(const GradedTensor& a, const GradedTensor& b) {
    GradedTensor diff(a.d, a.n, a.level0 - b.level0);
    for (const auto& [idx, v] : a.coeffs) diff.add(idx, v);
    for (const auto& [idx, v] : b.coeffs) diff.add(idx, -v);
    return diff;
}

struct SuiteContext {
    const VerifyOptions& opts;
    std::mt19937_64 rng;
    std::vector<VerifyEntry> entries;

    double tol(const std::string& name) const {
        const auto it = opts.tolerances.find(name);
        if (it == opts.tolerances.end())
            throw InvalidInput("tolerance table is missing entry " + name);
        return it->second;
    }

    void record_le(const std::string& name, double observed) {
        const double t = tol(name);
        entries.push_back({name, observed, t, "le", observed <= t});
    }
    void record_ge(const std::string& name, double observed) {
        const double t = tol(name);
        entries.push_back({name, observed, t, "ge", observed >= t});
    }
};

void check_permutation_invariance(SuiteContext& ctx) {
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 2 + (trial % 2);
        const JacobianField f = random_field(ctx.rng, 2, 3, {5, 5});
        const LevelIndex idx = random_level_index(ctx.rng, 2, 3, m);
        const Permutation sigma = random_permutation(ctx.rng, m);
        const auto [forms_side, perms_side] = act_on_level_index(sigma, idx);
        const double lhs = monomial(f, forms_side, {}, std::nullopt, ctx.opts.budget);
        const double rhs = monomial(f, perms_side, {}, std::nullopt, ctx.opts.budget);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    ctx.record_le("permutation_invariance", worst);
}

void check_bd_equivariance(SuiteContext& ctx) {
    double worst = 0.0;
    const GridMap x = random_nonuniform_grid_map(ctx.rng, 2, 3, {4, 5});
    const JacobianField fx = jacobian_field(x);
    const GradedTensor sig_x = signature(fx, 2, {}, ctx.opts.budget);
    for (const auto& g : enumerate_hyperoctahedral(2)) {
        const LevelIndex idx = random_level_index(ctx.rng, 2, 3, 2);
        const GridMap moved = bd_transform(x, g);
        const double lhs =
            monomial(jacobian_field(moved), idx, {}, std::nullopt, ctx.opts.budget);
        auto [pi, sign] = bd_act_on_perms(g, idx.perms);
        if (ctx.opts.tamper_bd_sign) sign = -sign;
        const double rhs = sign * monomial(fx, LevelIndex(idx.forms, std::move(pi)), {},
                                           std::nullopt, ctx.opts.budget);
        worst = std::max(worst, std::abs(lhs - rhs));
        // tensor-level action
        GradedTensor acted = bd_act(g, sig_x);
        if (ctx.opts.tamper_bd_sign)
            for (auto& [k, v] : acted.coeffs) v = -v;
        const GradedTensor sig_moved = signature(jacobian_field(moved), 2, {}, ctx.opts.budget);
        worst = std::max(worst, tensor_max_diff(sig_moved, acted));
    }
    ctx.record_le("bd_equivariance", worst);
}

void check_reparametrization(SuiteContext& ctx) {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const GridMap x = random_grid_map(ctx.rng, 2, 3, {5, 4});
        std::vector<std::vector<double>> rel;
        for (int j = 0; j < 2; ++j)
            rel.push_back(
                random_relabeling(ctx.rng, x.breakpoints()[static_cast<std::size_t>(j)].size()));
        const GridMap y = reparametrize(x, rel);
        const GradedTensor sx = signature(jacobian_field(x), 2, {}, ctx.opts.budget);
        const GradedTensor sy = signature(jacobian_field(y), 2, {}, ctx.opts.budget);
        worst = std::max(worst, tensor_max_diff(sx, sy));
    }
    ctx.record_le("reparametrization_invariance", worst);
}

void check_path_reduction(SuiteContext& ctx) {
    double worst = 0.0;
    const PathSamples p = random_path(ctx.rng, 3, 16);
    GridMap x(1, 3, {p.times}, [&] {
        std::vector<double> flat;
        for (const auto& v : p.values) flat.insert(flat.end(), v.begin(), v.end());
        return flat;
    }());
    const JacobianField f = jacobian_field(x);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 1 + (trial % 3);
        const LevelIndex idx = random_level_index(ctx.rng, 1, 3, m);
        const double engine = monomial(f, idx, {}, std::nullopt, ctx.opts.budget);
        std::vector<int> q(static_cast<std::size_t>(m));
        for (int i = 1; i <= m; ++i)
            q[static_cast<std::size_t>(i - 1)] =
                idx.forms[static_cast<std::size_t>(idx.perms[0](i) - 1)](1);
        worst = std::max(worst, std::abs(engine - path_signature(p, q)));
    }
    ctx.record_le("path_signature_reduction", worst);
}

std::pair<GridMap, GridMap> random_composable_pair(std::mt19937_64& rng, int d, int n,
                                                   const std::vector<int>& cells, int axis) {
    GridMap x = random_grid_map(rng, d, n, cells);
    GridMap y0 = random_grid_map(rng, d, n, cells);
    // overwrite y's axis=0 face with x's axis=1 face
    const auto counts = x.vertex_counts();
    std::vector<double> samples = y0.samples();
    std::vector<int> extents = counts;
    extents[static_cast<std::size_t>(axis)] = 1;
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    do {
        std::vector<int> vx = v;
        vx[static_cast<std::size_t>(axis)] = counts[static_cast<std::size_t>(axis)] - 1;
        const std::size_t flat = y0.flat_vertex(v);
        for (int c = 0; c < n; ++c)
            samples[flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] =
                x.at(vx, c);
    } while (next_multi_index(v, extents));
    return {std::move(x), GridMap(d, n, y0.breakpoints(), std::move(samples))};
}

void check_chen(SuiteContext& ctx) {
    double worst = 0.0;
    const auto injections = enumerate_injections(2, 3);
    for (int trial = 0; trial < 12; ++trial) {
        const int axis = trial % 2;
        const int m = 1 + (trial % 3);
        auto [x, y] = random_composable_pair(ctx.rng, 2, 3, {4, 4}, axis);
        std::vector<OrderedInjection> forms(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            forms[static_cast<std::size_t>(i)] = injections[static_cast<std::size_t>(
                uniform_int(ctx.rng, 0, static_cast<int>(injections.size()) - 1))];
        const GridMap z = compose_j(x, y, axis);
        const double lhs =
            monomial(jacobian_field(z), LevelIndex(forms, PermutationTuple::identity(2, m)),
                     {}, std::nullopt, ctx.opts.budget);
        const double rhs = chen_rhs(x, y, axis, forms, m);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    ctx.record_le("chen_identity", worst);
}

void check_jacobian_equivalence(SuiteContext& ctx) {
    const GridMap x = random_grid_map(ctx.rng, 2, 3, {4, 4});
    std::vector<double> shifted = x.samples();
    const double offset[3] = {uniform(ctx.rng, -2, 2), uniform(ctx.rng, -2, 2),
                              uniform(ctx.rng, -2, 2)};
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += offset[i % 3];
    const GridMap y(2, 3, x.breakpoints(), std::move(shifted));
    const GradedTensor sx = signature(jacobian_field(x), 2, {}, ctx.opts.budget);
    const GradedTensor sy = signature(jacobian_field(y), 2, {}, ctx.opts.budget);
    ctx.record_le("jacobian_equivalence", tensor_max_diff(sx, sy));
}

void check_linear_closed_form(SuiteContext& ctx) {
    double worst = 0.0;
    const Matrix a = random_matrix(ctx.rng, 3, 2);
    const std::vector<int> cells = {6, 6};
    const GridMap x = from_linear_map(a, cells);
    const GradedTensor sig = signature(jacobian_field(x), 3, {}, ctx.opts.budget);
    const OrderedInjection all_cols = parametrization_block(2);
    for (const auto& [idx, v] : sig.coeffs) {
        const int m = idx.level();
        double expect = 1.0;
        for (const auto& p : idx.forms) expect *= submatrix_det(a, p, all_cols);
        for (int j = 0; j < 2; ++j) {
            const int nj = cells[static_cast<std::size_t>(j)];
            expect *= static_cast<double>(binomial(nj, m)) / std::pow(nj, m);
        }
        worst = std::max(worst, std::abs(v - expect));
    }
    ctx.record_le("linear_map_closed_form", worst);
}

void check_factorial_decay(SuiteContext& ctx) {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const JacobianField f = random_field(ctx.rng, 2, 3, {5, 5});
        const double big = f.max_abs_minor();
        const GradedTensor sig = signature(f, 3, {}, ctx.opts.budget);
        for (const auto& [idx, v] : sig.coeffs) {
            const int m = idx.level();
            double bound = std::pow(big, m);
            for (int j = 0; j < 2; ++j)
                for (int i = 1; i <= m; ++i) bound /= i;
            worst = std::max(worst, std::abs(v) - bound);
        }
    }
    ctx.record_le("factorial_decay", std::max(0.0, worst));
}

void check_continuity_bound(SuiteContext& ctx) {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const JacobianField f = random_field(ctx.rng, 2, 3, {5, 5});
        const JacobianField g = perturb_field(ctx.rng, f, 0.05);
        double eps = 0.0;
        for (std::size_t i = 0; i < f.minors.size(); ++i)
            eps = std::max(eps, std::abs(f.minors[i] - g.minors[i]));
        const double big = std::max(f.max_abs_minor(), g.max_abs_minor());
        const GradedTensor sf = signature(f, 3, {}, ctx.opts.budget);
        const GradedTensor sg = signature(g, 3, {}, ctx.opts.budget);
        for (const auto& [idx, v] : sf.coeffs) {
            const int m = idx.level();
            double bound = m * std::pow(big, m - 1) * eps;
            for (int j = 0; j < 2; ++j)
                for (int i = 1; i <= m; ++i) bound /= i;
            worst = std::max(worst, std::abs(v - sg.at(idx)) - bound);
        }
    }
    ctx.record_le("continuity_bound", std::max(0.0, worst));
}

double shuffle_deviation(const JacobianField& f, const Functional& a, const Functional& b,
                         std::uint64_t budget) {
    auto eval = [&](const Functional& fn) {
        double acc = 0.0;
        for (const auto& [w, idx] : fn.terms)
            acc += w * (idx.level() == 0 ? 1.0 : monomial(f, idx, {}, std::nullopt, budget));
        return acc;
    };
    const double va = eval(a);
    const double vb = eval(b);
    const double vs = eval(shuffle_product(a, b));
    return std::abs(va * vb - vs) / std::max(1.0, std::abs(va * vb));
}

void check_shuffle_convergence(SuiteContext& ctx) {
    const SmoothMap smooth = random_smooth_map(ctx.rng, 2, 3);
    std::vector<std::pair<Functional, Functional>> pairs;
    for (int k = 0; k < 4; ++k) {
        const LevelIndex ia = random_level_index(ctx.rng, 2, 3, 1);
        const LevelIndex ib = random_level_index(ctx.rng, 2, 3, 1 + (k % 2));
        pairs.emplace_back(Functional::basis(2, 3, ia), Functional::basis(2, 3, ib));
    }
    double dev_coarse = 0.0, dev_fine = 0.0;
    {
        const JacobianField f8 = jacobian_field(smooth.sample({8, 8}));
        const JacobianField f16 = jacobian_field(smooth.sample({16, 16}));
        for (const auto& [a, b] : pairs) {
            dev_coarse += shuffle_deviation(f8, a, b, ctx.opts.budget);
            dev_fine += shuffle_deviation(f16, a, b, ctx.opts.budget);
        }
    }
    const double ratio = dev_coarse / std::max(dev_fine, 1e-300);
    ctx.record_ge("shuffle_convergence_ratio", ratio);
}

void check_sum_of_paths(SuiteContext& ctx) {
    double worst = 0.0;
    std::vector<PathSamples> paths;
    paths.push_back(random_path(ctx.rng, 3, 6));
    paths.push_back(random_path(ctx.rng, 3, 5));
    const GridMap x = from_sum_of_paths(paths);
    const JacobianField f = jacobian_field(x);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + (trial % 3);
        const LevelIndex idx = random_level_index(ctx.rng, 2, 3, m);
        const double engine = monomial(f, idx, {}, std::nullopt, ctx.opts.budget);
        const double oracle = sum_of_paths_monomial(paths, idx);
        worst = std::max(worst, std::abs(engine - oracle));
    }
    ctx.record_le("sum_of_paths", worst);
}

void check_trivial_signature(SuiteContext& ctx) {
    // the closed form with the group-like path signature: a tree-like
    // component cancels every coefficient through Chen inversion
    std::vector<PathSamples> paths;
    paths.push_back(out_and_back_path(ctx.rng, 3, 4));
    paths.push_back(random_path(ctx.rng, 3, 6));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + (trial % 3);
        const LevelIndex idx = random_level_index(ctx.rng, 2, 3, m);
        worst = std::max(worst, std::abs(sum_of_paths_monomial(
                                    paths, idx, PathSignatureKind::PiecewiseLinear)));
    }
    ctx.record_le("trivial_signature", worst);
}

void check_gl_equivariance(SuiteContext& ctx) {
    double worst = 0.0;
    const GridMap x = random_grid_map(ctx.rng, 2, 3, {4, 4});
    const GradedTensor sig_x = signature(jacobian_field(x), 2, {}, ctx.opts.budget);
    std::vector<Matrix> mats;
    for (int k = 0; k < 3; ++k) mats.push_back(random_matrix(ctx.rng, 3, 3));
    {
        // rank-1, all compounds vanish
        Matrix r1(3, 3);
        const Matrix u = random_matrix(ctx.rng, 3, 1);
        const Matrix v = random_matrix(ctx.rng, 1, 3);
        r1 = matmul(u, v);
        mats.push_back(std::move(r1));
        mats.push_back(random_matrix(ctx.rng, 4, 3));
    }
    for (const auto& a : mats) {
        const GradedTensor lhs =
            signature(jacobian_field(apply_linear(a, x)), 2, {}, ctx.opts.budget);
        const GradedTensor rhs = induced_map(a, sig_x);
        const double denom = norm(rhs);
        worst = std::max(worst, norm(tensor_diff(lhs, rhs)) / denom);
    }
    ctx.record_le("gl_equivariance", worst);
}

void check_moment_extraction(SuiteContext& ctx) {
    double worst = 0.0;
    const SmoothMap smooth = random_smooth_map(ctx.rng, 2, 3);
    const GridMap x = smooth.sample({32, 32});
    for (const auto& c : std::vector<std::vector<int>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
        for (const auto& p : enumerate_injections(2, 3)) {
            auto [plan, func] = moment_functional(c, p, 3);
            (void)func;
            const double extracted = extract_moment(x, plan, {}, ctx.opts.budget);
            const double direct = direct_discrete_moment(x, c, p);
            worst = std::max(worst, std::abs(extracted - direct) / std::abs(direct));
        }
    }
    ctx.record_le("moment_extraction", worst);
}

void check_parametrized_equivalence(SuiteContext& ctx) {
    auto family = [](double a) {
        Matrix m(3, 2);
        m(0, 0) = a;
        m(1, 1) = 1.0 / a;
        m(2, 0) = -a;
        m(2, 1) = 1.0 / a;
        return from_linear_map(m, {5, 5});
    };
    const GradedTensor s1 = parametrized_signature(family(1.0), 2, {}, ctx.opts.budget);
    const GradedTensor s2 = parametrized_signature(family(2.0), 2, {}, ctx.opts.budget);
    ctx.record_le("parametrized_equivalence", tensor_max_diff(s1, s2));
}

void check_normalization(SuiteContext& ctx) {
    double worst = 0.0;
    const NormalizationConfig cfg;
    const JacobianField f = random_field(ctx.rng, 2, 3, {4, 4});
    GradedTensor big = signature(f, 2, {}, ctx.opts.budget);
    {
        // push the norm well past the cap
        double coeff_sq = 0.0;
        for (const auto& [k, v] : big.coeffs) coeff_sq += v * v;
        const double target = 10.0 * cfg.cap;
        const double factor = std::sqrt((target * target - 1.0) / coeff_sq);
        for (auto& [k, v] : big.coeffs) v *= factor;
    }
    const auto [normed, lambda] = normalize(big, cfg);
    worst = std::max(worst, norm(normed) - cfg.cap - 1e-9);
    if (lambda >= 1.0) worst = std::max(worst, 1.0);
    // single-level closed form
    GradedTensor single(2, 3, 1.0);
    single.add(random_level_index(ctx.rng, 2, 3, 1), 2.0 * cfg.cap);
    const auto [sn, sl] = normalize(single, cfg);
    (void)sn;
    // lambda solves level0^2 + lambda^2 (2C)^2 = C^2
    const double expect =
        std::sqrt((cfg.cap * cfg.cap - 1.0) / (4.0 * cfg.cap * cfg.cap));
    worst = std::max(worst, std::abs(sl - expect) - 1e-9);
    // below the cap nothing moves
    GradedTensor small(2, 3, 1.0);
    small.add(random_level_index(ctx.rng, 2, 3, 1), 0.5);
    const auto [tn, tl] = normalize(small, cfg);
    worst = std::max(worst, tensor_max_diff(tn, small));
    worst = std::max(worst, std::abs(tl - 1.0));
    ctx.record_le("normalization_cap", std::max(0.0, worst));
}

void check_graded_scaling(SuiteContext& ctx) {
    const GridMap x = random_grid_map(ctx.rng, 2, 3, {4, 4});
    const double nu = 0.7;
    const GradedTensor lhs = signature(jacobian_field(scale_map(x, nu)), 2, {}, ctx.opts.budget);
    const GradedTensor rhs =
        graded_scale(std::pow(nu, x.d()), signature(jacobian_field(x), 2, {}, ctx.opts.budget));
    ctx.record_le("graded_scaling", tensor_max_diff(lhs, rhs));
}

void check_mc_constant(SuiteContext& ctx) {
    double worst = 0.0;
    const Matrix a = random_matrix(ctx.rng, 3, 2);
    const GridMap x = from_linear_map(a, {4, 4});
    const JacobianField f = jacobian_field(x);
    const LevelIndex idx = random_level_index(ctx.rng, 2, 3, 2);
    const auto r1 = mc_monomial(f, idx, 2000, ctx.opts.seed + 17);
    const auto r2 = mc_monomial(f, idx, 2000, ctx.opts.seed + 17);
    worst = std::max(worst, std::abs(r1.estimate - r2.estimate));
    worst = std::max(worst, r1.std_error);
    const OrderedInjection all_cols = parametrization_block(2);
    double exact = 0.25;  // vol of the two order-2 simplices
    for (const auto& p : idx.forms) exact *= submatrix_det(a, p, all_cols);
    worst = std::max(worst, std::abs(r1.estimate - exact));
    ctx.record_le("mc_constant_exact", worst);
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& opts) {
    SuiteContext ctx{opts, std::mt19937_64(opts.seed), {}};
    check_permutation_invariance(ctx);
    check_bd_equivariance(ctx);
    check_reparametrization(ctx);
    check_path_reduction(ctx);
    check_chen(ctx);
    check_jacobian_equivalence(ctx);
    check_linear_closed_form(ctx);
    check_factorial_decay(ctx);
    check_continuity_bound(ctx);
    check_shuffle_convergence(ctx);
    check_sum_of_paths(ctx);
    check_trivial_signature(ctx);
    check_gl_equivariance(ctx);
    check_moment_extraction(ctx);
    check_parametrized_equivalence(ctx);
    check_normalization(ctx);
    check_graded_scaling(ctx);
    check_mc_constant(ctx);

    VerifyReport report;
    report.seed = opts.seed;
    report.entries = std::move(ctx.entries);
    report.all_pass = std::all_of(report.entries.begin(), report.entries.end(),
                                  [](const VerifyEntry& e) { return e.pass; });
    return report;
}

nlohmann::json report_to_json(const VerifyReport& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries)
        entries.push_back({{"name", e.name},
                           {"observed_error", e.observed},
                           {"tolerance", e.tolerance},
                           {"comparison", e.comparison},
                           {"pass", e.pass}});
    return nlohmann::json{{"schema", "cubesig-report-v1"},
                          {"seed", report.seed},
                          {"entries", std::move(entries)},
                          {"all_pass", report.all_pass}};
}

}  // namespace cubesig
