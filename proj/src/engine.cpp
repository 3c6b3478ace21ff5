#include "cubesig/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "cubesig/errors.hpp"
#include "cubesig/oracles.hpp"

namespace cubesig {

namespace {

void validate_index(const JacobianField& f, const LevelIndex& idx) {
    const int m = idx.level();
    if (m == 0) return;
    if (idx.perms.arity() != f.d)
        throw InvalidIndex("permutation tuple arity must equal field dimension");
    for (const auto& inj : idx.forms) {
        if (inj.degree() != f.d) throw InvalidIndex("forms degree must equal field d");
        if (inj.image.back() > f.n) throw InvalidIndex("forms entry exceeds codomain n");
    }
}

std::pair<std::vector<int>, std::vector<int>> cell_ranges(
    const JacobianField& f, const std::optional<SubdomainSpec>& sub) {
    std::vector<int> lo(static_cast<std::size_t>(f.d), 0);
    std::vector<int> hi = f.cells_per_axis;
    if (sub) {
        if (static_cast<int>(sub->lo.size()) != f.d)
            throw InvalidIndex("subdomain arity must equal field dimension");
        for (int j = 0; j < f.d; ++j) {
            lo[static_cast<std::size_t>(j)] = sub->lo[static_cast<std::size_t>(j)];
            hi[static_cast<std::size_t>(j)] = sub->hi[static_cast<std::size_t>(j)];
            if (hi[static_cast<std::size_t>(j)] >
                f.cells_per_axis[static_cast<std::size_t>(j)])
                throw InvalidIndex("subdomain exceeds grid on axis " + std::to_string(j));
        }
    }
    return {std::move(lo), std::move(hi)};
}

long double grid_term_count(const std::vector<int>& lo, const std::vector<int>& hi, int m) {
    long double total = 1.0L;
    for (std::size_t j = 0; j < lo.size(); ++j) {
        const int span = hi[j] - lo[j];
        if (span < m) return 0.0L;
        long double c = 1.0L;
        for (int i = 1; i <= m; ++i) c = c * (span - m + i) / i;
        total *= c;
    }
    return total;
}

// Neumaier-compensated accumulator; plain summation drifts past 1e-12 on
// the tens of millions of terms a level-3 monomial can have.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Depth-first sum over per-axis strictly increasing cell chains. Axis j
// assigns rank r to item order[j][r]; the running weight carries the cell
// increments, so a leaf only multiplies the m minors.
struct GridSum {
    const JacobianField& field;
    std::vector<int> minor_col;         // per item
    std::vector<std::vector<int>> order;  // per axis: rank -> item
    std::vector<int> lo, hi;
    std::vector<std::size_t> stride;
    std::vector<std::size_t> item_flat;
    int d = 0, m = 0, nm = 0;
    CompensatedSum acc;

    void run() {
        stride.assign(static_cast<std::size_t>(d), 1);
        for (int j = d - 2; j >= 0; --j)
            stride[static_cast<std::size_t>(j)] =
                stride[static_cast<std::size_t>(j + 1)] *
                static_cast<std::size_t>(field.cells_per_axis[static_cast<std::size_t>(j + 1)]);
        item_flat.assign(static_cast<std::size_t>(m), 0);
        nm = field.num_minors();
        axis(0, 1.0);
    }

    void axis(int j, double w) {
        if (j == d) {
            double prod = w;
            for (int i = 0; i < m; ++i)
                prod *= field.minors[item_flat[static_cast<std::size_t>(i)] *
                                         static_cast<std::size_t>(nm) +
                                     static_cast<std::size_t>(
                                         minor_col[static_cast<std::size_t>(i)])];
            acc.add(prod);
            return;
        }
        chain(j, 0, lo[static_cast<std::size_t>(j)], w);
    }

    void chain(int j, int r, int vmin, double w) {
        if (r == m) {
            axis(j + 1, w);
            return;
        }
        const int item = order[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
        const auto& inc = field.axis_increments[static_cast<std::size_t>(j)];
        const std::size_t step = stride[static_cast<std::size_t>(j)];
        for (int v = vmin; v <= hi[static_cast<std::size_t>(j)] - (m - r); ++v) {
            item_flat[static_cast<std::size_t>(item)] += static_cast<std::size_t>(v) * step;
            chain(j, r + 1, v + 1, w * inc[static_cast<std::size_t>(v)]);
            item_flat[static_cast<std::size_t>(item)] -= static_cast<std::size_t>(v) * step;
        }
    }
};

int minor_index_of(const JacobianField& f, const OrderedInjection& p) {
    const auto injections = enumerate_injections(f.d, f.n);
    const auto it = std::lower_bound(injections.begin(), injections.end(), p);
    if (it == injections.end() || !(*it == p)) throw InvalidIndex("unknown forms entry");
    return static_cast<int>(it - injections.begin());
}

}  // namespace

double monomial(const JacobianField& f, const LevelIndex& idx, const QuadratureSpec& quad,
                const std::optional<SubdomainSpec>& sub, std::uint64_t budget) {
    const int m = idx.level();
    if (m == 0) return 1.0;
    validate_index(f, idx);

    if (quad.mode == QuadratureMode::MonteCarlo) {
        return mc_monomial(f, idx, quad.mc_samples, quad.seed, sub, TiePolicy::Include)
            .estimate;
    }

    auto [lo, hi] = cell_ranges(f, sub);
    const long double terms = grid_term_count(lo, hi, m);
    if (terms == 0.0L) return 0.0;
    if (terms > static_cast<long double>(budget))
        throw BudgetExceeded("grid monomial needs " + std::to_string(terms) +
                             " terms, budget is " + std::to_string(budget));

    const auto injections = enumerate_injections(f.d, f.n);
    GridSum sum{f, {}, {}, std::move(lo), std::move(hi), {}, {}, f.d, m, 0, {}};
    sum.minor_col.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto& p = idx.forms[static_cast<std::size_t>(i)];
        const auto it = std::lower_bound(injections.begin(), injections.end(), p);
        sum.minor_col[static_cast<std::size_t>(i)] =
            static_cast<int>(it - injections.begin());
    }
    sum.order.resize(static_cast<std::size_t>(f.d));
    for (int j = 0; j < f.d; ++j) {
        auto& ord = sum.order[static_cast<std::size_t>(j)];
        ord.resize(static_cast<std::size_t>(m));
        for (int r = 1; r <= m; ++r)
            ord[static_cast<std::size_t>(r - 1)] = idx.perms[j](r) - 1;
    }
    sum.run();
    return sum.acc.value();
}

namespace {

// every (forms, perms) combination for levels 1..max_level with forms drawn
// from the given list, in deterministic enumeration order
std::vector<LevelIndex> enumerate_level_indices(const std::vector<OrderedInjection>& choices,
                                                int d, int max_level) {
    std::vector<LevelIndex> out;
    for (int m = 1; m <= max_level; ++m) {
        const auto perms = enumerate_permutations(m);
        std::vector<std::size_t> form_pick(static_cast<std::size_t>(m), 0);
        while (true) {
            std::vector<OrderedInjection> forms(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i)
                forms[static_cast<std::size_t>(i)] =
                    choices[form_pick[static_cast<std::size_t>(i)]];
            std::vector<std::size_t> perm_pick(static_cast<std::size_t>(d), 0);
            while (true) {
                PermutationTuple tuple;
                tuple.components.resize(static_cast<std::size_t>(d));
                for (int j = 0; j < d; ++j)
                    tuple.components[static_cast<std::size_t>(j)] =
                        perms[perm_pick[static_cast<std::size_t>(j)]];
                out.emplace_back(forms, std::move(tuple));
                int j = d - 1;
                while (j >= 0 && ++perm_pick[static_cast<std::size_t>(j)] == perms.size()) {
                    perm_pick[static_cast<std::size_t>(j)] = 0;
                    --j;
                }
                if (j < 0) break;
            }
            int i = m - 1;
            while (i >= 0 && ++form_pick[static_cast<std::size_t>(i)] == choices.size()) {
                form_pick[static_cast<std::size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
        }
    }
    return out;
}

// Parallel map over coefficient indices. Each value is produced by exactly
// one worker with a fixed internal summation order, so the result does not
// depend on the worker count.
template <typename Eval>
std::vector<double> map_indices(const std::vector<LevelIndex>& indices, int threads,
                                Eval&& eval) {
    std::vector<double> values(indices.size());
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1,
                                   std::max<std::size_t>(indices.size(), 1));
    if (workers <= 1 || indices.size() < 8) {
        for (std::size_t i = 0; i < indices.size(); ++i) values[i] = eval(indices[i]);
        return values;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= indices.size()) break;
                try {
                    values[i] = eval(indices[i]);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    break;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return values;
}

}  // namespace

GradedTensor signature(const JacobianField& f, int max_level, const QuadratureSpec& quad,
                       std::uint64_t budget, int threads) {
    if (max_level < 0) throw InvalidIndex("max level must be >= 0");
    const long double nd = static_cast<long double>(binomial(f.n, f.d));
    long double coeffs = 1.0L;
    for (int i = 1; i <= max_level; ++i)
        coeffs *= nd * std::pow(static_cast<long double>(i), static_cast<long double>(f.d));
    // coeffs now equals C(n,d)^M (M!)^d
    if (coeffs > static_cast<long double>(budget))
        throw BudgetExceeded("level " + std::to_string(max_level) + " holds more than " +
                             std::to_string(budget) + " coefficients");

    const std::vector<LevelIndex> indices =
        enumerate_level_indices(enumerate_injections(f.d, f.n), f.d, max_level);
    const std::vector<double> values =
        map_indices(indices, threads, [&](const LevelIndex& idx) {
            return monomial(f, idx, quad, std::nullopt, budget);
        });
    GradedTensor out(f.d, f.n, 1.0);
    for (std::size_t i = 0; i < indices.size(); ++i) out.add(indices[i], values[i]);
    return out;
}

namespace {

void cumulative_axis(std::vector<double>& a, const std::vector<int>& ext, int axis) {
    std::size_t outer = 1, inner = 1;
    for (int j = 0; j < axis; ++j) outer *= static_cast<std::size_t>(ext[static_cast<std::size_t>(j)]);
    for (std::size_t j = static_cast<std::size_t>(axis) + 1; j < ext.size(); ++j)
        inner *= static_cast<std::size_t>(ext[j]);
    const std::size_t len = static_cast<std::size_t>(ext[static_cast<std::size_t>(axis)]);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t k = 1; k < len; ++k) {
            double* cur = a.data() + (o * len + k) * inner;
            const double* prev = a.data() + (o * len + k - 1) * inner;
            for (std::size_t i = 0; i < inner; ++i) cur[i] += prev[i];
        }
}

}  // namespace

GradedTensor identity_signature(const JacobianField& f, int max_level,
                                const std::optional<SubdomainSpec>& sub,
                                std::uint64_t budget) {
    if (max_level < 0) throw InvalidIndex("max level must be >= 0");
    auto [lo, hi] = cell_ranges(f, sub);
    const int d = f.d;
    std::vector<int> span(static_cast<std::size_t>(d));
    std::size_t cells = 1;
    for (int j = 0; j < d; ++j) {
        span[static_cast<std::size_t>(j)] =
            hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
        cells *= static_cast<std::size_t>(span[static_cast<std::size_t>(j)]);
    }

    GradedTensor out(d, f.n, 1.0);
    if (max_level == 0 || cells == 0) return out;

    const long double nd = static_cast<long double>(binomial(f.n, f.d));
    long double work = 0.0L, count = 1.0L;
    for (int m = 1; m <= max_level; ++m) {
        count *= nd;
        work += count * static_cast<long double>(cells);
    }
    if (work > static_cast<long double>(budget))
        throw BudgetExceeded("identity signature exceeds term budget");

    const auto injections = enumerate_injections(d, f.n);
    const int nm = static_cast<int>(injections.size());

    // per-cell volumes and decoded multi-indices of the subrange
    std::vector<double> vol(cells);
    std::vector<std::size_t> flat_abs(cells);
    {
        std::vector<int> c(static_cast<std::size_t>(d), 0);
        std::size_t k = 0;
        std::vector<int> abs_cell(static_cast<std::size_t>(d));
        do {
            double v = 1.0;
            for (int j = 0; j < d; ++j) {
                abs_cell[static_cast<std::size_t>(j)] =
                    lo[static_cast<std::size_t>(j)] + c[static_cast<std::size_t>(j)];
                v *= f.axis_increments[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                    abs_cell[static_cast<std::size_t>(j)])];
            }
            vol[k] = v;
            flat_abs[k] = f.flat_cell(abs_cell);
            ++k;
        } while (next_multi_index(c, span));
    }

    // strides of the subrange lattice and the componentwise "minus one"
    // lookup used to read the parent's strict prefix sum
    std::vector<std::size_t> sub_stride(static_cast<std::size_t>(d), 1);
    for (int j = d - 2; j >= 0; --j)
        sub_stride[static_cast<std::size_t>(j)] =
            sub_stride[static_cast<std::size_t>(j + 1)] *
            static_cast<std::size_t>(span[static_cast<std::size_t>(j + 1)]);

    std::vector<OrderedInjection> prefix;
    auto descend = [&](auto&& self, int level, const std::vector<double>* parent) -> void {
        for (int p = 0; p < nm; ++p) {
            std::vector<double> grid(cells);
            {
                std::vector<int> c(static_cast<std::size_t>(d), 0);
                std::size_t k = 0;
                do {
                    double from_parent = 1.0;
                    if (parent) {
                        bool interior = true;
                        std::size_t prev = 0;
                        for (int j = 0; j < d; ++j) {
                            const int cj = c[static_cast<std::size_t>(j)];
                            if (cj == 0) {
                                interior = false;
                                break;
                            }
                            prev += static_cast<std::size_t>(cj - 1) *
                                    sub_stride[static_cast<std::size_t>(j)];
                        }
                        from_parent = interior ? (*parent)[prev] : 0.0;
                    }
                    grid[k] = from_parent * f.minor_at(flat_abs[k], p) * vol[k];
                    ++k;
                } while (next_multi_index(c, span));
            }
            for (int j = 0; j < d; ++j) cumulative_axis(grid, span, j);

            prefix.push_back(injections[static_cast<std::size_t>(p)]);
            LevelIndex idx(prefix, PermutationTuple::identity(d, level));
            out.add(idx, grid.back());
            if (level < max_level) self(self, level + 1, &grid);
            prefix.pop_back();
        }
    };
    descend(descend, 1, nullptr);
    return out;
}

OrderedInjection parametrization_block(int d) {
    std::vector<int> img(static_cast<std::size_t>(d));
    std::iota(img.begin(), img.end(), 1);
    return OrderedInjection(std::move(img));
}

OrderedInjection lift_injection(const OrderedInjection& p, int d) {
    std::vector<int> img = p.image;
    for (int& v : img) v += d;
    return OrderedInjection(std::move(img));
}

GradedTensor parametrized_signature(const GridMap& x, int max_level,
                                    const QuadratureSpec& quad, std::uint64_t budget,
                                    int threads) {
    if (max_level < 0) throw InvalidIndex("max level must be >= 0");
    const int d = x.d();
    const GridMap lifted = lift_parametrized(x);
    const JacobianField lf = jacobian_field(lifted);

    std::vector<OrderedInjection> w_forms;
    w_forms.push_back(parametrization_block(d));
    for (const auto& p : enumerate_injections(d, x.n())) w_forms.push_back(lift_injection(p, d));

    long double coeffs = 1.0L;
    for (int i = 1; i <= max_level; ++i)
        coeffs *= static_cast<long double>(w_forms.size()) *
                  std::pow(static_cast<long double>(i), static_cast<long double>(d));
    if (coeffs > static_cast<long double>(budget))
        throw BudgetExceeded("parametrized signature exceeds coefficient budget");

    const std::vector<LevelIndex> indices = enumerate_level_indices(w_forms, d, max_level);
    const std::vector<double> values =
        map_indices(indices, threads, [&](const LevelIndex& idx) {
            return monomial(lf, idx, quad, std::nullopt, budget);
        });
    GradedTensor out(d, lf.n, 1.0);
    for (std::size_t i = 0; i < indices.size(); ++i) out.add(indices[i], values[i]);
    return out;
}

namespace {

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

// Solve t^c = sum_b lambda_b q_{m,b}(t) with q_{m,b}(t) = t^{b-1}(1-t)^{m-b}.
// The monomial-coefficient matrix is unit lower triangular in (degree, b-1).
std::vector<double> solve_axis_weights(int c, int m) {
    std::vector<double> lambda(static_cast<std::size_t>(m), 0.0);
    for (int g = 0; g < m; ++g) {
        double acc = (g == c) ? 1.0 : 0.0;
        for (int b = 1; b <= g; ++b) {
            // coefficient of t^g in q_{m,b}
            const int k = g - b + 1;
            const double coef =
                ((k & 1) ? -1.0 : 1.0) * static_cast<double>(binomial(m - b, k));
            acc -= coef * lambda[static_cast<std::size_t>(b - 1)];
        }
        lambda[static_cast<std::size_t>(g)] = acc;  // diagonal entry is 1
    }
    return lambda;
}

}  // namespace

std::pair<MomentPlan, Functional> moment_functional(const std::vector<int>& c,
                                                    const OrderedInjection& p, int n) {
    const int d = static_cast<int>(c.size());
    if (d < 1) throw InvalidInput("exponent tuple must be non-empty");
    for (int e : c)
        if (e < 0) throw InvalidInput("exponents must be non-negative");
    if (p.degree() != d) throw InvalidIndex("target injection degree must equal d");
    if (p.image.back() > n) throw InvalidIndex("target injection exceeds n");

    const int m = *std::max_element(c.begin(), c.end()) + 1;
    std::vector<std::vector<double>> lambda(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        lambda[static_cast<std::size_t>(j)] =
            solve_axis_weights(c[static_cast<std::size_t>(j)], m);

    MomentPlan plan;
    plan.exponents = c;
    plan.target = p;
    plan.level = m;

    Functional func(d, d + n);
    std::vector<OrderedInjection> forms(static_cast<std::size_t>(m),
                                        parametrization_block(d));
    forms.back() = lift_injection(p, d);

    std::vector<int> b(static_cast<std::size_t>(d), 1);
    std::vector<int> extents(static_cast<std::size_t>(d), m);
    std::vector<int> odo(static_cast<std::size_t>(d), 0);
    do {
        double w = 1.0;
        for (int j = 0; j < d; ++j) {
            b[static_cast<std::size_t>(j)] = odo[static_cast<std::size_t>(j)] + 1;
            const double lj =
                lambda[static_cast<std::size_t>(j)]
                      [static_cast<std::size_t>(b[static_cast<std::size_t>(j)] - 1)];
            w *= lj * factorial(b[static_cast<std::size_t>(j)] - 1) *
                 factorial(m - b[static_cast<std::size_t>(j)]);
        }
        if (w == 0.0) continue;
        plan.terms.emplace_back(w, b);
        // canonical pi per axis: slot b_j holds m, the rest stay in order
        PermutationTuple tuple;
        tuple.components.resize(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            std::vector<int> img(static_cast<std::size_t>(m));
            const int bj = b[static_cast<std::size_t>(j)];
            for (int i = 1; i <= m; ++i) {
                if (i < bj)
                    img[static_cast<std::size_t>(i - 1)] = i;
                else if (i == bj)
                    img[static_cast<std::size_t>(i - 1)] = m;
                else
                    img[static_cast<std::size_t>(i - 1)] = i - 1;
            }
            tuple.components[static_cast<std::size_t>(j)] = Permutation(std::move(img));
        }
        func.terms.emplace_back(w, LevelIndex(forms, std::move(tuple)));
    } while (next_multi_index(odo, extents));
    func.canonicalize();
    return {std::move(plan), std::move(func)};
}

namespace {

// Moment monomials have forms (U, ..., U, P) with J_U identically 1, so the
// strict sum reorganizes exactly: each cell of the P item is weighted by
// the count of ways to place the U items strictly below and above it per
// axis, which is a product of elementary symmetric sums of increments.
double moment_monomial_grid(const JacobianField& f, int minor_col, int m,
                            const std::vector<int>& b) {
    const int d = f.d;
    // prefix[j][k][r] = e_r over increments of cells [0, k) on axis j
    std::vector<std::vector<std::vector<double>>> prefix(static_cast<std::size_t>(d));
    std::vector<std::vector<std::vector<double>>> suffix(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const auto& inc = f.axis_increments[static_cast<std::size_t>(j)];
        const int cells = static_cast<int>(inc.size());
        auto& pre = prefix[static_cast<std::size_t>(j)];
        auto& suf = suffix[static_cast<std::size_t>(j)];
        pre.assign(static_cast<std::size_t>(cells) + 1,
                   std::vector<double>(static_cast<std::size_t>(m), 0.0));
        suf.assign(static_cast<std::size_t>(cells) + 1,
                   std::vector<double>(static_cast<std::size_t>(m), 0.0));
        pre[0][0] = 1.0;
        for (int k = 0; k < cells; ++k) {
            pre[static_cast<std::size_t>(k) + 1] = pre[static_cast<std::size_t>(k)];
            for (int r = m - 1; r >= 1; --r)
                pre[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(r)] +=
                    inc[static_cast<std::size_t>(k)] *
                    pre[static_cast<std::size_t>(k)][static_cast<std::size_t>(r - 1)];
        }
        suf[static_cast<std::size_t>(cells)][0] = 1.0;
        for (int k = cells - 1; k >= 0; --k) {
            suf[static_cast<std::size_t>(k)] = suf[static_cast<std::size_t>(k) + 1];
            for (int r = m - 1; r >= 1; --r)
                suf[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] +=
                    inc[static_cast<std::size_t>(k)] *
                    suf[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(r - 1)];
        }
    }
    double acc = 0.0;
    std::vector<int> cell(static_cast<std::size_t>(d), 0);
    std::size_t flat = 0;
    do {
        double w = f.cell_volume(cell) * f.minor_at(flat, minor_col);
        for (int j = 0; j < d && w != 0.0; ++j) {
            const int k = cell[static_cast<std::size_t>(j)];
            const int bj = b[static_cast<std::size_t>(j)];
            w *= prefix[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]
                       [static_cast<std::size_t>(bj - 1)] *
                 suffix[static_cast<std::size_t>(j)][static_cast<std::size_t>(k) + 1]
                       [static_cast<std::size_t>(m - bj)];
        }
        acc += w;
        ++flat;
    } while (next_multi_index(cell, f.cells_per_axis));
    return acc;
}

}  // namespace

double extract_moment(const GridMap& x, const MomentPlan& plan, const QuadratureSpec& quad,
                      std::uint64_t budget) {
    const int d = x.d();
    if (static_cast<int>(plan.exponents.size()) != d)
        throw InvalidIndex("plan arity must equal map dimension");
    const int m = plan.level;

    if (quad.mode == QuadratureMode::Grid) {
        const JacobianField f = jacobian_field(x);
        const int col = minor_index_of(f, plan.target);
        double acc = 0.0;
        for (const auto& [w, b] : plan.terms)
            acc += w * moment_monomial_grid(f, col, m, b);
        return acc;
    }

    const GridMap lifted = lift_parametrized(x);
    const JacobianField lf = jacobian_field(lifted);
    std::vector<OrderedInjection> forms(static_cast<std::size_t>(m),
                                        parametrization_block(d));
    forms.back() = lift_injection(plan.target, d);
    double acc = 0.0;
    for (const auto& [w, b] : plan.terms) {
        PermutationTuple tuple;
        tuple.components.resize(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            std::vector<int> img(static_cast<std::size_t>(m));
            const int bj = b[static_cast<std::size_t>(j)];
            for (int i = 1; i <= m; ++i) {
                if (i < bj)
                    img[static_cast<std::size_t>(i - 1)] = i;
                else if (i == bj)
                    img[static_cast<std::size_t>(i - 1)] = m;
                else
                    img[static_cast<std::size_t>(i - 1)] = i - 1;
            }
            tuple.components[static_cast<std::size_t>(j)] = Permutation(std::move(img));
        }
        acc += w * monomial(lf, LevelIndex(forms, std::move(tuple)), quad, std::nullopt,
                            budget);
    }
    return acc;
}

double direct_discrete_moment(const GridMap& x, const std::vector<int>& c,
                              const OrderedInjection& p) {
    if (static_cast<int>(c.size()) != x.d())
        throw InvalidIndex("exponent arity must equal map dimension");
    const JacobianField f = jacobian_field(x);
    const int col = minor_index_of(f, p);
    std::vector<int> cell(static_cast<std::size_t>(f.d), 0);
    // breakpoint prefixes per axis to evaluate cell centers
    std::vector<std::vector<double>> bp(static_cast<std::size_t>(f.d));
    for (int j = 0; j < f.d; ++j) {
        const auto& inc = f.axis_increments[static_cast<std::size_t>(j)];
        auto& b = bp[static_cast<std::size_t>(j)];
        b.resize(inc.size() + 1, 0.0);
        for (std::size_t k = 0; k < inc.size(); ++k) b[k + 1] = b[k] + inc[k];
    }
    double acc = 0.0;
    std::size_t flat = 0;
    do {
        double w = 1.0;
        for (int j = 0; j < f.d; ++j) {
            const int k = cell[static_cast<std::size_t>(j)];
            const double center = 0.5 * (bp[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] +
                                         bp[static_cast<std::size_t>(j)][static_cast<std::size_t>(k + 1)]);
            w *= std::pow(center, c[static_cast<std::size_t>(j)]);
        }
        acc += w * f.minor_at(flat, col) * f.cell_volume(cell);
        ++flat;
    } while (next_multi_index(cell, f.cells_per_axis));
    return acc;
}

}  // namespace cubesig
