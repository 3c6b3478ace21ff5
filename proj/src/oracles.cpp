#include "cubesig/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cubesig/errors.hpp"

namespace cubesig {

double path_signature(const PathSamples& p, const std::vector<int>& multi_index) {
    const int m = static_cast<int>(multi_index.size());
    if (m == 0) return 1.0;
    const int n = p.dimension();
    for (int c : multi_index)
        if (c < 1 || c > n) throw InvalidIndex("multi-index entry out of range");
    const int segs = p.segments();
    if (segs < 1) throw InvalidInput("path needs at least one segment");

    auto increment = [&](int k, int coord) {
        return p.values[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(coord)] -
               p.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(coord)];
    };

    // F_r(k): sum over k_1 < ... < k_r with k_r = k of increment products.
    std::vector<double> prev(static_cast<std::size_t>(segs), 0.0);
    std::vector<double> cur(static_cast<std::size_t>(segs), 0.0);
    for (int r = 1; r <= m; ++r) {
        const int coord = multi_index[static_cast<std::size_t>(r - 1)] - 1;
        double running = 0.0;  // strict prefix sum of F_{r-1}
        for (int k = 0; k < segs; ++k) {
            const double factor = (r == 1) ? 1.0 : running;
            if (r > 1) running += prev[static_cast<std::size_t>(k)];
            cur[static_cast<std::size_t>(k)] = factor * increment(k, coord);
        }
        std::swap(prev, cur);
    }
    double total = 0.0;
    for (double v : prev) total += v;
    return total;
}

McResult mc_monomial(const JacobianField& f, const LevelIndex& idx, int samples,
                     std::uint64_t seed, const std::optional<SubdomainSpec>& sub,
                     TiePolicy ties) {
    const int m = idx.level();
    if (m == 0) return {1.0, 0.0};
    if (samples < 2) throw InvalidInput("monte-carlo needs at least 2 samples");
    const int d = f.d;
    if (idx.perms.arity() != d) throw InvalidIndex("index arity mismatch");

    std::vector<std::vector<double>> bp(static_cast<std::size_t>(d));
    std::vector<double> a(static_cast<std::size_t>(d), 0.0);
    std::vector<double> b(static_cast<std::size_t>(d), 1.0);
    for (int j = 0; j < d; ++j) {
        const auto& inc = f.axis_increments[static_cast<std::size_t>(j)];
        auto& bpj = bp[static_cast<std::size_t>(j)];
        bpj.resize(inc.size() + 1, 0.0);
        for (std::size_t k = 0; k < inc.size(); ++k) bpj[k + 1] = bpj[k] + inc[k];
        if (sub) {
            a[static_cast<std::size_t>(j)] =
                bpj[static_cast<std::size_t>(sub->lo[static_cast<std::size_t>(j)])];
            b[static_cast<std::size_t>(j)] =
                bpj[static_cast<std::size_t>(sub->hi[static_cast<std::size_t>(j)])];
        } else {
            b[static_cast<std::size_t>(j)] = bpj.back();
        }
    }

    double vol = 1.0;
    for (int j = 0; j < d; ++j) {
        const double w = b[static_cast<std::size_t>(j)] - a[static_cast<std::size_t>(j)];
        if (w <= 0.0) return {0.0, 0.0};
        for (int i = 1; i <= m; ++i) vol *= w / i;
    }

    const int nm = f.num_minors();
    const auto injections = enumerate_injections(d, f.n);
    std::vector<int> col(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto it = std::lower_bound(injections.begin(), injections.end(),
                                         idx.forms[static_cast<std::size_t>(i)]);
        if (it == injections.end() || !(*it == idx.forms[static_cast<std::size_t>(i)]))
            throw InvalidIndex("unknown forms entry");
        col[static_cast<std::size_t>(i)] = static_cast<int>(it - injections.begin());
    }

    std::mt19937_64 rng(seed);
    std::vector<double> draws(static_cast<std::size_t>(m));
    std::vector<std::vector<int>> cell(static_cast<std::size_t>(m),
                                       std::vector<int>(static_cast<std::size_t>(d), 0));
    // Welford accumulation; the naive sum-of-squares form cancels
    // catastrophically on near-constant integrands
    double mean = 0.0, m2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        bool dropped = false;
        for (int j = 0; j < d && !dropped; ++j) {
            std::uniform_real_distribution<double> uni(a[static_cast<std::size_t>(j)],
                                                       b[static_cast<std::size_t>(j)]);
            for (int i = 0; i < m; ++i) draws[static_cast<std::size_t>(i)] = uni(rng);
            std::sort(draws.begin(), draws.end());
            const auto& bpj = bp[static_cast<std::size_t>(j)];
            int prev_cell = -1;
            for (int r = 1; r <= m; ++r) {
                const int item = idx.perms[j](r) - 1;
                const double t = draws[static_cast<std::size_t>(r - 1)];
                int k = static_cast<int>(std::upper_bound(bpj.begin(), bpj.end(), t) -
                                         bpj.begin()) -
                        1;
                k = std::clamp(k, 0, static_cast<int>(bpj.size()) - 2);
                cell[static_cast<std::size_t>(item)][static_cast<std::size_t>(j)] = k;
                if (ties == TiePolicy::Drop && k == prev_cell) dropped = true;
                prev_cell = k;
            }
        }
        double h = 0.0;
        if (!dropped) {
            h = 1.0;
            for (int i = 0; i < m; ++i) {
                const std::size_t flat = f.flat_cell(cell[static_cast<std::size_t>(i)]);
                h *= f.minors[flat * static_cast<std::size_t>(nm) +
                              static_cast<std::size_t>(col[static_cast<std::size_t>(i)])];
            }
        }
        const double delta = h - mean;
        mean += delta / (s + 1);
        m2 += delta * (h - mean);
    }
    const double var = std::max(0.0, m2 / (samples - 1));
    return {vol * mean, vol * std::sqrt(var / samples)};
}

double path_signature_pl(const PathSamples& p, const std::vector<int>& multi_index) {
    const int m = static_cast<int>(multi_index.size());
    if (m == 0) return 1.0;
    const int n = p.dimension();
    for (int c : multi_index)
        if (c < 1 || c > n) throw InvalidIndex("multi-index entry out of range");
    const int segs = p.segments();
    if (segs < 1) throw InvalidInput("path needs at least one segment");

    // Chen extension segment by segment: state[q] is the signature of the
    // consumed prefix at the multi-index's first q entries; one linear
    // segment with increment delta contributes delta products over all
    // within-segment orderings, i.e. divided factorials.
    std::vector<double> state(static_cast<std::size_t>(m) + 1, 0.0);
    state[0] = 1.0;
    std::vector<double> next(state.size(), 0.0);
    for (int k = 0; k < segs; ++k) {
        for (int q = 0; q <= m; ++q) {
            double acc = 0.0;
            double tail = 1.0;  // product of increments (r+1..q) over (q-r)!
            for (int r = q; r >= 0; --r) {
                acc += state[static_cast<std::size_t>(r)] * tail;
                if (r > 0) {
                    const int coord = multi_index[static_cast<std::size_t>(r - 1)] - 1;
                    const double inc =
                        p.values[static_cast<std::size_t>(k + 1)]
                                [static_cast<std::size_t>(coord)] -
                        p.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(coord)];
                    tail *= inc / (q - r + 1);
                }
            }
            next[static_cast<std::size_t>(q)] = acc;
        }
        std::swap(state, next);
    }
    return state[static_cast<std::size_t>(m)];
}

double sum_of_paths_monomial(const std::vector<PathSamples>& paths, const LevelIndex& idx,
                             PathSignatureKind kind) {
    const int d = static_cast<int>(paths.size());
    const int m = idx.level();
    if (m == 0) return 1.0;
    if (idx.perms.arity() != d) throw InvalidIndex("index arity must equal path count");
    const int n = paths.front().dimension();
    for (const auto& p : paths)
        if (p.dimension() != n) throw InvalidInput("paths must share codomain dimension");

    const auto sigma_choices = enumerate_permutations(d);
    std::vector<Permutation> inverses;
    inverses.reserve(sigma_choices.size());
    for (const auto& s : sigma_choices) inverses.push_back(s.inverse());

    std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);  // sigma_i per item
    double total = 0.0;
    while (true) {
        int parity = 0;
        for (int i = 0; i < m; ++i)
            parity ^= sigma_choices[pick[static_cast<std::size_t>(i)]].parity();
        double prod = 1.0;
        for (int j = 1; j <= d && prod != 0.0; ++j) {
            std::vector<int> q(static_cast<std::size_t>(m));
            for (int i = 1; i <= m; ++i) {
                const int item = idx.perms[j - 1](i);
                const Permutation& sinv = inverses[pick[static_cast<std::size_t>(item - 1)]];
                q[static_cast<std::size_t>(i - 1)] =
                    idx.forms[static_cast<std::size_t>(item - 1)](sinv(j));
            }
            prod *= kind == PathSignatureKind::Strict
                        ? path_signature(paths[static_cast<std::size_t>(j - 1)], q)
                        : path_signature_pl(paths[static_cast<std::size_t>(j - 1)], q);
        }
        total += (parity ? -1.0 : 1.0) * prod;
        int i = m - 1;
        while (i >= 0 && ++pick[static_cast<std::size_t>(i)] == sigma_choices.size()) {
            pick[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return total;
}

namespace {

void require_composable(const GridMap& x, const GridMap& y, int axis, double face_tol) {
    if (x.d() != y.d() || x.n() != y.n())
        throw IncompatibleGrids("maps must share (d, n)");
    if (x.breakpoints() != y.breakpoints())
        throw IncompatibleGrids("maps must share breakpoints");
    if (axis < 0 || axis >= x.d()) throw InvalidInput("axis out of range");
    const auto counts = x.vertex_counts();
    std::vector<int> extents = counts;
    extents[static_cast<std::size_t>(axis)] = 1;
    std::vector<int> v(static_cast<std::size_t>(x.d()), 0);
    do {
        std::vector<int> vx = v;
        vx[static_cast<std::size_t>(axis)] = counts[static_cast<std::size_t>(axis)] - 1;
        for (int c = 0; c < x.n(); ++c)
            if (std::abs(x.at(vx, c) - y.at(v, c)) > face_tol)
                throw NotComposable("faces differ beyond tolerance along axis " +
                                    std::to_string(axis));
    } while (next_multi_index(v, extents));
}

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

// Direct sum over the split domain: along the composition axis the first r
// items chain inside x's cells and the rest inside y's independently; every
// other axis chains all m items together. Identity ordering throughout.
struct SplitSum {
    const JacobianField& fx;
    const JacobianField& fy;
    const std::vector<int>& col;
    int d, m, r, axis;
    int nm = 0;
    std::vector<std::size_t> stride;
    std::vector<std::size_t> item_flat;
    CompensatedSum acc;

    SplitSum(const JacobianField& fx_, const JacobianField& fy_, const std::vector<int>& col_,
             int r_, int axis_)
        : fx(fx_), fy(fy_), col(col_), d(fx_.d), m(static_cast<int>(col_.size())), r(r_),
          axis(axis_) {}

    void run() {
        stride.assign(static_cast<std::size_t>(d), 1);
        for (int j = d - 2; j >= 0; --j)
            stride[static_cast<std::size_t>(j)] =
                stride[static_cast<std::size_t>(j + 1)] *
                static_cast<std::size_t>(fx.cells_per_axis[static_cast<std::size_t>(j + 1)]);
        item_flat.assign(static_cast<std::size_t>(m), 0);
        nm = fx.num_minors();
        next_axis(0, 1.0);
    }

    void next_axis(int j, double w) {
        if (j == d) {
            double prod = w;
            for (int i = 0; i < m; ++i) {
                const JacobianField& f = i < r ? fx : fy;
                prod *= f.minors[item_flat[static_cast<std::size_t>(i)] *
                                     static_cast<std::size_t>(nm) +
                                 static_cast<std::size_t>(col[static_cast<std::size_t>(i)])];
            }
            acc.add(prod);
            return;
        }
        if (j == axis) {
            chain(j, 0, r, 0, w, [this, j](double w2) {
                chain(j, r, m, 0, w2, [this, j](double w3) { next_axis(j + 1, w3); });
            });
        } else {
            chain(j, 0, m, 0, w, [this, j](double w2) { next_axis(j + 1, w2); });
        }
    }

    template <typename Next>
    void chain(int j, int first, int last, int vmin, double w, Next&& next) {
        if (first == last) {
            next(w);
            return;
        }
        const auto& inc = fx.axis_increments[static_cast<std::size_t>(j)];
        const int cells = fx.cells_per_axis[static_cast<std::size_t>(j)];
        const std::size_t step = stride[static_cast<std::size_t>(j)];
        const int remaining = last - first - 1;
        for (int v = vmin; v <= cells - 1 - remaining; ++v) {
            item_flat[static_cast<std::size_t>(first)] += static_cast<std::size_t>(v) * step;
            chain(j, first + 1, last, v + 1, w * inc[static_cast<std::size_t>(v)], next);
            item_flat[static_cast<std::size_t>(first)] -= static_cast<std::size_t>(v) * step;
        }
    }
};

}  // namespace

double chen_rhs(const GridMap& x, const GridMap& y, int axis,
                const std::vector<OrderedInjection>& forms, int level, double face_tol) {
    require_composable(x, y, axis, face_tol);
    const int m = level;
    if (static_cast<int>(forms.size()) != m)
        throw InvalidIndex("forms count must equal level");
    if (m == 0) return 1.0;
    const JacobianField fx = jacobian_field(x);
    const JacobianField fy = jacobian_field(y);
    const auto injections = enumerate_injections(fx.d, fx.n);
    std::vector<int> col(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto it = std::lower_bound(injections.begin(), injections.end(),
                                         forms[static_cast<std::size_t>(i)]);
        if (it == injections.end() || !(*it == forms[static_cast<std::size_t>(i)]))
            throw InvalidIndex("unknown forms entry");
        col[static_cast<std::size_t>(i)] = static_cast<int>(it - injections.begin());
    }
    double total = 0.0;
    for (int r = 0; r <= m; ++r) {
        SplitSum sum(fx, fy, col, r, axis);
        sum.run();
        total += sum.acc.value();
    }
    return total;
}

}  // namespace cubesig
