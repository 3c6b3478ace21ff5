#include "cubesig/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "cubesig/errors.hpp"

namespace cubesig {

double GradedTensor::at(const LevelIndex& idx) const {
    const auto it = coeffs.find(idx);
    return it == coeffs.end() ? 0.0 : it->second;
}

void GradedTensor::add(const LevelIndex& idx, double value) {
    if (value == 0.0) return;
    coeffs[idx] += value;
}

int GradedTensor::max_level() const {
    return coeffs.empty() ? 0 : coeffs.rbegin()->first.level();
}

double inner_product(const GradedTensor& a, const GradedTensor& b) {
    double acc = a.level0 * b.level0;
    const auto& small = a.coeffs.size() <= b.coeffs.size() ? a : b;
    const auto& big = a.coeffs.size() <= b.coeffs.size() ? b : a;
    for (const auto& [idx, v] : small.coeffs) {
        const auto it = big.coeffs.find(idx);
        if (it != big.coeffs.end()) acc += v * it->second;
    }
    return acc;
}

double norm(const GradedTensor& a) { return std::sqrt(inner_product(a, a)); }

double level_norm(const GradedTensor& a, int m) {
    if (m == 0) return std::abs(a.level0);
    double sq = 0.0;
    for (const auto& [idx, v] : a.coeffs)
        if (idx.level() == m) sq += v * v;
    return std::sqrt(sq);
}

GradedTensor graded_scale(double nu, const GradedTensor& a) {
    GradedTensor out(a.d, a.n, a.level0);
    for (const auto& [idx, v] : a.coeffs) {
        const double scaled = v * std::pow(nu, idx.level());
        if (scaled != 0.0) out.coeffs.emplace(idx, scaled);
    }
    return out;
}

std::pair<GradedTensor, double> normalize(const GradedTensor& a,
                                          const NormalizationConfig& cfg) {
    if (cfg.cap <= 0.0 || cfg.tolerance <= 0.0)
        throw NumericDomainError("normalization cap and tolerance must be positive");
    if (!std::isfinite(a.level0)) throw NumericDomainError("non-finite level-0 coefficient");
    for (const auto& [idx, v] : a.coeffs) {
        (void)idx;
        if (!std::isfinite(v)) throw NumericDomainError("non-finite coefficient");
    }
    const double full = norm(a);
    if (full <= cfg.cap) return {a, 1.0};
    if (std::abs(a.level0) >= cfg.cap)
        throw NumericDomainError("level-0 mass already exceeds the cap");
    // |delta_lambda a| is strictly increasing in lambda, below cap at 0 and
    // above at 1; bisect.
    double lo = 0.0;
    double hi = 1.0;
    for (int step = 0; step < cfg.max_bisection_steps && hi - lo > cfg.tolerance; ++step) {
        const double mid = 0.5 * (lo + hi);
        if (norm(graded_scale(mid, a)) <= cfg.cap)
            lo = mid;
        else
            hi = mid;
    }
    return {graded_scale(lo, a), lo};
}

Functional Functional::basis(int d, int n, LevelIndex idx, double weight) {
    Functional f(d, n);
    f.terms.emplace_back(weight, std::move(idx));
    return f;
}

void Functional::canonicalize() {
    std::map<LevelIndex, double> merged;
    for (auto& [w, idx] : terms) merged[idx] += w;
    terms.clear();
    for (auto& [idx, w] : merged)
        if (std::abs(w) >= 1e-15) terms.emplace_back(w, idx);
}

double pair_with(const Functional& f, const GradedTensor& a) {
    double acc = 0.0;
    for (const auto& [w, idx] : f.terms)
        acc += w * (idx.level() == 0 ? a.level0 : a.at(idx));
    return acc;
}

namespace {

PermutationTuple concat_tuples(const PermutationTuple& p1, const PermutationTuple& p2) {
    const int d = p1.arity();
    const int m1 = p1.degree();
    const int m2 = p2.degree();
    PermutationTuple out;
    out.components.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        std::vector<int> img(static_cast<std::size_t>(m1 + m2));
        for (int i = 1; i <= m1; ++i) img[static_cast<std::size_t>(i - 1)] = p1[j](i);
        for (int i = 1; i <= m2; ++i)
            img[static_cast<std::size_t>(m1 + i - 1)] = p2[j](i) + m1;
        out.components[static_cast<std::size_t>(j)].images = std::move(img);
    }
    return out;
}

}  // namespace

Functional shuffle_product(const Functional& f, const Functional& g) {
    if (f.d != g.d || f.n != g.n)
        throw InvalidIndex("shuffle product requires matching (d, n)");
    const int d = f.d;
    Functional out(d, f.n);
    for (const auto& [wf, idx_f] : f.terms) {
        for (const auto& [wg, idx_g] : g.terms) {
            const int m1 = idx_f.level();
            const int m2 = idx_g.level();
            if (m1 + m2 == 0) {
                out.terms.emplace_back(wf * wg, LevelIndex{});
                continue;
            }
            std::vector<OrderedInjection> forms = idx_f.forms;
            forms.insert(forms.end(), idx_g.forms.begin(), idx_g.forms.end());
            const PermutationTuple base =
                concat_tuples(idx_f.perms.arity() ? idx_f.perms
                                                  : PermutationTuple::identity(d, 0),
                              idx_g.perms.arity() ? idx_g.perms
                                                  : PermutationTuple::identity(d, 0));
            const auto shuffles = enumerate_shuffles(m1, m2);
            // one term per element of Sh(m1, m2)^d; the product of permuted
            // simplices decomposes into the simplices (pi1||pi2) o sigma
            std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);
            while (true) {
                PermutationTuple perms;
                perms.components.resize(static_cast<std::size_t>(d));
                for (int j = 0; j < d; ++j)
                    perms.components[static_cast<std::size_t>(j)] =
                        compose(base[j], shuffles[pick[static_cast<std::size_t>(j)]]);
                out.terms.emplace_back(wf * wg, LevelIndex(forms, std::move(perms)));
                int j = d - 1;
                while (j >= 0 && ++pick[static_cast<std::size_t>(j)] == shuffles.size()) {
                    pick[static_cast<std::size_t>(j)] = 0;
                    --j;
                }
                if (j < 0) break;
            }
        }
    }
    out.canonicalize();
    return out;
}

LevelIndex orbit_representative(const LevelIndex& idx) {
    const int m = idx.level();
    if (m == 0) return idx;
    LevelIndex best = idx;
    for (const auto& sigma : enumerate_permutations(m)) {
        const Permutation inv = sigma.inverse();
        LevelIndex candidate = idx;
        for (int i = 1; i <= m; ++i)
            candidate.forms[static_cast<std::size_t>(i - 1)] =
                idx.forms[static_cast<std::size_t>(inv(i) - 1)];
        for (auto& comp : candidate.perms.components) comp = compose(sigma, comp);
        if (candidate < best) best = candidate;
    }
    return best;
}

Functional canonicalize_orbits(const Functional& f) {
    Functional out(f.d, f.n);
    for (const auto& [w, idx] : f.terms)
        out.terms.emplace_back(w, orbit_representative(idx));
    out.canonicalize();
    return out;
}

GradedTensor induced_map(const Matrix& a, const GradedTensor& t) {
    if (a.cols != t.n) throw InvalidDimension("matrix columns must equal n");
    const int d = t.d;
    if (d > std::min(a.rows, a.cols))
        throw InvalidDimension("compound order exceeds matrix size");
    const Matrix comp = compound_matrix(a, d);
    const auto out_injections = enumerate_injections(d, a.rows);
    const auto in_injections = enumerate_injections(d, t.n);
    std::map<OrderedInjection, int> col_of;
    for (std::size_t c = 0; c < in_injections.size(); ++c)
        col_of[in_injections[c]] = static_cast<int>(c);

    GradedTensor out(d, a.rows, t.level0);
    for (const auto& [idx, v] : t.coeffs) {
        const int m = idx.level();
        std::vector<int> cols(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            cols[static_cast<std::size_t>(i)] = col_of.at(idx.forms[static_cast<std::size_t>(i)]);
        std::vector<OrderedInjection> picked(static_cast<std::size_t>(m));
        auto expand = [&](auto&& self, int i, double weight) -> void {
            if (weight == 0.0) return;
            if (i == m) {
                out.add(LevelIndex(picked, idx.perms), weight);
                return;
            }
            for (std::size_t r = 0; r < out_injections.size(); ++r) {
                const double factor =
                    comp(static_cast<int>(r), cols[static_cast<std::size_t>(i)]);
                if (factor == 0.0) continue;
                picked[static_cast<std::size_t>(i)] = out_injections[r];
                self(self, i + 1, weight * factor);
            }
        };
        expand(expand, 0, v);
    }
    return out;
}

GradedTensor bd_act(const HyperoctahedralElement& g, const GradedTensor& a) {
    if (g.dimension() != a.d)
        throw InvalidIndex("group element dimension must equal tensor d");
    const HyperoctahedralElement ginv = inverse(g);
    GradedTensor out(a.d, a.n, a.level0);
    for (const auto& [idx, v] : a.coeffs) {
        auto [pi, sign] = bd_act_on_perms(ginv, idx.perms);
        LevelIndex moved = idx;
        moved.perms = std::move(pi);
        out.add(moved, sign * v);
    }
    return out;
}

}  // namespace cubesig
