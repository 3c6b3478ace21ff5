#include "cubesig/indices.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cubesig/errors.hpp"

namespace cubesig {

OrderedInjection::OrderedInjection(std::vector<int> img) : image(std::move(img)) {
    for (std::size_t k = 0; k < image.size(); ++k) {
        if (image[k] < 1) throw InvalidIndex("injection entries must be >= 1");
        if (k > 0 && image[k] <= image[k - 1])
            throw InvalidIndex("injection image must be strictly increasing");
    }
}

Permutation::Permutation(std::vector<int> img) : images(std::move(img)) {
    const int m = degree();
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (int v : images) {
        if (v < 1 || v > m || seen[static_cast<std::size_t>(v - 1)])
            throw InvalidIndex("not a permutation of [m]");
        seen[static_cast<std::size_t>(v - 1)] = 1;
    }
}

Permutation Permutation::identity(int m) {
    std::vector<int> img(static_cast<std::size_t>(m));
    std::iota(img.begin(), img.end(), 1);
    Permutation p;
    p.images = std::move(img);
    return p;
}

Permutation Permutation::inverse() const {
    Permutation inv;
    inv.images.resize(images.size());
    for (int i = 1; i <= degree(); ++i)
        inv.images[static_cast<std::size_t>((*this)(i) - 1)] = i;
    return inv;
}

int Permutation::parity() const {
    int inversions = 0;
    const int m = degree();
    for (int i = 0; i < m; ++i)
        for (int k = i + 1; k < m; ++k)
            if (images[static_cast<std::size_t>(i)] > images[static_cast<std::size_t>(k)])
                ++inversions;
    return inversions & 1;
}

bool Permutation::is_identity() const {
    for (int i = 1; i <= degree(); ++i)
        if ((*this)(i) != i) return false;
    return true;
}

Permutation compose(const Permutation& sigma, const Permutation& pi) {
    if (sigma.degree() != pi.degree())
        throw InvalidIndex("composition requires equal degrees");
    Permutation out;
    out.images.resize(pi.images.size());
    for (int i = 1; i <= pi.degree(); ++i)
        out.images[static_cast<std::size_t>(i - 1)] = sigma(pi(i));
    return out;
}

Permutation reverse_permutation(const Permutation& pi) {
    const int m = pi.degree();
    Permutation out;
    out.images.resize(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i)
        out.images[static_cast<std::size_t>(i - 1)] = pi(m + 1 - i);
    return out;
}

PermutationTuple::PermutationTuple(std::vector<Permutation> comps)
    : components(std::move(comps)) {
    for (const auto& c : components)
        if (c.degree() != degree())
            throw InvalidIndex("permutation tuple components must share degree");
}

PermutationTuple PermutationTuple::identity(int d, int m) {
    PermutationTuple t;
    t.components.assign(static_cast<std::size_t>(d), Permutation::identity(m));
    return t;
}

LevelIndex::LevelIndex(std::vector<OrderedInjection> f, PermutationTuple p)
    : forms(std::move(f)), perms(std::move(p)) {
    if (static_cast<int>(forms.size()) != perms.degree())
        throw InvalidIndex("forms length must equal permutation degree");
    for (const auto& inj : forms)
        if (inj.degree() != forms.front().degree())
            throw InvalidIndex("forms must share degree d");
}

HyperoctahedralElement::HyperoctahedralElement(std::vector<std::uint8_t> refl, Permutation rot)
    : reflections(std::move(refl)), rotation(std::move(rot)) {
    if (static_cast<int>(reflections.size()) != rotation.degree())
        throw InvalidIndex("reflection count must equal rotation degree");
}

HyperoctahedralElement HyperoctahedralElement::identity(int d) {
    return {std::vector<std::uint8_t>(static_cast<std::size_t>(d), 0),
            Permutation::identity(d)};
}

int HyperoctahedralElement::reflection_count() const {
    int c = 0;
    for (auto b : reflections) c += b ? 1 : 0;
    return c;
}

HyperoctahedralElement mul(const HyperoctahedralElement& g1, const HyperoctahedralElement& g2) {
    if (g1.dimension() != g2.dimension())
        throw InvalidIndex("hyperoctahedral product requires equal dimensions");
    const int d = g1.dimension();
    // rho(g1) o rho(g2) sends s_j to s_{sigma2(sigma1(j))} with exponent
    // tau2(sigma2 sigma1(j)) xor tau1(sigma1(j)).
    Permutation sigma3 = compose(g2.rotation, g1.rotation);
    const Permutation inv2 = g2.rotation.inverse();
    std::vector<std::uint8_t> tau3(static_cast<std::size_t>(d));
    for (int k = 1; k <= d; ++k) {
        const std::uint8_t a = g2.reflections[static_cast<std::size_t>(k - 1)];
        const std::uint8_t b = g1.reflections[static_cast<std::size_t>(inv2(k) - 1)];
        tau3[static_cast<std::size_t>(k - 1)] = a ^ b;
    }
    return {std::move(tau3), std::move(sigma3)};
}

HyperoctahedralElement inverse(const HyperoctahedralElement& g) {
    const int d = g.dimension();
    std::vector<std::uint8_t> tau(static_cast<std::size_t>(d));
    for (int j = 1; j <= d; ++j)
        tau[static_cast<std::size_t>(j - 1)] =
            g.reflections[static_cast<std::size_t>(g.rotation(j) - 1)];
    return {std::move(tau), g.rotation.inverse()};
}

std::vector<OrderedInjection> enumerate_injections(int d, int n) {
    if (d < 1 || n < 1 || d > n)
        throw InvalidDimension("enumerate_injections requires 1 <= d <= n, got d=" +
                               std::to_string(d) + " n=" + std::to_string(n));
    std::vector<OrderedInjection> out;
    out.reserve(binomial(n, d));
    std::vector<int> cur(static_cast<std::size_t>(d));
    std::iota(cur.begin(), cur.end(), 1);
    while (true) {
        OrderedInjection inj;
        inj.image = cur;
        out.push_back(std::move(inj));
        // next lexicographic d-combination of [1..n]
        int i = d - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - (d - 1 - i)) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < d; ++k)
            cur[static_cast<std::size_t>(k)] = cur[static_cast<std::size_t>(k - 1)] + 1;
    }
    return out;
}

std::vector<Permutation> enumerate_permutations(int m) {
    std::vector<int> img(static_cast<std::size_t>(m));
    std::iota(img.begin(), img.end(), 1);
    std::vector<Permutation> out;
    do {
        Permutation p;
        p.images = img;
        out.push_back(std::move(p));
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

std::vector<Permutation> enumerate_shuffles(int p, int q) {
    if (p < 0 || q < 0) throw InvalidIndex("shuffle block sizes must be >= 0");
    const int m = p + q;
    std::vector<Permutation> out;
    out.reserve(binomial(m, p));
    // Choose the positions sigma^-1(1..p) as a p-subset of [m]; the rest
    // carry the second block in order.
    std::vector<int> pos(static_cast<std::size_t>(p));
    std::iota(pos.begin(), pos.end(), 1);
    while (true) {
        std::vector<int> inv_images(static_cast<std::size_t>(m), 0);
        std::vector<char> taken(static_cast<std::size_t>(m), 0);
        for (int k = 0; k < p; ++k) {
            inv_images[static_cast<std::size_t>(k)] = pos[static_cast<std::size_t>(k)];
            taken[static_cast<std::size_t>(pos[static_cast<std::size_t>(k)] - 1)] = 1;
        }
        int slot = 0;
        for (int k = 0; k < q; ++k) {
            while (taken[static_cast<std::size_t>(slot)]) ++slot;
            inv_images[static_cast<std::size_t>(p + k)] = slot + 1;
            taken[static_cast<std::size_t>(slot)] = 1;
        }
        Permutation inv;
        inv.images = std::move(inv_images);
        out.push_back(inv.inverse());
        if (p == 0) break;
        int i = p - 1;
        while (i >= 0 && pos[static_cast<std::size_t>(i)] == m - (p - 1 - i)) --i;
        if (i < 0) break;
        ++pos[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < p; ++k)
            pos[static_cast<std::size_t>(k)] = pos[static_cast<std::size_t>(k - 1)] + 1;
    }
    return out;
}

std::pair<LevelIndex, LevelIndex> act_on_level_index(const Permutation& sigma,
                                                     const LevelIndex& idx) {
    if (sigma.degree() != idx.level())
        throw InvalidIndex("permutation degree must equal index level");
    const int m = idx.level();
    LevelIndex forms_side = idx;
    for (int i = 1; i <= m; ++i)
        forms_side.forms[static_cast<std::size_t>(i - 1)] =
            idx.forms[static_cast<std::size_t>(sigma(i) - 1)];
    LevelIndex perms_side = idx;
    for (auto& component : perms_side.perms.components)
        component = compose(sigma, component);
    return {std::move(forms_side), std::move(perms_side)};
}

std::pair<PermutationTuple, int> bd_act_on_perms(const HyperoctahedralElement& g,
                                                 const PermutationTuple& pi) {
    if (g.dimension() != pi.arity())
        throw InvalidIndex("group element dimension must equal tuple arity");
    const int d = pi.arity();
    const int m = pi.degree();
    PermutationTuple out;
    out.components.resize(static_cast<std::size_t>(d));
    for (int j = 1; j <= d; ++j) {
        const int src = g.rotation(j);
        const Permutation& comp = pi[src - 1];
        out.components[static_cast<std::size_t>(j - 1)] =
            g.reflections[static_cast<std::size_t>(src - 1)] ? reverse_permutation(comp) : comp;
    }
    const int exponent = m * (g.reflection_count() + g.rotation.parity());
    return {std::move(out), (exponent & 1) ? -1 : 1};
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

}  // namespace cubesig
