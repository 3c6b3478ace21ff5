#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace cubesig {

/// Order-preserving injection P : [d] -> [n], stored as the strictly
/// increasing image sequence (1-based entries, matching the JSON layout).
struct OrderedInjection {
    std::vector<int> image;

    OrderedInjection() = default;
    explicit OrderedInjection(std::vector<int> img);

    int degree() const { return static_cast<int>(image.size()); }
    // P(k) for 1-based k.
    int operator()(int k) const { return image[static_cast<std::size_t>(k - 1)]; }

    auto operator<=>(const OrderedInjection&) const = default;
};

/// Permutation of [m] in one-line notation: images[i-1] = pi(i).
struct Permutation {
    std::vector<int> images;

    Permutation() = default;
    explicit Permutation(std::vector<int> img);

    static Permutation identity(int m);

    int degree() const { return static_cast<int>(images.size()); }
    int operator()(int i) const { return images[static_cast<std::size_t>(i - 1)]; }

    Permutation inverse() const;
    // Number of inversions mod 2 (0 even, 1 odd).
    int parity() const;
    int sign() const { return parity() == 0 ? 1 : -1; }
    bool is_identity() const;

    auto operator<=>(const Permutation&) const = default;
};

// Composition (sigma * pi)(i) = sigma(pi(i)).
Permutation compose(const Permutation& sigma, const Permutation& pi);

// Reversal pi~(i) = pi(m + 1 - i); an involution.
Permutation reverse_permutation(const Permutation& pi);

/// A d-tuple of permutations, all of the same degree m.
struct PermutationTuple {
    std::vector<Permutation> components;

    PermutationTuple() = default;
    explicit PermutationTuple(std::vector<Permutation> comps);

    static PermutationTuple identity(int d, int m);

    int arity() const { return static_cast<int>(components.size()); }
    int degree() const { return components.empty() ? 0 : components.front().degree(); }
    const Permutation& operator[](int j) const {
        return components[static_cast<std::size_t>(j)];
    }

    auto operator<=>(const PermutationTuple&) const = default;
};

/// Address of one signature coefficient: m order-preserving injections
/// (the forms index) and a d-tuple of permutations of [m].
struct LevelIndex {
    std::vector<OrderedInjection> forms;
    PermutationTuple perms;

    LevelIndex() = default;
    LevelIndex(std::vector<OrderedInjection> f, PermutationTuple p);

    int level() const { return static_cast<int>(forms.size()); }
    int arity() const { return perms.arity(); }

    auto operator<=>(const LevelIndex&) const = default;
};

/// Element of the hyperoctahedral group B_d = Z_2^d x| Sigma_d:
/// per-axis reflection bits and an axis permutation.
struct HyperoctahedralElement {
    std::vector<std::uint8_t> reflections;
    Permutation rotation;

    HyperoctahedralElement() = default;
    HyperoctahedralElement(std::vector<std::uint8_t> refl, Permutation rot);

    static HyperoctahedralElement identity(int d);

    int dimension() const { return static_cast<int>(reflections.size()); }
    int reflection_count() const;

    bool operator==(const HyperoctahedralElement&) const = default;
};

// Group product fixed so that rho(mul(g1, g2)) = rho(g1) o rho(g2), i.e.
// composing two domain moves x -> x o rho(g1) -> x o rho(g1) o rho(g2)
// equals one move by mul(g1, g2).
HyperoctahedralElement mul(const HyperoctahedralElement& g1, const HyperoctahedralElement& g2);
HyperoctahedralElement inverse(const HyperoctahedralElement& g);

// All C(n,d) order-preserving injections [d] -> [n], lexicographic.
std::vector<OrderedInjection> enumerate_injections(int d, int n);

// All m! permutations of [m], lexicographic in one-line notation.
std::vector<Permutation> enumerate_permutations(int m);

// All (p,q)-shuffles: sigma in Sigma_{p+q} whose preimage chains
// sigma^-1(1..p) and sigma^-1(p+1..p+q) are each increasing.
std::vector<Permutation> enumerate_shuffles(int p, int q);

// The two equal-by-permutation-invariance relabelings of a level index:
// first (sigma.forms, pi), second (forms, sigma.pi).
std::pair<LevelIndex, LevelIndex> act_on_level_index(const Permutation& sigma,
                                                     const LevelIndex& idx);

// Index action pi -> pi_sigma^tau: component j becomes pi_{sigma(j)},
// reversed when tau_{sigma(j)} = 1. The sign is
// (-1)^{m(|tau| + parity(sigma))}. Composes against mul as
// act(act(pi, g2), g1) = act(pi, mul(g1, g2)).
std::pair<PermutationTuple, int> bd_act_on_perms(const HyperoctahedralElement& g,
                                                 const PermutationTuple& pi);

std::uint64_t binomial(int n, int k);

}  // namespace cubesig
