#pragma once

#include <map>
#include <utility>
#include <vector>

#include "cubesig/indices.hpp"
#include "cubesig/linalg.hpp"

namespace cubesig {

/// Sparse graded coefficient container over level indices. Absent keys mean
/// coefficient zero; the level-0 slot is kept separately (convention: a
/// signature has level0 = 1).
struct GradedTensor {
    int d = 0;
    int n = 0;
    double level0 = 0.0;
    std::map<LevelIndex, double> coeffs;

    GradedTensor() = default;
    GradedTensor(int d_, int n_, double level0_ = 0.0) : d(d_), n(n_), level0(level0_) {}

    double at(const LevelIndex& idx) const;
    void add(const LevelIndex& idx, double value);
    int max_level() const;
};

double inner_product(const GradedTensor& a, const GradedTensor& b);
double norm(const GradedTensor& a);
// Euclidean norm of the level-m slice only.
double level_norm(const GradedTensor& a, int m);

// delta_nu: multiply every level-m coefficient by nu^m.
GradedTensor graded_scale(double nu, const GradedTensor& a);

struct NormalizationConfig {
    double cap = 4.0;
    double tolerance = 1e-12;
    int max_bisection_steps = 200;
};

// Graded normalization into the ball of radius cap: identity below the cap,
// otherwise delta_lambda with the unique lambda in (0,1) solving
// |delta_lambda a| = cap, found by bisection.
std::pair<GradedTensor, double> normalize(const GradedTensor& a,
                                          const NormalizationConfig& cfg = {});

/// Finite linear functional on the graded space: a weighted list of basis
/// indices. A term of level 0 (empty index) reads the level-0 slot.
struct Functional {
    int d = 0;
    int n = 0;
    std::vector<std::pair<double, LevelIndex>> terms;

    Functional() = default;
    Functional(int d_, int n_) : d(d_), n(n_) {}

    static Functional basis(int d, int n, LevelIndex idx, double weight = 1.0);

    // Merge duplicate indices, drop weights below 1e-15.
    void canonicalize();
};

double pair_with(const Functional& f, const GradedTensor& a);

// Product realizing <f, Phi><g, Phi> = <f*g, Phi>: each basis pair
// (P1, pi1) x (P2, pi2) expands over Sh(m1, m2)^d into unit-weight terms
// (P1||P2, sigma . (pi1||pi2)) at level m1 + m2.
Functional shuffle_product(const Functional& f, const Functional& g);

// Minimal representative of the orbit {(sigma^-1 P, sigma pi)} under the
// level permutation action; such orbits carry equal coefficients for every
// signature.
LevelIndex orbit_representative(const LevelIndex& idx);
Functional canonicalize_orbits(const Functional& f);

// Blockwise application of the d-th compound of A at every level.
GradedTensor induced_map(const Matrix& a, const GradedTensor& t);

// Codomain action of the hyperoctahedral group: output at (P, pi) reads the
// input at (P, pi_sigma^tau) with sign (-1)^{m(|tau| + parity sigma)}.
GradedTensor bd_act(const HyperoctahedralElement& g, const GradedTensor& a);

}  // namespace cubesig
