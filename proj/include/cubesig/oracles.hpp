#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cubesig/grid_map.hpp"
#include "cubesig/indices.hpp"

namespace cubesig {

// Iterated-sum path signature coefficient: sum over strictly increasing
// segment tuples of products of per-segment increments in the multi-index
// coordinates. Empty multi-index gives 1. This is the d=1 specialization of
// the strict-order grid sum and matches the engine exactly.
double path_signature(const PathSamples& p, const std::vector<int>& multi_index);

// Signature of the piecewise-linear interpolation itself, with the exact
// within-segment simplex volumes. Group-like under concatenation, so an
// exact retrace cancels to zero; differs from path_signature by the tie
// terms of order m^2/N.
double path_signature_pl(const PathSamples& p, const std::vector<int>& multi_index);

/// Which path-signature convention the sum-of-paths closed form combines:
/// Strict matches the engine's grid sums term by term; PiecewiseLinear is
/// the group-like variant under which tree-like components vanish.
enum class PathSignatureKind { Strict, PiecewiseLinear };

/// How the sampler treats points whose cells collide along an axis.
/// Include estimates the integral of the piecewise-constant field over the
/// permuted simplices; Drop zeroes colliding draws and is unbiased for the
/// strict-order grid sum itself.
enum class TiePolicy { Include, Drop };

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
};

McResult mc_monomial(const JacobianField& f, const LevelIndex& idx, int samples,
                     std::uint64_t seed,
                     const std::optional<SubdomainSpec>& sub = std::nullopt,
                     TiePolicy ties = TiePolicy::Include);

// Closed form for sum-of-paths maps: the signed sum over Sigma_d^m of
// products of path-signature coefficients with permuted multi-indices.
double sum_of_paths_monomial(const std::vector<PathSamples>& paths, const LevelIndex& idx,
                             PathSignatureKind kind = PathSignatureKind::Strict);

// Right side of the composition identity for the identity permutation
// index, evaluated as the direct sum over the split domain: for each
// r = 0..m the first r items range over x's cells and the rest over y's
// cells along the composition axis, with full ordering elsewhere.
double chen_rhs(const GridMap& x, const GridMap& y, int axis,
                const std::vector<OrderedInjection>& forms, int level,
                double face_tol = 1e-9);

}  // namespace cubesig
