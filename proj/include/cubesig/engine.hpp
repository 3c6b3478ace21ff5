#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cubesig/grid_map.hpp"
#include "cubesig/indices.hpp"
#include "cubesig/tensor.hpp"

namespace cubesig {

enum class QuadratureMode { Grid, MonteCarlo };

struct QuadratureSpec {
    QuadratureMode mode = QuadratureMode::Grid;
    int mc_samples = 10000;
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

// One signature coefficient. Grid mode sums, over cell-index tuples whose
// per-axis order matches pi (ties across cells dropped), the products of
// minors times cell volumes. Monte-Carlo mode averages the integrand at
// sorted-uniform points assigned through pi, scaled by the domain volume.
double monomial(const JacobianField& f, const LevelIndex& idx,
                const QuadratureSpec& quad = {},
                const std::optional<SubdomainSpec>& sub = std::nullopt,
                std::uint64_t budget = kDefaultBudget);

// All coefficients for levels 0..max_level; level0 = 1. Coefficients are
// computed as a parallel map over the index list; values and output bytes
// do not depend on the worker count (threads = 0 picks the hardware count).
GradedTensor signature(const JacobianField& f, int max_level,
                       const QuadratureSpec& quad = {},
                       std::uint64_t budget = kDefaultBudget, int threads = 0);

// Identity-permutation coefficients only, computed by the prefix-sum
// recursion Phi_m(a,b) = integral of Phi_{m-1}(a,s) J_{P_m}(s) ds.
GradedTensor identity_signature(const JacobianField& f, int max_level,
                                const std::optional<SubdomainSpec>& sub = std::nullopt,
                                std::uint64_t budget = kDefaultBudget);

// Injection (1..d) of the appended parametrization block inside the lifted
// codomain R^d x R^n.
OrderedInjection parametrization_block(int d);
// Shift P in O_{d,n} into the lifted codomain (entries + d).
OrderedInjection lift_injection(const OrderedInjection& p, int d);

// Signature of (s, x(s)) with the forms index restricted to
// W = {U} u O_{d,n}; all other coefficients are absent.
GradedTensor parametrized_signature(const GridMap& x, int max_level,
                                    const QuadratureSpec& quad = {},
                                    std::uint64_t budget = kDefaultBudget,
                                    int threads = 0);

/// Coefficient recipe realizing the moment functional: a weighted list of
/// B-tuples, where B fixes the per-axis rank of the last item.
struct MomentPlan {
    std::vector<int> exponents;  // c, one entry per axis
    OrderedInjection target;     // P in O_{d,n}
    int level = 0;               // m = max_j c_j + 1
    // weight and B = (pi_1^-1(m), ..., pi_d^-1(m))
    std::vector<std::pair<double, std::vector<int>>> terms;
};

// Functional with <l, parametrized_signature(x)> equal in the continuum to
// the moment integral of s^c J[x_P]. The plan's forms index is
// (U, ..., U, P); per B-tuple the canonical pi sends m to slot b_j keeping
// the other items in order.
std::pair<MomentPlan, Functional> moment_functional(const std::vector<int>& c,
                                                    const OrderedInjection& p, int n);

double extract_moment(const GridMap& x, const MomentPlan& plan,
                      const QuadratureSpec& quad = {},
                      std::uint64_t budget = kDefaultBudget);

// Sum over cells of center^c * J[x_P] * vol; the reference the moment
// machinery converges to.
double direct_discrete_moment(const GridMap& x, const std::vector<int>& c,
                              const OrderedInjection& p);

}  // namespace cubesig
