#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubesig/engine.hpp"
#include "cubesig/grid_map.hpp"

namespace cubesig {

// --- seeded fixture generators shared by the verify suite and the tests ---

// iid samples in [-1, 1] on a uniform grid
GridMap random_grid_map(std::mt19937_64& rng, int d, int n, const std::vector<int>& cells);
// same but with jittered (non-uniform) breakpoints
GridMap random_nonuniform_grid_map(std::mt19937_64& rng, int d, int n,
                                   const std::vector<int>& cells);

/// Random low-degree polynomial map, samplable at any resolution; the
/// resolution-family fixture behind the convergence checks.
struct SmoothMap {
    int d = 0;
    int n = 0;
    // component, coefficient, per-axis exponents
    std::vector<std::tuple<int, double, std::vector<int>>> terms;

    GridMap sample(const std::vector<int>& cells) const;
    double value(const std::vector<double>& s, int component) const;
};

SmoothMap random_smooth_map(std::mt19937_64& rng, int d, int n, int terms_per_component = 5);

JacobianField random_field(std::mt19937_64& rng, int d, int n, const std::vector<int>& cells,
                           double scale = 1.0);
JacobianField perturb_field(std::mt19937_64& rng, const JacobianField& f, double epsilon);

Permutation random_permutation(std::mt19937_64& rng, int m);
LevelIndex random_level_index(std::mt19937_64& rng, int d, int n, int m);
PathSamples random_path(std::mt19937_64& rng, int n, int segments);
// walks out for `segments` steps and exactly retraces them
PathSamples out_and_back_path(std::mt19937_64& rng, int n, int segments);
std::vector<double> random_relabeling(std::mt19937_64& rng, std::size_t count);
std::vector<HyperoctahedralElement> enumerate_hyperoctahedral(int d);
Matrix random_matrix(std::mt19937_64& rng, int rows, int cols);

// --- the identity-verification suite ---

struct VerifyEntry {
    std::string name;
    double observed = 0.0;
    double tolerance = 0.0;
    // "le": pass iff observed <= tolerance; "ge": pass iff observed >= tolerance
    std::string comparison = "le";
    bool pass = false;
};

struct VerifyReport {
    std::uint64_t seed = 0;
    std::vector<VerifyEntry> entries;
    bool all_pass = false;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    std::uint64_t budget = 100'000'000;
    std::map<std::string, double> tolerances;
    // fault injection used by the suite's own sanity test: negates the sign
    // in the equivariance check
    bool tamper_bd_sign = false;
};

std::map<std::string, double> load_tolerances(const std::string& config_path);

VerifyReport run_verification(const VerifyOptions& opts);

nlohmann::json report_to_json(const VerifyReport& report);

}  // namespace cubesig
