#pragma once

#include <vector>

#include "cubesig/indices.hpp"
#include "cubesig/linalg.hpp"

namespace cubesig {

/// A sampled path [0,1] -> R^n: values at strictly increasing times with
/// endpoints 0 and 1.
struct PathSamples {
    std::vector<double> times;
    std::vector<std::vector<double>> values;

    PathSamples() = default;
    PathSamples(std::vector<double> t, std::vector<std::vector<double>> v);

    int dimension() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
    int segments() const { return static_cast<int>(times.size()) - 1; }
};

/// Samples of a map [0,1]^d -> R^n on a rectilinear grid. Axis j has
/// breakpoints[j].size() vertices; samples are stored row-major over axes
/// (axis 0 slowest) with the n components of each vertex contiguous.
class GridMap {
  public:
    GridMap(int d, int n, std::vector<std::vector<double>> breakpoints,
            std::vector<double> samples);

    int d() const { return d_; }
    int n() const { return n_; }
    const std::vector<std::vector<double>>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& samples() const { return samples_; }

    std::vector<int> vertex_counts() const;
    std::size_t vertex_total() const;
    std::size_t flat_vertex(const std::vector<int>& multi) const;
    // component c of the sample at a vertex multi-index
    double at(const std::vector<int>& multi, int c) const {
        return samples_[flat_vertex(multi) * static_cast<std::size_t>(n_) + c];
    }

  private:
    int d_;
    int n_;
    std::vector<std::vector<double>> breakpoints_;
    std::vector<double> samples_;
};

/// Per-cell values of all C(n,d) Jacobian minors, the discrete Jacobian
/// minor field. Cells are row-major over axes like GridMap vertices.
struct JacobianField {
    int d = 0;
    int n = 0;
    std::vector<int> cells_per_axis;
    // widths of the cells along each axis; cell volume = product
    std::vector<std::vector<double>> axis_increments;
    // minor values, cell-major: minors[cell * num_minors + p], with p
    // indexing enumerate_injections(d, n)
    std::vector<double> minors;

    int num_minors() const;
    std::size_t cell_total() const;
    std::size_t flat_cell(const std::vector<int>& multi) const;
    double minor_at(std::size_t flat, int p) const {
        return minors[flat * static_cast<std::size_t>(num_minors()) + p];
    }
    double cell_volume(const std::vector<int>& multi) const;
    double max_abs_minor() const;
};

/// Axis-aligned cell range [lo_j, hi_j) in breakpoint indices. A zero-width
/// axis (lo_j == hi_j) selects no cells.
struct SubdomainSpec {
    std::vector<int> lo;
    std::vector<int> hi;

    SubdomainSpec() = default;
    SubdomainSpec(std::vector<int> lo_, std::vector<int> hi_);
};

enum class Metric { One, Inf };

JacobianField jacobian_field(const GridMap& x);

double metric_mu(const GridMap& x, const GridMap& y, Metric which);

GridMap from_linear_map(const Matrix& a, const std::vector<int>& resolution);

GridMap from_sum_of_paths(const std::vector<PathSamples>& paths);

// Concatenation along axis j (0-based); x's j=1 face must match y's j=0
// face within face_tol per sample.
GridMap compose_j(const GridMap& x, const GridMap& y, int axis, double face_tol = 1e-9);

// Precomposition x o rho_g: axes permuted and reflected per g.
GridMap bd_transform(const GridMap& x, const HyperoctahedralElement& g);

// Replace breakpoints axis-wise by strictly increasing relabelings with
// endpoints {0,1}; samples untouched.
GridMap reparametrize(const GridMap& x, const std::vector<std::vector<double>>& relabelings);

// (s, x(s)): codomain gains the d grid coordinates in front.
GridMap lift_parametrized(const GridMap& x);

GridMap scale_map(const GridMap& x, double nu);

bool next_multi_index(std::vector<int>& idx, const std::vector<int>& extents);

}  // namespace cubesig
