#include "cubesig/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cubesig/errors.hpp"

namespace cubesig {

namespace {

void validate_breakpoints(const std::vector<double>& bp, int axis) {
    if (bp.size() < 2)
        throw InvalidGrid("axis " + std::to_string(axis) + ": needs at least 2 breakpoints");
    if (bp.front() != 0.0)
        throw InvalidGrid("axis " + std::to_string(axis) + ": breakpoints must start at 0");
    if (bp.back() != 1.0)
        throw InvalidGrid("axis " + std::to_string(axis) + ": breakpoints must end at 1");
    for (std::size_t i = 1; i < bp.size(); ++i)
        if (!(bp[i] > bp[i - 1]))
            throw InvalidGrid("axis " + std::to_string(axis) +
                              ": breakpoints not strictly increasing at index " +
                              std::to_string(i));
}

}  // namespace

PathSamples::PathSamples(std::vector<double> t, std::vector<std::vector<double>> v)
    : times(std::move(t)), values(std::move(v)) {
    validate_breakpoints(times, 0);
    if (values.size() != times.size())
        throw InvalidInput("path needs one value per time");
    for (const auto& val : values)
        if (val.size() != values.front().size())
            throw InvalidInput("path values must share dimension");
}

GridMap::GridMap(int d, int n, std::vector<std::vector<double>> breakpoints,
                 std::vector<double> samples)
    : d_(d), n_(n), breakpoints_(std::move(breakpoints)), samples_(std::move(samples)) {
    if (d_ < 1 || n_ < 1) throw InvalidGrid("d and n must be positive");
    if (static_cast<int>(breakpoints_.size()) != d_)
        throw InvalidGrid("need one breakpoint sequence per axis");
    std::size_t total = 1;
    for (int j = 0; j < d_; ++j) {
        validate_breakpoints(breakpoints_[static_cast<std::size_t>(j)], j);
        total *= breakpoints_[static_cast<std::size_t>(j)].size();
    }
    if (samples_.size() != total * static_cast<std::size_t>(n_))
        throw InvalidGrid("sample count mismatch: expected " +
                          std::to_string(total * static_cast<std::size_t>(n_)) + ", got " +
                          std::to_string(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i)
        if (!std::isfinite(samples_[i]))
            throw InvalidGrid("non-finite sample at flat index " + std::to_string(i));
}

std::vector<int> GridMap::vertex_counts() const {
    std::vector<int> counts(static_cast<std::size_t>(d_));
    for (int j = 0; j < d_; ++j)
        counts[static_cast<std::size_t>(j)] =
            static_cast<int>(breakpoints_[static_cast<std::size_t>(j)].size());
    return counts;
}

std::size_t GridMap::vertex_total() const {
    std::size_t total = 1;
    for (const auto& bp : breakpoints_) total *= bp.size();
    return total;
}

std::size_t GridMap::flat_vertex(const std::vector<int>& multi) const {
    std::size_t idx = 0;
    for (int j = 0; j < d_; ++j)
        idx = idx * breakpoints_[static_cast<std::size_t>(j)].size() +
              static_cast<std::size_t>(multi[static_cast<std::size_t>(j)]);
    return idx;
}

int JacobianField::num_minors() const { return static_cast<int>(binomial(n, d)); }

std::size_t JacobianField::cell_total() const {
    std::size_t total = 1;
    for (int c : cells_per_axis) total *= static_cast<std::size_t>(c);
    return total;
}

std::size_t JacobianField::flat_cell(const std::vector<int>& multi) const {
    std::size_t idx = 0;
    for (int j = 0; j < d; ++j)
        idx = idx * static_cast<std::size_t>(cells_per_axis[static_cast<std::size_t>(j)]) +
              static_cast<std::size_t>(multi[static_cast<std::size_t>(j)]);
    return idx;
}

double JacobianField::cell_volume(const std::vector<int>& multi) const {
    double v = 1.0;
    for (int j = 0; j < d; ++j)
        v *= axis_increments[static_cast<std::size_t>(j)]
                            [static_cast<std::size_t>(multi[static_cast<std::size_t>(j)])];
    return v;
}

double JacobianField::max_abs_minor() const {
    double mx = 0.0;
    for (double v : minors) mx = std::max(mx, std::abs(v));
    return mx;
}

SubdomainSpec::SubdomainSpec(std::vector<int> lo_, std::vector<int> hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw InvalidIndex("subdomain lo/hi arity mismatch");
    for (std::size_t j = 0; j < lo.size(); ++j) {
        if (lo[j] < 0 || hi[j] < lo[j])
            throw InvalidIndex("subdomain requires 0 <= lo_j <= hi_j");
    }
}

bool next_multi_index(std::vector<int>& idx, const std::vector<int>& extents) {
    for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
        if (++idx[static_cast<std::size_t>(j)] < extents[static_cast<std::size_t>(j)])
            return true;
        idx[static_cast<std::size_t>(j)] = 0;
    }
    return false;
}

JacobianField jacobian_field(const GridMap& x) {
    const int d = x.d();
    const int n = x.n();
    JacobianField field;
    field.d = d;
    field.n = n;
    field.cells_per_axis.resize(static_cast<std::size_t>(d));
    field.axis_increments.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const auto& bp = x.breakpoints()[static_cast<std::size_t>(j)];
        const int cells = static_cast<int>(bp.size()) - 1;
        if (cells < 1) throw InvalidGrid("axis " + std::to_string(j) + " has no cells");
        field.cells_per_axis[static_cast<std::size_t>(j)] = cells;
        auto& inc = field.axis_increments[static_cast<std::size_t>(j)];
        inc.resize(static_cast<std::size_t>(cells));
        for (int k = 0; k < cells; ++k)
            inc[static_cast<std::size_t>(k)] =
                bp[static_cast<std::size_t>(k + 1)] - bp[static_cast<std::size_t>(k)];
    }
    const auto injections = enumerate_injections(d, n);
    const int nm = static_cast<int>(injections.size());
    field.minors.resize(field.cell_total() * static_cast<std::size_t>(nm));

    const OrderedInjection all_cols = [&] {
        std::vector<int> img(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) img[static_cast<std::size_t>(j)] = j + 1;
        OrderedInjection inj;
        inj.image = std::move(img);
        return inj;
    }();

    std::vector<int> cell(static_cast<std::size_t>(d), 0);
    std::vector<int> lo(static_cast<std::size_t>(d));
    std::vector<int> hi(static_cast<std::size_t>(d));
    Matrix diff(n, d);
    const double edge_count = std::pow(2.0, d - 1);
    std::size_t flat = 0;
    do {
        // column j: cell-edge differences along axis j averaged over the
        // 2^(d-1) transverse corners; the average is what makes the minor
        // field transform by pure reindexing under cube symmetries
        for (int j = 0; j < d; ++j) {
            const double dt =
                field.axis_increments[static_cast<std::size_t>(j)]
                                     [static_cast<std::size_t>(cell[static_cast<std::size_t>(j)])];
            for (int c = 0; c < n; ++c) diff(c, j) = 0.0;
            const int corners = 1 << (d - 1);
            for (int mask = 0; mask < corners; ++mask) {
                lo = cell;
                int bit = 0;
                for (int j2 = 0; j2 < d; ++j2) {
                    if (j2 == j) continue;
                    lo[static_cast<std::size_t>(j2)] += (mask >> bit) & 1;
                    ++bit;
                }
                hi = lo;
                ++hi[static_cast<std::size_t>(j)];
                for (int c = 0; c < n; ++c) diff(c, j) += x.at(hi, c) - x.at(lo, c);
            }
            for (int c = 0; c < n; ++c) diff(c, j) /= edge_count * dt;
        }
        for (int p = 0; p < nm; ++p)
            field.minors[flat * static_cast<std::size_t>(nm) + static_cast<std::size_t>(p)] =
                submatrix_det(diff, injections[static_cast<std::size_t>(p)], all_cols);
        ++flat;
    } while (next_multi_index(cell, field.cells_per_axis));
    return field;
}

double metric_mu(const GridMap& x, const GridMap& y, Metric which) {
    if (x.d() != y.d() || x.n() != y.n())
        throw IncompatibleGrids("maps must share (d, n)");
    if (x.breakpoints() != y.breakpoints())
        throw IncompatibleGrids("maps must share breakpoints");
    const JacobianField fx = jacobian_field(x);
    const JacobianField fy = jacobian_field(y);
    const int nm = fx.num_minors();
    std::vector<int> cell(static_cast<std::size_t>(fx.d), 0);
    double total = 0.0;
    double worst = 0.0;
    std::size_t flat = 0;
    do {
        double sq = 0.0;
        for (int p = 0; p < nm; ++p) {
            const double diff = fx.minor_at(flat, p) - fy.minor_at(flat, p);
            sq += diff * diff;
        }
        const double norm = std::sqrt(sq);
        total += norm * fx.cell_volume(cell);
        worst = std::max(worst, norm);
        ++flat;
    } while (next_multi_index(cell, fx.cells_per_axis));
    return which == Metric::One ? total : worst;
}

GridMap from_linear_map(const Matrix& a, const std::vector<int>& resolution) {
    const int n = a.rows;
    const int d = a.cols;
    if (static_cast<int>(resolution.size()) != d)
        throw InvalidInput("need one resolution per axis");
    std::vector<std::vector<double>> bps(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const int cells = resolution[static_cast<std::size_t>(j)];
        if (cells < 1) throw InvalidInput("resolution must be >= 1 per axis");
        auto& bp = bps[static_cast<std::size_t>(j)];
        bp.resize(static_cast<std::size_t>(cells) + 1);
        for (int k = 0; k <= cells; ++k)
            bp[static_cast<std::size_t>(k)] = static_cast<double>(k) / cells;
        bp.back() = 1.0;
    }
    std::vector<int> extents(static_cast<std::size_t>(d));
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) {
        extents[static_cast<std::size_t>(j)] =
            static_cast<int>(bps[static_cast<std::size_t>(j)].size());
        total *= static_cast<std::size_t>(extents[static_cast<std::size_t>(j)]);
    }
    std::vector<double> samples(total * static_cast<std::size_t>(n), 0.0);
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    std::size_t flat = 0;
    do {
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j)
                acc += a(c, j) *
                       bps[static_cast<std::size_t>(j)]
                          [static_cast<std::size_t>(v[static_cast<std::size_t>(j)])];
            samples[flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] = acc;
        }
        ++flat;
    } while (next_multi_index(v, extents));
    return GridMap(d, n, std::move(bps), std::move(samples));
}

GridMap from_sum_of_paths(const std::vector<PathSamples>& paths) {
    if (paths.empty()) throw InvalidInput("need at least one path");
    const int d = static_cast<int>(paths.size());
    const int n = paths.front().dimension();
    for (const auto& p : paths)
        if (p.dimension() != n) throw InvalidInput("paths must share codomain dimension");
    std::vector<std::vector<double>> bps;
    bps.reserve(paths.size());
    for (const auto& p : paths) bps.push_back(p.times);
    std::vector<int> extents(static_cast<std::size_t>(d));
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) {
        extents[static_cast<std::size_t>(j)] =
            static_cast<int>(bps[static_cast<std::size_t>(j)].size());
        total *= static_cast<std::size_t>(extents[static_cast<std::size_t>(j)]);
    }
    std::vector<double> samples(total * static_cast<std::size_t>(n), 0.0);
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    std::size_t flat = 0;
    do {
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j)
                acc += paths[static_cast<std::size_t>(j)]
                           .values[static_cast<std::size_t>(v[static_cast<std::size_t>(j)])]
                                  [static_cast<std::size_t>(c)];
            samples[flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] = acc;
        }
        ++flat;
    } while (next_multi_index(v, extents));
    return GridMap(d, n, std::move(bps), std::move(samples));
}

GridMap compose_j(const GridMap& x, const GridMap& y, int axis, double face_tol) {
    if (x.d() != y.d() || x.n() != y.n())
        throw IncompatibleGrids("maps must share (d, n)");
    if (x.breakpoints() != y.breakpoints())
        throw IncompatibleGrids("maps must share breakpoints");
    const int d = x.d();
    const int n = x.n();
    if (axis < 0 || axis >= d) throw InvalidInput("axis out of range");

    const auto counts = x.vertex_counts();
    const int nj = counts[static_cast<std::size_t>(axis)] - 1;  // cells along axis

    // face check: x at s_axis = 1 against y at s_axis = 0
    {
        std::vector<int> extents = counts;
        extents[static_cast<std::size_t>(axis)] = 1;
        std::vector<int> v(static_cast<std::size_t>(d), 0);
        do {
            std::vector<int> vx = v;
            vx[static_cast<std::size_t>(axis)] = nj;
            std::vector<int> vy = v;
            for (int c = 0; c < n; ++c)
                if (std::abs(x.at(vx, c) - y.at(vy, c)) > face_tol)
                    throw NotComposable("faces differ beyond tolerance along axis " +
                                        std::to_string(axis));
        } while (next_multi_index(v, extents));
    }

    std::vector<std::vector<double>> bps = x.breakpoints();
    auto& bp = bps[static_cast<std::size_t>(axis)];
    std::vector<double> merged;
    merged.reserve(bp.size() * 2 - 1);
    for (double t : bp) merged.push_back(t / 2.0);
    const auto& bpy = y.breakpoints()[static_cast<std::size_t>(axis)];
    for (std::size_t k = 1; k < bpy.size(); ++k) merged.push_back(0.5 + bpy[k] / 2.0);
    merged.back() = 1.0;
    bp = std::move(merged);

    std::vector<int> new_counts = counts;
    new_counts[static_cast<std::size_t>(axis)] = 2 * nj + 1;
    std::size_t total = 1;
    for (int c : new_counts) total *= static_cast<std::size_t>(c);
    std::vector<double> samples(total * static_cast<std::size_t>(n), 0.0);

    GridMap out_shape(d, n, bps, std::vector<double>(samples));
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    do {
        const int k = v[static_cast<std::size_t>(axis)];
        std::vector<int> src = v;
        const GridMap* m = nullptr;
        if (k <= nj) {
            m = &x;
        } else {
            m = &y;
            src[static_cast<std::size_t>(axis)] = k - nj;
        }
        const std::size_t flat = out_shape.flat_vertex(v);
        for (int c = 0; c < n; ++c)
            samples[flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] =
                m->at(src, c);
    } while (next_multi_index(v, new_counts));
    return GridMap(d, n, std::move(bps), std::move(samples));
}

GridMap bd_transform(const GridMap& x, const HyperoctahedralElement& g) {
    if (g.dimension() != x.d()) throw InvalidInput("group element dimension must equal d");
    const int d = x.d();
    const int n = x.n();
    const auto counts = x.vertex_counts();

    // new axis a carries old axis sigma^-1(a), reflected per tau(a)
    const Permutation inv_rot = g.rotation.inverse();
    std::vector<std::vector<double>> bps(static_cast<std::size_t>(d));
    std::vector<int> new_counts(static_cast<std::size_t>(d));
    for (int a = 1; a <= d; ++a) {
        const int old_axis = inv_rot(a) - 1;
        const auto& src = x.breakpoints()[static_cast<std::size_t>(old_axis)];
        auto& dst = bps[static_cast<std::size_t>(a - 1)];
        if (g.reflections[static_cast<std::size_t>(a - 1)]) {
            dst.resize(src.size());
            for (std::size_t k = 0; k < src.size(); ++k)
                dst[k] = 1.0 - src[src.size() - 1 - k];
            dst.front() = 0.0;
            dst.back() = 1.0;
        } else {
            dst = src;
        }
        new_counts[static_cast<std::size_t>(a - 1)] = static_cast<int>(dst.size());
    }

    std::size_t total = 1;
    for (int c : new_counts) total *= static_cast<std::size_t>(c);
    std::vector<double> samples(total * static_cast<std::size_t>(n), 0.0);
    GridMap shape(d, n, bps, std::vector<double>(samples));

    std::vector<int> v(static_cast<std::size_t>(d), 0);
    std::vector<int> src(static_cast<std::size_t>(d), 0);
    do {
        // y(v) = x(l) with l_j read from the new index along axis sigma(j)
        for (int j = 1; j <= d; ++j) {
            const int a = g.rotation(j);
            int k = v[static_cast<std::size_t>(a - 1)];
            if (g.reflections[static_cast<std::size_t>(a - 1)])
                k = counts[static_cast<std::size_t>(j - 1)] - 1 - k;
            src[static_cast<std::size_t>(j - 1)] = k;
        }
        const std::size_t flat = shape.flat_vertex(v);
        for (int c = 0; c < n; ++c)
            samples[flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] =
                x.at(src, c);
    } while (next_multi_index(v, new_counts));
    return GridMap(d, n, std::move(bps), std::move(samples));
}

GridMap reparametrize(const GridMap& x, const std::vector<std::vector<double>>& relabelings) {
    if (static_cast<int>(relabelings.size()) != x.d())
        throw InvalidInput("need one relabeling per axis");
    for (int j = 0; j < x.d(); ++j) {
        const auto& r = relabelings[static_cast<std::size_t>(j)];
        if (r.size() != x.breakpoints()[static_cast<std::size_t>(j)].size())
            throw InvalidInput("relabeling length mismatch on axis " + std::to_string(j));
        if (r.front() != 0.0 || r.back() != 1.0)
            throw InvalidInput("relabeling endpoints must be {0,1} on axis " +
                               std::to_string(j));
        for (std::size_t k = 1; k < r.size(); ++k)
            if (!(r[k] > r[k - 1]))
                throw InvalidInput("relabeling not strictly increasing on axis " +
                                   std::to_string(j));
    }
    return GridMap(x.d(), x.n(), relabelings, x.samples());
}

GridMap lift_parametrized(const GridMap& x) {
    const int d = x.d();
    const int n = x.n();
    const int nbar = d + n;
    const auto counts = x.vertex_counts();
    std::vector<double> samples(x.vertex_total() * static_cast<std::size_t>(nbar), 0.0);
    std::vector<int> v(static_cast<std::size_t>(d), 0);
    std::size_t flat = 0;
    do {
        double* out = samples.data() + flat * static_cast<std::size_t>(nbar);
        for (int j = 0; j < d; ++j)
            out[j] = x.breakpoints()[static_cast<std::size_t>(j)]
                                    [static_cast<std::size_t>(v[static_cast<std::size_t>(j)])];
        for (int c = 0; c < n; ++c) out[d + c] = x.at(v, c);
        ++flat;
    } while (next_multi_index(v, counts));
    return GridMap(d, nbar, x.breakpoints(), std::move(samples));
}

GridMap scale_map(const GridMap& x, double nu) {
    std::vector<double> samples = x.samples();
    for (double& s : samples) s *= nu;
    return GridMap(x.d(), x.n(), x.breakpoints(), std::move(samples));
}

}  // namespace cubesig
