#pragma once

#include <cstddef>
#include <vector>

#include "fuse/dataset.hpp"
#include "fuse/parallel.hpp"

namespace fuse {

struct FeatureSubset {
    std::vector<std::size_t> indices;  // sorted, duplicate-free
    double merit = 0.0;
    // Every (subset, merit) the search evaluated, in evaluation order.
    std::vector<std::pair<std::vector<std::size_t>, double>> trace;
};

// Symmetric uncertainty 2*I(a;b) / (H(a)+H(b)) over categorical columns;
// 0 when either entropy is 0. Columns hold category indices.
double symmetric_uncertainty(const std::vector<int>& a, const std::vector<int>& b);

// Precomputed feature-feature / feature-class correlations for one dataset.
// Numeric attributes are discretized internally (for the correlation only)
// with Fayyad-Irani MDL binning on the class; attributes with no accepted cut
// become single-bin and correlate 0. Building the pairwise matrix is one of
// the parallel kernels.
class CorrelationCache {
public:
    CorrelationCache(const Dataset& ds, Exec exec = Exec::Serial);

    double su_with_class(std::size_t attr) const { return su_class_[attr]; }
    double su_between(std::size_t a, std::size_t b) const { return su_ff_[a * d_ + b]; }
    std::size_t n_attributes() const { return d_; }

private:
    std::size_t d_ = 0;
    std::vector<double> su_class_;
    std::vector<double> su_ff_;
};

// CFS merit k*r_cf / sqrt(k + k(k-1)*r_ff) for a non-empty subset.
double cfs_merit(const std::vector<std::size_t>& subset, const CorrelationCache& cache);
double cfs_merit(const std::vector<std::size_t>& subset, const Dataset& ds);

// Best-first forward search from the empty set, backtracking allowed,
// stopping after 5 consecutive non-improving expansions. Falls back to the
// single best-SU feature if the winner is empty or has merit 0.
FeatureSubset select_best_first(const Dataset& ds, Exec exec = Exec::Serial);

// Exhaustive oracle over all non-empty subsets (d <= 20); ties prefer the
// smaller subset, then lexicographic indices.
FeatureSubset select_exhaustive(const Dataset& ds, Exec exec = Exec::Serial);

// Supervised MDL discretization used internally by the cache; exposed for
// tests. Returns accepted cut points (ascending), possibly empty.
std::vector<double> mdl_cut_points(const std::vector<double>& values, const std::vector<int>& labels,
                                   std::size_t n_classes);

} // namespace fuse
