#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fuse/dataset.hpp"
#include "fuse/parallel.hpp"

namespace fuse {

struct NormalizationParams {
    // Per-attribute (min, max) in source units; min <= max.
    std::vector<std::pair<double, double>> ranges;
};

struct BinningParams {
    struct AttrBins {
        double min = 0.0;
        double bin_width = 0.0;
        int n_bins = 0;
    };
    std::vector<AttrBins> attrs;
    std::vector<std::string> labels; // bin labels, LOW/MEDIUM/HIGH for n_bins = 3
};

// Ordered cut-off points on the raw mark scale with one label per interval.
// Default: [0,5) -> FAIL, [5,10] -> PASS.
struct ClassCutoffs {
    std::vector<double> cutoffs;          // strictly increasing, inside (0, 10)
    std::vector<std::string> labels;      // cutoffs.size() + 1 entries, ascending intervals

    static ClassCutoffs pass_fail(double cutoff = 5.0);
};

// Maps every numeric cell to (x - min) / (max - min); a constant attribute
// maps to all zeros. Params are returned for reuse on held-out data, where
// values outside the fitted range clamp to [0, 1].
std::pair<Dataset, NormalizationParams> min_max_normalize(const Dataset& ds,
                                                          Exec exec = Exec::Serial);
Dataset apply_normalization(const Dataset& ds, const NormalizationParams& params,
                            Exec exec = Exec::Serial);

// Equal-width binning into n_bins categories per attribute. Bins are
// half-open [min + i*w, min + (i+1)*w) with the last bin closed at max;
// a constant attribute puts every row in the first bin. Held-out values
// outside the fitted range clamp to the end bins.
std::pair<Dataset, BinningParams> equal_width_discretize(const Dataset& ds, int n_bins = 3,
                                                         Exec exec = Exec::Serial);
Dataset apply_binning(const Dataset& ds, const BinningParams& params,
                      Exec exec = Exec::Serial);

// Class labels from raw marks; marks outside [0, 10] are DataErrors.
std::vector<int> discretize_class(const std::vector<double>& marks, const ClassCutoffs& cutoffs,
                                  const Schema& schema);

// Attaches labels derived from ds.scores.
Dataset label_by_score(const Dataset& ds, const ClassCutoffs& cutoffs);

// Dataset restricted to the given attribute indices, schema order preserved.
Dataset project(const Dataset& ds, const std::vector<std::size_t>& subset);

} // namespace fuse
