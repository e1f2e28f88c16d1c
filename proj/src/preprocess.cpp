#include "fuse/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "fuse/error.hpp"
#include "fuse/text.hpp"

namespace fuse {

ClassCutoffs ClassCutoffs::pass_fail(double cutoff) {
    return ClassCutoffs{{cutoff}, {"FAIL", "PASS"}};
}

namespace {

void require_all_numeric(const Dataset& ds, const char* op) {
    for (const auto& a : ds.schema.attributes())
        if (a.kind != Kind::Numeric)
            throw DataError(std::string(op) + ": attribute '" + a.name + "' is not numeric");
}

std::pair<double, double> column_range(const Dataset& ds, std::size_t attr) {
    double lo = ds.rows[0][attr], hi = ds.rows[0][attr];
    for (const auto& row : ds.rows) {
        lo = std::min(lo, row[attr]);
        hi = std::max(hi, row[attr]);
    }
    return {lo, hi};
}

std::vector<std::string> bin_labels(int n_bins) {
    if (n_bins == 3) return {"LOW", "MEDIUM", "HIGH"};
    std::vector<std::string> out;
    for (int i = 1; i <= n_bins; ++i) out.push_back("B" + std::to_string(i));
    return out;
}

int bin_index(double v, const BinningParams::AttrBins& b) {
    if (b.bin_width <= 0.0) return 0; // constant attribute: everything in the first bin
    double offset = (v - b.min) / b.bin_width;
    int idx = static_cast<int>(std::floor(offset));
    // Last bin is closed at max; out-of-range held-out values clamp to the
    // end bins.
    if (idx < 0) idx = 0;
    if (idx >= b.n_bins) idx = b.n_bins - 1;
    return idx;
}

} // namespace

std::pair<Dataset, NormalizationParams> min_max_normalize(const Dataset& ds, Exec exec) {
    require_all_numeric(ds, "min_max_normalize");
    if (ds.rows.empty()) return {ds, NormalizationParams{}};
    NormalizationParams params;
    params.ranges.resize(ds.schema.size());
    for (std::size_t a = 0; a < ds.schema.size(); ++a) params.ranges[a] = column_range(ds, a);
    return {apply_normalization(ds, params, exec), params};
}

Dataset apply_normalization(const Dataset& ds, const NormalizationParams& params, Exec exec) {
    require_all_numeric(ds, "apply_normalization");
    if (params.ranges.size() != ds.schema.size())
        throw DataError("normalization params do not match schema width");
    for (const auto& [lo, hi] : params.ranges)
        if (!(lo <= hi)) throw DataError("normalization params: min > max");

    Dataset out = ds;
    parallel_for(ds.schema.size(), exec, [&](std::size_t a) {
        const auto [lo, hi] = params.ranges[a];
        const double span = hi - lo;
        for (std::size_t r = 0; r < out.rows.size(); ++r) {
            double z = span > 0.0 ? (ds.rows[r][a] - lo) / span : 0.0;
            out.rows[r][a] = std::clamp(z, 0.0, 1.0);
        }
    });
    return out;
}

std::pair<Dataset, BinningParams> equal_width_discretize(const Dataset& ds, int n_bins, Exec exec) {
    require_all_numeric(ds, "equal_width_discretize");
    if (n_bins < 2) throw ConfigError("equal_width_discretize: n_bins must be >= 2");
    BinningParams params;
    params.labels = bin_labels(n_bins);
    params.attrs.resize(ds.schema.size());
    for (std::size_t a = 0; a < ds.schema.size(); ++a) {
        auto [lo, hi] = ds.rows.empty() ? std::pair<double, double>{0.0, 0.0} : column_range(ds, a);
        params.attrs[a] = {lo, (hi - lo) / static_cast<double>(n_bins), n_bins};
    }
    return {apply_binning(ds, params, exec), params};
}

Dataset apply_binning(const Dataset& ds, const BinningParams& params, Exec exec) {
    require_all_numeric(ds, "apply_binning");
    if (params.attrs.size() != ds.schema.size())
        throw DataError("binning params do not match schema width");

    std::vector<Attribute> attrs = ds.schema.attributes();
    for (auto& a : attrs) {
        a.kind = Kind::Categorical;
        a.categories = params.labels;
    }
    Dataset out = ds;
    out.schema = Schema(std::move(attrs), ds.schema.class_labels());
    parallel_for(ds.schema.size(), exec, [&](std::size_t a) {
        for (std::size_t r = 0; r < out.rows.size(); ++r)
            out.rows[r][a] = static_cast<double>(bin_index(ds.rows[r][a], params.attrs[a]));
    });
    return out;
}

std::vector<int> discretize_class(const std::vector<double>& marks, const ClassCutoffs& cutoffs,
                                  const Schema& schema) {
    if (cutoffs.labels.size() != cutoffs.cutoffs.size() + 1)
        throw ConfigError("class cutoffs need one label per interval");
    for (std::size_t i = 1; i < cutoffs.cutoffs.size(); ++i)
        if (!(cutoffs.cutoffs[i - 1] < cutoffs.cutoffs[i]))
            throw ConfigError("class cutoffs must be strictly increasing");
    std::vector<int> label_idx;
    for (const auto& name : cutoffs.labels) {
        auto idx = schema.class_index(name);
        if (!idx) throw ConfigError("cutoff label '" + name + "' not in schema class labels");
        label_idx.push_back(*idx);
    }

    std::vector<int> out;
    out.reserve(marks.size());
    for (double m : marks) {
        if (!(m >= 0.0 && m <= 10.0))
            throw DataError("mark " + format_double(m) + " outside [0, 10]");
        std::size_t interval = 0;
        while (interval < cutoffs.cutoffs.size() && m >= cutoffs.cutoffs[interval]) ++interval;
        out.push_back(label_idx[interval]);
    }
    return out;
}

Dataset label_by_score(const Dataset& ds, const ClassCutoffs& cutoffs) {
    if (ds.scores.empty()) throw DataError("label_by_score: dataset has no scores");
    Dataset out = ds;
    out.labels = discretize_class(ds.scores, cutoffs, ds.schema);
    return out;
}

Dataset project(const Dataset& ds, const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw DataError("project: empty attribute subset");
    std::vector<std::size_t> ordered = subset;
    std::sort(ordered.begin(), ordered.end());
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
    for (std::size_t idx : ordered)
        if (idx >= ds.schema.size())
            throw DataError("project: attribute index " + std::to_string(idx) + " out of range");

    std::vector<Attribute> attrs;
    for (std::size_t idx : ordered) attrs.push_back(ds.schema.attribute(idx));
    Dataset out;
    out.schema = Schema(std::move(attrs), ds.schema.class_labels());
    out.ids = ds.ids;
    out.labels = ds.labels;
    out.scores = ds.scores;
    out.rows.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        std::vector<double> r;
        r.reserve(ordered.size());
        for (std::size_t idx : ordered) r.push_back(row[idx]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

} // namespace fuse
