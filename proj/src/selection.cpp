#include "fuse/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fuse/error.hpp"

namespace fuse {

namespace {

double entropy_of_counts(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) h -= (c / total) * std::log2(c / total);
    return h;
}

double entropy_of_column(const std::vector<int>& col, int n_values) {
    std::vector<double> counts(static_cast<std::size_t>(n_values), 0.0);
    for (int v : col) counts[static_cast<std::size_t>(v)] += 1.0;
    return entropy_of_counts(counts, static_cast<double>(col.size()));
}

} // namespace

double symmetric_uncertainty(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw DataError("symmetric_uncertainty: length mismatch");
    if (a.empty()) return 0.0;
    int na = *std::max_element(a.begin(), a.end()) + 1;
    int nb = *std::max_element(b.begin(), b.end()) + 1;

    double ha = entropy_of_column(a, na);
    double hb = entropy_of_column(b, nb);
    if (ha <= 0.0 || hb <= 0.0) return 0.0;

    std::vector<double> joint(static_cast<std::size_t>(na) * static_cast<std::size_t>(nb), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        joint[static_cast<std::size_t>(a[i]) * static_cast<std::size_t>(nb) +
              static_cast<std::size_t>(b[i])] += 1.0;
    double hab = entropy_of_counts(joint, static_cast<double>(a.size()));

    double mi = ha + hb - hab;
    if (mi < 0.0) mi = 0.0; // numerical floor
    double su = 2.0 * mi / (ha + hb);
    return std::clamp(su, 0.0, 1.0);
}

// --- Fayyad-Irani MDL discretization ----------------------------------------

namespace {

struct SortedColumn {
    std::vector<double> values; // ascending
    std::vector<int> labels;
};

double range_entropy(const std::vector<int>& labels, std::size_t lo, std::size_t hi,
                     std::size_t n_classes, int* distinct_classes = nullptr) {
    std::vector<double> counts(n_classes, 0.0);
    for (std::size_t i = lo; i < hi; ++i) counts[static_cast<std::size_t>(labels[i])] += 1.0;
    if (distinct_classes) {
        int k = 0;
        for (double c : counts)
            if (c > 0.0) ++k;
        *distinct_classes = k;
    }
    return entropy_of_counts(counts, static_cast<double>(hi - lo));
}

void mdl_recurse(const SortedColumn& col, std::size_t lo, std::size_t hi, std::size_t n_classes,
                 std::vector<double>& cuts) {
    const std::size_t n = hi - lo;
    if (n < 2) return;

    int k_all = 0;
    double h_all = range_entropy(col.labels, lo, hi, n_classes, &k_all);
    if (k_all < 2) return;

    // Scan boundaries between adjacent distinct values for the entropy-minimal cut.
    std::vector<double> left(n_classes, 0.0);
    double best_score = 0.0;
    std::size_t best_split = 0;
    bool found = false;
    for (std::size_t i = lo; i + 1 < hi; ++i) {
        left[static_cast<std::size_t>(col.labels[i])] += 1.0;
        if (col.values[i] == col.values[i + 1]) continue;
        double ln = static_cast<double>(i + 1 - lo), rn = static_cast<double>(hi - i - 1);
        std::vector<double> right(n_classes, 0.0);
        {
            std::vector<double> all(n_classes, 0.0);
            for (std::size_t j = lo; j < hi; ++j) all[static_cast<std::size_t>(col.labels[j])] += 1.0;
            for (std::size_t c = 0; c < n_classes; ++c) right[c] = all[c] - left[c];
        }
        double score = (ln / static_cast<double>(n)) * entropy_of_counts(left, ln) +
                       (rn / static_cast<double>(n)) * entropy_of_counts(right, rn);
        if (!found || score < best_score) {
            found = true;
            best_score = score;
            best_split = i + 1;
        }
    }
    if (!found) return;

    int k1 = 0, k2 = 0;
    double h1 = range_entropy(col.labels, lo, best_split, n_classes, &k1);
    double h2 = range_entropy(col.labels, best_split, hi, n_classes, &k2);
    double gain = h_all - best_score;
    double delta = std::log2(std::pow(3.0, k_all) - 2.0) -
                   (static_cast<double>(k_all) * h_all - static_cast<double>(k1) * h1 -
                    static_cast<double>(k2) * h2);
    double threshold = (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
    if (gain <= threshold) return;

    double cut = (col.values[best_split - 1] + col.values[best_split]) / 2.0;
    mdl_recurse(col, lo, best_split, n_classes, cuts);
    cuts.push_back(cut);
    mdl_recurse(col, best_split, hi, n_classes, cuts);
}

} // namespace

std::vector<double> mdl_cut_points(const std::vector<double>& values, const std::vector<int>& labels,
                                   std::size_t n_classes) {
    if (values.size() != labels.size()) throw DataError("mdl_cut_points: length mismatch");
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    SortedColumn col;
    col.values.reserve(values.size());
    col.labels.reserve(values.size());
    for (std::size_t i : order) {
        col.values.push_back(values[i]);
        col.labels.push_back(labels[i]);
    }
    std::vector<double> cuts;
    mdl_recurse(col, 0, col.values.size(), n_classes, cuts);
    return cuts;
}

// --- Correlation cache -------------------------------------------------------

CorrelationCache::CorrelationCache(const Dataset& ds, Exec exec) {
    if (!ds.labeled()) throw DataError("correlation cache needs a labeled dataset");
    d_ = ds.schema.size();
    su_class_.assign(d_, 0.0);
    su_ff_.assign(d_ * d_, 0.0);

    // Discretize every column (for correlation only).
    std::vector<std::vector<int>> cols(d_);
    parallel_for(d_, exec, [&](std::size_t a) {
        const auto& attr = ds.schema.attribute(a);
        std::vector<int> col(ds.n_rows());
        if (attr.kind == Kind::Categorical) {
            for (std::size_t r = 0; r < ds.n_rows(); ++r)
                col[r] = static_cast<int>(ds.rows[r][a]);
        } else {
            auto cuts = mdl_cut_points(ds.column(a), ds.labels, ds.schema.n_classes());
            for (std::size_t r = 0; r < ds.n_rows(); ++r) {
                double v = ds.rows[r][a];
                int bin = 0;
                for (double cut : cuts)
                    if (v > cut) ++bin;
                col[r] = bin;
            }
        }
        cols[a] = std::move(col);
    });

    parallel_for(d_, exec, [&](std::size_t a) {
        su_class_[a] = symmetric_uncertainty(cols[a], ds.labels);
    });

    // Pairwise matrix: one parallel job per row of the upper triangle.
    parallel_for(d_, exec, [&](std::size_t a) {
        su_ff_[a * d_ + a] = 1.0;
        for (std::size_t b = a + 1; b < d_; ++b)
            su_ff_[a * d_ + b] = symmetric_uncertainty(cols[a], cols[b]);
    });
    for (std::size_t a = 0; a < d_; ++a)
        for (std::size_t b = 0; b < a; ++b) su_ff_[a * d_ + b] = su_ff_[b * d_ + a];
}

double cfs_merit(const std::vector<std::size_t>& subset, const CorrelationCache& cache) {
    if (subset.empty()) throw DataError("cfs_merit: empty subset");
    std::set<std::size_t> unique(subset.begin(), subset.end());
    if (unique.size() != subset.size()) throw DataError("cfs_merit: duplicate indices");
    const double k = static_cast<double>(subset.size());

    double r_cf = 0.0;
    for (std::size_t f : subset) {
        if (f >= cache.n_attributes()) throw DataError("cfs_merit: index out of range");
        r_cf += cache.su_with_class(f);
    }
    r_cf /= k;

    double r_ff = 0.0;
    if (subset.size() > 1) {
        double pairs = 0.0;
        for (std::size_t i = 0; i < subset.size(); ++i)
            for (std::size_t j = i + 1; j < subset.size(); ++j) {
                r_ff += cache.su_between(subset[i], subset[j]);
                pairs += 1.0;
            }
        r_ff /= pairs;
    }
    return k * r_cf / std::sqrt(k + k * (k - 1.0) * r_ff);
}

double cfs_merit(const std::vector<std::size_t>& subset, const Dataset& ds) {
    CorrelationCache cache(ds);
    return cfs_merit(subset, cache);
}

// --- Searches ----------------------------------------------------------------

namespace {

FeatureSubset fallback_singleton(const CorrelationCache& cache, FeatureSubset result) {
    std::size_t best = 0;
    for (std::size_t f = 1; f < cache.n_attributes(); ++f)
        if (cache.su_with_class(f) > cache.su_with_class(best)) best = f;
    result.indices = {best};
    result.merit = cfs_merit(result.indices, cache);
    return result;
}

} // namespace

FeatureSubset select_best_first(const Dataset& ds, Exec exec) {
    if (ds.schema.size() == 0) throw DataError("select_best_first: dataset has no attributes");
    CorrelationCache cache(ds, exec);
    const std::size_t d = cache.n_attributes();
    constexpr int kMaxStale = 5;

    struct Node {
        double merit;
        std::vector<std::size_t> subset;
    };
    // Expansion priority: merit descending, lexicographically smaller subset
    // on ties.
    auto better = [](const Node& a, const Node& b) {
        if (a.merit != b.merit) return a.merit > b.merit;
        return a.subset < b.subset;
    };

    std::vector<Node> open;
    std::set<std::vector<std::size_t>> seen;
    FeatureSubset result;
    open.push_back({0.0, {}});
    seen.insert({});

    double best_merit = 0.0;
    std::vector<std::size_t> best_subset;
    int stale = 0;

    while (!open.empty() && stale < kMaxStale) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < open.size(); ++i)
            if (better(open[i], open[pick])) pick = i;
        Node node = std::move(open[pick]);
        open.erase(open.begin() + static_cast<long>(pick));

        // Evaluate all single-feature additions of this node (independent
        // merit computations; a parallel kernel with order-stable commits).
        std::vector<std::optional<Node>> children(d);
        parallel_for(d, exec, [&](std::size_t f) {
            if (std::find(node.subset.begin(), node.subset.end(), f) != node.subset.end()) return;
            std::vector<std::size_t> child = node.subset;
            child.insert(std::upper_bound(child.begin(), child.end(), f), f);
            double merit = cfs_merit(child, cache);
            children[f] = Node{merit, std::move(child)};
        });

        bool improved = false;
        for (std::size_t f = 0; f < d; ++f) {
            if (!children[f]) continue;
            if (!seen.insert(children[f]->subset).second) continue;
            result.trace.emplace_back(children[f]->subset, children[f]->merit);
            if (children[f]->merit > best_merit) {
                best_merit = children[f]->merit;
                best_subset = children[f]->subset;
                improved = true;
            }
            open.push_back(std::move(*children[f]));
        }
        stale = improved ? 0 : stale + 1;
    }

    if (best_subset.empty() || best_merit <= 0.0) return fallback_singleton(cache, std::move(result));
    result.indices = std::move(best_subset);
    result.merit = best_merit;
    return result;
}

FeatureSubset select_exhaustive(const Dataset& ds, Exec exec) {
    const std::size_t d = ds.schema.size();
    if (d == 0) throw DataError("select_exhaustive: dataset has no attributes");
    if (d > 20) throw DataError("select_exhaustive: too many attributes (limit 20)");
    CorrelationCache cache(ds, exec);

    const std::size_t n_masks = (std::size_t{1} << d);
    std::vector<double> merits(n_masks, -1.0);
    parallel_for(n_masks - 1, exec, [&](std::size_t i) {
        std::size_t mask = i + 1;
        std::vector<std::size_t> subset;
        for (std::size_t f = 0; f < d; ++f)
            if (mask & (std::size_t{1} << f)) subset.push_back(f);
        merits[mask] = cfs_merit(subset, cache);
    });

    auto subset_of = [&](std::size_t mask) {
        std::vector<std::size_t> subset;
        for (std::size_t f = 0; f < d; ++f)
            if (mask & (std::size_t{1} << f)) subset.push_back(f);
        return subset;
    };

    std::size_t best_mask = 1;
    for (std::size_t mask = 2; mask < n_masks; ++mask) {
        if (merits[mask] > merits[best_mask]) {
            best_mask = mask;
        } else if (merits[mask] == merits[best_mask]) {
            auto a = subset_of(mask), b = subset_of(best_mask);
            if (a.size() < b.size() || (a.size() == b.size() && a < b)) best_mask = mask;
        }
    }

    FeatureSubset result;
    result.indices = subset_of(best_mask);
    result.merit = merits[best_mask];
    if (d <= 12)
        for (std::size_t mask = 1; mask < n_masks; ++mask)
            result.trace.emplace_back(subset_of(mask), merits[mask]);
    return result;
}

} // namespace fuse
