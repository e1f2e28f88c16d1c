#include <algorithm>
#include <cmath>

#include "fuse/error.hpp"
#include "learners/internal.hpp"

namespace fuse::detail {

double entropy_bits(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) {
            double p = c / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

std::vector<double> count_classes(const Dataset& ds, const std::vector<std::size_t>& idx) {
    std::vector<double> counts(ds.schema.n_classes(), 0.0);
    for (std::size_t i : idx) counts[static_cast<std::size_t>(ds.labels[i])] += 1.0;
    return counts;
}

bool single_class(const std::vector<double>& counts) {
    int nonzero = 0;
    for (double c : counts)
        if (c > 0.0) ++nonzero;
    return nonzero <= 1;
}

int majority_class(const std::vector<double>& counts) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] > counts[best]) best = i;
    return static_cast<int>(best);
}

namespace {

bool admissible(const std::vector<std::vector<std::size_t>>& branches, int min_split) {
    int strong = 0;
    for (const auto& b : branches)
        if (static_cast<int>(b.size()) >= min_split) ++strong;
    return strong >= 2;
}

double split_info_of(const std::vector<std::vector<std::size_t>>& branches, double total) {
    double si = 0.0;
    for (const auto& b : branches) {
        if (!b.empty()) {
            double p = static_cast<double>(b.size()) / total;
            si -= p * std::log2(p);
        }
    }
    return si;
}

std::optional<SplitChoice> best_numeric_split(const Dataset& ds, const std::vector<std::size_t>& idx,
                                              std::size_t attr, int min_split) {
    const std::size_t n = idx.size();
    std::vector<std::size_t> order(idx);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double va = ds.rows[a][attr], vb = ds.rows[b][attr];
        if (va != vb) return va < vb;
        return a < b;
    });

    const std::size_t n_classes = ds.schema.n_classes();
    std::vector<double> total_counts = count_classes(ds, idx);
    const double total = static_cast<double>(n);
    const double parent_h = entropy_bits(total_counts, total);

    // Walk value groups, keeping running left-side class counts; a boundary
    // between two adjacent distinct values is a candidate unless both value
    // groups are pure in the same class.
    std::vector<double> left(n_classes, 0.0);
    double best_gain = 0.0, best_threshold = 0.0;
    std::size_t best_cut = 0;
    bool found = false;

    std::size_t g = 0;
    int prev_pure_class = -2; // -2 none yet, -1 mixed, >=0 pure class
    double prev_value = 0.0;
    while (g < n) {
        std::size_t h = g;
        double v = ds.rows[order[g]][attr];
        std::vector<double> group(n_classes, 0.0);
        while (h < n && ds.rows[order[h]][attr] == v) {
            group[static_cast<std::size_t>(ds.labels[order[h]])] += 1.0;
            ++h;
        }
        int pure = -1;
        {
            int nz = -1;
            bool mixed = false;
            for (std::size_t c = 0; c < n_classes; ++c)
                if (group[c] > 0.0) {
                    if (nz >= 0) mixed = true;
                    nz = static_cast<int>(c);
                }
            pure = mixed ? -1 : nz;
        }
        if (g > 0) {
            bool same_pure = prev_pure_class >= 0 && pure >= 0 && prev_pure_class == pure;
            std::size_t left_n = g, right_n = n - g;
            if (!same_pure && static_cast<int>(left_n) >= min_split &&
                static_cast<int>(right_n) >= min_split) {
                std::vector<double> right(n_classes);
                for (std::size_t c = 0; c < n_classes; ++c) right[c] = total_counts[c] - left[c];
                double ln = static_cast<double>(left_n), rn = static_cast<double>(right_n);
                double gain = parent_h - (ln / total) * entropy_bits(left, ln) -
                              (rn / total) * entropy_bits(right, rn);
                if (gain > 1e-12 && (!found || gain > best_gain)) {
                    found = true;
                    best_gain = gain;
                    best_threshold = (prev_value + v) / 2.0;
                    best_cut = g;
                }
            }
        }
        for (std::size_t c = 0; c < n_classes; ++c) left[c] += group[c];
        prev_pure_class = pure;
        prev_value = v;
        g = h;
    }
    if (!found) return std::nullopt;

    SplitChoice sc;
    sc.attr = attr;
    sc.numeric = true;
    sc.threshold = best_threshold;
    sc.gain = best_gain;
    sc.branches = {std::vector<std::size_t>(order.begin(), order.begin() + best_cut),
                   std::vector<std::size_t>(order.begin() + best_cut, order.end())};
    sc.split_info = split_info_of(sc.branches, total);
    return sc;
}

std::optional<SplitChoice> categorical_split(const Dataset& ds, const std::vector<std::size_t>& idx,
                                             std::size_t attr, int min_split) {
    const auto& cats = ds.schema.attribute(attr).categories;
    std::vector<std::vector<std::size_t>> branches(cats.size());
    for (std::size_t i : idx) branches[static_cast<std::size_t>(ds.rows[i][attr])].push_back(i);
    if (!admissible(branches, min_split)) return std::nullopt;

    const double total = static_cast<double>(idx.size());
    double child_h = 0.0;
    for (const auto& b : branches) {
        if (b.empty()) continue;
        auto counts = count_classes(ds, b);
        child_h += (static_cast<double>(b.size()) / total) *
                   entropy_bits(counts, static_cast<double>(b.size()));
    }
    double gain = entropy_bits(count_classes(ds, idx), total) - child_h;
    if (gain <= 1e-12) return std::nullopt;

    SplitChoice sc;
    sc.attr = attr;
    sc.numeric = false;
    sc.gain = gain;
    sc.split_info = split_info_of(branches, total);
    sc.branches = std::move(branches);
    return sc;
}

} // namespace

std::optional<SplitChoice> best_split_on_attribute(const Dataset& ds,
                                                   const std::vector<std::size_t>& idx,
                                                   std::size_t attr, int min_split) {
    if (idx.size() < 2) return std::nullopt;
    if (ds.schema.attribute(attr).kind == Kind::Numeric)
        return best_numeric_split(ds, idx, attr, min_split);
    return categorical_split(ds, idx, attr, min_split);
}

std::optional<SplitChoice> GainRatioPolicy::choose(const Dataset& ds,
                                                   const std::vector<std::size_t>& idx,
                                                   int min_split) {
    std::vector<SplitChoice> candidates;
    for (std::size_t a = 0; a < ds.schema.size(); ++a)
        if (auto sc = best_split_on_attribute(ds, idx, a, min_split)) candidates.push_back(std::move(*sc));
    if (candidates.empty()) return std::nullopt;

    double avg_gain = 0.0;
    for (const auto& c : candidates) avg_gain += c.gain;
    avg_gain /= static_cast<double>(candidates.size());

    const SplitChoice* best = nullptr;
    double best_ratio = -1.0;
    for (const auto& c : candidates) {
        if (c.gain + 1e-12 < avg_gain) continue;
        if (c.split_info <= 0.0) continue;
        double ratio = c.gain / c.split_info;
        if (!best || ratio > best_ratio) {
            best = &c;
            best_ratio = ratio;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

std::optional<SplitChoice> InfoGainPolicy::choose(const Dataset& ds,
                                                  const std::vector<std::size_t>& idx,
                                                  int min_split) {
    std::optional<SplitChoice> best;
    for (std::size_t a = 0; a < ds.schema.size(); ++a) {
        auto sc = best_split_on_attribute(ds, idx, a, min_split);
        if (sc && (!best || sc->gain > best->gain)) best = std::move(sc);
    }
    return best;
}

std::optional<SplitChoice> RandomSubspacePolicy::choose(const Dataset& ds,
                                                        const std::vector<std::size_t>& idx,
                                                        int min_split) {
    std::vector<std::size_t> attrs(ds.schema.size());
    for (std::size_t a = 0; a < attrs.size(); ++a) attrs[a] = a;
    rng_.shuffle(attrs);

    std::optional<SplitChoice> best;
    std::size_t examined = 0;
    for (std::size_t a : attrs) {
        auto sc = best_split_on_attribute(ds, idx, a, min_split);
        ++examined;
        if (sc && (!best || sc->gain > best->gain)) best = std::move(sc);
        // Stop at K candidates once a positive-gain split exists.
        if (examined >= k_ && best) break;
    }
    return best;
}

std::unique_ptr<TmpNode> grow_tree(const Dataset& ds, std::vector<std::size_t> idx,
                                   SplitPolicy& policy, int min_split, bool keep_instances) {
    auto node = std::make_unique<TmpNode>();
    node->counts = count_classes(ds, idx);
    if (keep_instances) node->instances = idx;

    if (idx.size() >= 2 && !single_class(node->counts)) {
        if (auto sc = policy.choose(ds, idx, min_split)) {
            node->leaf = false;
            node->attr = sc->attr;
            node->numeric = sc->numeric;
            node->threshold = sc->threshold;
            for (auto& branch : sc->branches) {
                if (branch.empty()) {
                    // Empty branch: leaf inheriting the parent distribution.
                    auto child = std::make_unique<TmpNode>();
                    child->counts = node->counts;
                    node->children.push_back(std::move(child));
                } else {
                    node->children.push_back(
                        grow_tree(ds, std::move(branch), policy, min_split, keep_instances));
                }
            }
        }
    }
    return node;
}

double normal_inverse(double p) {
    // Acklam's rational approximation to the inverse normal CDF.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425, p_high = 1 - p_low;
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal_inverse: p out of (0,1)");
    double q, r;
    if (p < p_low) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p <= p_high) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

double add_errs(double n, double e, double confidence) {
    if (confidence > 0.5) return e;
    if (e < 1.0) {
        double base = n * (1.0 - std::pow(confidence, 1.0 / n));
        if (e == 0.0) return base;
        return base + e * (add_errs(n, 1.0, confidence) - base);
    }
    if (e + 0.5 >= n) return std::max(n - e, 0.0);
    double z = normal_inverse(1.0 - confidence);
    double f = (e + 0.5) / n;
    double r = (f + z * z / (2.0 * n) +
                z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
               (1.0 + z * z / n);
    return r * n - e;
}

namespace {

double leaf_error_count(const std::vector<double>& counts) {
    double total = 0.0, best = 0.0;
    for (double c : counts) {
        total += c;
        best = std::max(best, c);
    }
    return total - best;
}

double node_total(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    return total;
}

double pessimistic_errors(const TmpNode& node, double confidence) {
    if (node.leaf) {
        double n = node_total(node.counts);
        double e = leaf_error_count(node.counts);
        if (n <= 0.0) return 0.0;
        return e + add_errs(n, e, confidence);
    }
    double sum = 0.0;
    for (const auto& child : node.children) sum += pessimistic_errors(*child, confidence);
    return sum;
}

void collapse(TmpNode& node) {
    node.leaf = true;
    node.children.clear();
}

// Holdout misclassification count of the subtree vs the node collapsed to a
// majority leaf.
std::pair<double, double> rep_errors(TmpNode& node, const Dataset& ds,
                                     const std::vector<std::size_t>& holdout) {
    int leaf_label = majority_class(node.counts);
    double leaf_err = 0.0;
    for (std::size_t i : holdout)
        if (ds.labels[i] != leaf_label) leaf_err += 1.0;

    if (node.leaf) return {leaf_err, leaf_err};

    // Route holdout instances to children.
    std::vector<std::vector<std::size_t>> parts(node.children.size());
    for (std::size_t i : holdout) {
        std::size_t branch;
        if (node.numeric)
            branch = ds.rows[i][node.attr] <= node.threshold ? 0 : 1;
        else
            branch = static_cast<std::size_t>(ds.rows[i][node.attr]);
        parts[branch].push_back(i);
    }
    double subtree_err = 0.0;
    for (std::size_t b = 0; b < node.children.size(); ++b)
        subtree_err += rep_errors(*node.children[b], ds, parts[b]).first;

    if (leaf_err <= subtree_err) {
        collapse(node);
        return {leaf_err, leaf_err};
    }
    return {subtree_err, leaf_err};
}

} // namespace

void prune_pessimistic(TmpNode& node, double confidence) {
    if (node.leaf) return;
    for (auto& child : node.children) prune_pessimistic(*child, confidence);

    double n = node_total(node.counts);
    double e = leaf_error_count(node.counts);
    double as_leaf = e + add_errs(n, e, confidence);
    double as_tree = pessimistic_errors(node, confidence);
    if (as_leaf <= as_tree + 0.1) collapse(node);
}

void prune_reduced_error(TmpNode& node, const Dataset& ds,
                         const std::vector<std::size_t>& holdout) {
    if (holdout.empty()) return;
    rep_errors(node, ds, holdout);
}

namespace {

int flatten_into(const TmpNode& node, TreeModel& model) {
    int index = static_cast<int>(model.nodes.size());
    model.nodes.emplace_back();
    {
        TreeNode& out = model.nodes[static_cast<std::size_t>(index)];
        out.leaf = node.leaf;
        out.attr = node.attr;
        out.numeric = node.numeric;
        out.threshold = node.threshold;
        out.counts = node.counts;
    }
    if (!node.leaf) {
        std::vector<int> children;
        children.reserve(node.children.size());
        for (const auto& child : node.children) children.push_back(flatten_into(*child, model));
        model.nodes[static_cast<std::size_t>(index)].children = std::move(children);
    }
    return index;
}

} // namespace

TreeModel flatten(const TmpNode& root) {
    TreeModel model;
    flatten_into(root, model);
    return model;
}

} // namespace fuse::detail
