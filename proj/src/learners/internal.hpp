#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "fuse/learners.hpp"
#include "fuse/rng.hpp"

namespace fuse::detail {

// Mutable tree used while growing/pruning; flattened into TreeModel at the end.
struct TmpNode {
    std::vector<double> counts;
    bool leaf = true;
    std::size_t attr = 0;
    bool numeric = true;
    double threshold = 0.0;
    std::vector<std::unique_ptr<TmpNode>> children;
    std::vector<std::size_t> instances; // training indices reaching this node
};

struct SplitChoice {
    std::size_t attr = 0;
    bool numeric = true;
    double threshold = 0.0;
    double gain = 0.0;
    double split_info = 0.0;
    std::vector<std::vector<std::size_t>> branches;
};

double entropy_bits(const std::vector<double>& counts, double total);

std::vector<double> count_classes(const Dataset& ds, const std::vector<std::size_t>& idx);

bool single_class(const std::vector<double>& counts);

int majority_class(const std::vector<double>& counts);

// Best admissible split of `idx` on one attribute by information gain.
// Numeric attributes use binary thresholds at midpoints between sorted
// adjacent distinct values whose class content differs; categorical
// attributes branch once per schema category. A split is admissible when at
// least two branches carry `min_split` instances.
std::optional<SplitChoice> best_split_on_attribute(const Dataset& ds,
                                                   const std::vector<std::size_t>& idx,
                                                   std::size_t attr, int min_split);

// Split selection strategy; returns nullopt to stop growing.
struct SplitPolicy {
    virtual ~SplitPolicy() = default;
    virtual std::optional<SplitChoice> choose(const Dataset& ds,
                                              const std::vector<std::size_t>& idx,
                                              int min_split) = 0;
};

// C4.5 selection: highest gain ratio among attributes with at least average
// information gain.
struct GainRatioPolicy : SplitPolicy {
    std::optional<SplitChoice> choose(const Dataset& ds, const std::vector<std::size_t>& idx,
                                      int min_split) override;
};

// Plain information gain over all attributes.
struct InfoGainPolicy : SplitPolicy {
    std::optional<SplitChoice> choose(const Dataset& ds, const std::vector<std::size_t>& idx,
                                      int min_split) override;
};

// Random-subspace selection: consider K seeded-random candidate attributes,
// extending past K only when none of them yields positive gain (so consistent
// data can always be separated).
struct RandomSubspacePolicy : SplitPolicy {
    RandomSubspacePolicy(std::size_t k, Rng& rng) : k_(k), rng_(rng) {}
    std::optional<SplitChoice> choose(const Dataset& ds, const std::vector<std::size_t>& idx,
                                      int min_split) override;

private:
    std::size_t k_;
    Rng& rng_;
};

std::unique_ptr<TmpNode> grow_tree(const Dataset& ds, std::vector<std::size_t> idx,
                                   SplitPolicy& policy, int min_split,
                                   bool keep_instances = false);

// C4.5 pessimistic-error pruning with the given confidence factor.
void prune_pessimistic(TmpNode& node, double confidence);

// Reduced-error pruning against a holdout set routed down the tree.
void prune_reduced_error(TmpNode& node, const Dataset& ds, const std::vector<std::size_t>& holdout);

// Flattens the temp tree into the immutable model (root at index 0, children
// in branch order).
TreeModel flatten(const TmpNode& root);

// Upper confidence bound on the error count of a leaf (N instances, e
// errors), following the classic pessimistic estimate.
double add_errs(double n, double e, double confidence);

// Inverse standard normal CDF (Acklam's rational approximation).
double normal_inverse(double p);

// Individual trainers.
Model train_c45(const LearnerSpec& spec, const Dataset& ds);
Model train_reptree(const LearnerSpec& spec, const Dataset& ds);
Model train_randomtree(const LearnerSpec& spec, const Dataset& ds);
Model train_ripper(const LearnerSpec& spec, const Dataset& ds);
Model train_part(const LearnerSpec& spec, const Dataset& ds);
Model train_nnge(const LearnerSpec& spec, const Dataset& ds);

// Decision-list coverage counts recomputed over the full training set; rules
// with empty coverage inherit the training class counts.
void refresh_rule_counts(RuleListModel& model, const Dataset& ds);

} // namespace fuse::detail
