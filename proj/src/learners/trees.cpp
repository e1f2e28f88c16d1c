#include <algorithm>
#include <cmath>

#include "fuse/error.hpp"
#include "learners/internal.hpp"

namespace fuse::detail {

namespace {

std::vector<std::size_t> all_indices(const Dataset& ds) {
    std::vector<std::size_t> idx(ds.n_rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
}

Model finish_tree(const LearnerSpec& spec, const Dataset& ds, const TmpNode& root) {
    Model m;
    m.spec = spec;
    m.schema = ds.schema;
    m.structure = flatten(root);
    return m;
}

} // namespace

Model train_c45(const LearnerSpec& spec, const Dataset& ds) {
    GainRatioPolicy policy;
    auto root = grow_tree(ds, all_indices(ds), policy, spec.min_split);
    if (spec.prune) prune_pessimistic(*root, spec.confidence);
    return finish_tree(spec, ds, *root);
}

Model train_reptree(const LearnerSpec& spec, const Dataset& ds) {
    // Seeded stratified 1/3 holdout for reduced-error pruning.
    std::vector<std::size_t> grow_idx, holdout;
    if (spec.prune) {
        Rng rng(mix_seed(spec.seed, 0x9e77));
        std::vector<std::vector<std::size_t>> per_class(ds.schema.n_classes());
        for (std::size_t i = 0; i < ds.n_rows(); ++i)
            per_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
        for (auto& members : per_class) {
            rng.shuffle(members);
            std::size_t n_prune = members.size() / 3;
            for (std::size_t j = 0; j < members.size(); ++j)
                (j < n_prune ? holdout : grow_idx).push_back(members[j]);
        }
        std::sort(grow_idx.begin(), grow_idx.end());
        std::sort(holdout.begin(), holdout.end());
        if (grow_idx.empty()) {
            grow_idx = all_indices(ds);
            holdout.clear();
        }
    } else {
        grow_idx = all_indices(ds);
    }

    InfoGainPolicy policy;
    auto root = grow_tree(ds, grow_idx, policy, spec.min_split);
    if (spec.prune && !holdout.empty()) prune_reduced_error(*root, ds, holdout);
    return finish_tree(spec, ds, *root);
}

Model train_randomtree(const LearnerSpec& spec, const Dataset& ds) {
    std::size_t d = ds.schema.size();
    std::size_t k = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(d)))) + 1;
    Rng rng(mix_seed(spec.seed, 0x7a31));
    RandomSubspacePolicy policy(k, rng);
    // Random trees grow unpruned with single-instance branches allowed.
    auto root = grow_tree(ds, all_indices(ds), policy, 1);
    return finish_tree(spec, ds, *root);
}

} // namespace fuse::detail
