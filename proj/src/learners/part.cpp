#include <algorithm>

#include "fuse/error.hpp"
#include "learners/internal.hpp"

namespace fuse::detail {

namespace {

struct LeafPick {
    // Coverage counted over the instances actually reaching the leaf, so
    // empty branches (which inherit parent counts) can never win.
    long coverage = -1;
    std::vector<Condition> conditions;
    const TmpNode* leaf = nullptr;
};

void find_best_leaf(const TmpNode& node, const Dataset& ds, std::vector<Condition>& path,
                    LeafPick& best) {
    if (node.leaf) {
        long covered = static_cast<long>(node.instances.size());
        if (covered > best.coverage) {
            best.coverage = covered;
            best.conditions = path;
            best.leaf = &node;
        }
        return;
    }
    for (std::size_t b = 0; b < node.children.size(); ++b) {
        Condition cond;
        cond.attr = node.attr;
        if (node.numeric) {
            cond.op = b == 0 ? Condition::Op::LessEq : Condition::Op::Greater;
            cond.value = node.threshold;
        } else {
            cond.op = Condition::Op::Equals;
            cond.categories = {b};
        }
        path.push_back(cond);
        find_best_leaf(*node.children[b], ds, path, best);
        path.pop_back();
    }
}

} // namespace

// Decision list built by repeatedly growing a pruned tree on the instances
// not yet covered and extracting its highest-coverage leaf as the next rule.
Model train_part(const LearnerSpec& spec, const Dataset& ds) {
    RuleListModel model;
    std::vector<std::size_t> remaining(ds.n_rows());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    while (!remaining.empty()) {
        GainRatioPolicy policy;
        auto root = grow_tree(ds, remaining, policy, spec.min_split, /*keep_instances=*/true);
        if (spec.prune) prune_pessimistic(*root, spec.confidence);

        if (root->leaf) {
            // No usable split: the leftovers become the default rule.
            Rule def;
            def.label = majority_class(root->counts);
            def.counts = root->counts;
            model.rules.push_back(std::move(def));
            remaining.clear();
            break;
        }

        LeafPick best;
        std::vector<Condition> path;
        find_best_leaf(*root, ds, path, best);

        Rule rule;
        rule.conditions = best.conditions;
        rule.label = majority_class(best.leaf->counts);
        rule.counts = best.leaf->counts;
        model.rules.push_back(std::move(rule));

        std::vector<std::size_t> next;
        for (std::size_t i : remaining) {
            bool covered = true;
            for (const auto& cond : model.rules.back().conditions)
                if (!cond.matches(ds.rows[i])) {
                    covered = false;
                    break;
                }
            if (!covered) next.push_back(i);
        }
        if (next.size() == remaining.size()) break; // zero-coverage leaf; stop
        remaining = std::move(next);
    }

    // The list always ends with a catch-all.
    if (model.rules.empty() || !model.rules.back().conditions.empty()) {
        Rule def;
        def.label = 0;
        model.rules.push_back(std::move(def));
    }

    refresh_rule_counts(model, ds);

    Model m;
    m.spec = spec;
    m.schema = ds.schema;
    m.structure = std::move(model);
    return m;
}

} // namespace fuse::detail
