#include <algorithm>
#include <cmath>

#include "fuse/error.hpp"
#include "fuse/learners.hpp"
#include "learners/internal.hpp"

namespace fuse {

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::C45Tree: return "C45Tree";
        case Algorithm::REPTree: return "REPTree";
        case Algorithm::RandomTree: return "RandomTree";
        case Algorithm::Ripper: return "Ripper";
        case Algorithm::PartRules: return "PartRules";
        case Algorithm::NNGE: return "NNGE";
    }
    return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
    for (Algorithm a : all_algorithms())
        if (name == algorithm_name(a)) return a;
    return std::nullopt;
}

std::vector<Algorithm> all_algorithms() {
    return {Algorithm::C45Tree, Algorithm::REPTree,   Algorithm::RandomTree,
            Algorithm::Ripper,  Algorithm::PartRules, Algorithm::NNGE};
}

LearnerSpec LearnerSpec::make(Algorithm a, std::uint64_t seed) {
    LearnerSpec spec;
    spec.algorithm = a;
    spec.seed = seed;
    return spec;
}

LearnerSpec LearnerSpec::unpruned(Algorithm a, std::uint64_t seed) {
    LearnerSpec spec = make(a, seed);
    spec.prune = false;
    spec.min_split = 1;
    return spec;
}

void LearnerSpec::validate() const {
    if (min_split < 1) throw ConfigError("learner: min_split must be >= 1");
    if (!(confidence > 0.0 && confidence <= 0.5))
        throw ConfigError("learner: confidence must lie in (0, 0.5]");
    if (optimization_passes < 0) throw ConfigError("learner: optimization_passes must be >= 0");
}

int ClassDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
        if (probs[i] > probs[best]) best = i;
    return static_cast<int>(best);
}

bool Condition::matches(const std::vector<double>& row) const {
    switch (op) {
        case Op::True: return true;
        case Op::LessEq: return row[attr] <= value;
        case Op::Greater: return row[attr] > value;
        case Op::GreaterEq: return row[attr] >= value;
        case Op::Less: return row[attr] < value;
        case Op::Equals: return static_cast<std::size_t>(row[attr]) == categories[0];
        case Op::InInterval: return row[attr] >= lo && row[attr] <= hi;
        case Op::InSet: {
            auto c = static_cast<std::size_t>(row[attr]);
            return std::find(categories.begin(), categories.end(), c) != categories.end();
        }
    }
    return false;
}

double Condition::sq_distance(const std::vector<double>& row) const {
    if (matches(row)) return 0.0;
    switch (op) {
        case Op::True: return 0.0;
        case Op::LessEq:
        case Op::Less: {
            double d = row[attr] - value;
            return d * d;
        }
        case Op::Greater:
        case Op::GreaterEq: {
            double d = value - row[attr];
            return d * d;
        }
        case Op::Equals:
        case Op::InSet: return 1.0;
        case Op::InInterval: {
            double d = row[attr] < lo ? lo - row[attr] : row[attr] - hi;
            return d * d;
        }
    }
    return 0.0;
}

namespace {

ClassDistribution distribution_from_counts(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    ClassDistribution dist;
    dist.probs.resize(counts.size(), 0.0);
    if (total > 0.0)
        for (std::size_t i = 0; i < counts.size(); ++i) dist.probs[i] = counts[i] / total;
    return dist;
}

ClassDistribution one_hot(int label, std::size_t n_classes) {
    ClassDistribution dist;
    dist.probs.assign(n_classes, 0.0);
    dist.probs[static_cast<std::size_t>(label)] = 1.0;
    return dist;
}

const TreeNode& route(const TreeModel& tree, const std::vector<double>& row) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->leaf) {
        std::size_t branch;
        if (node->numeric)
            branch = row[node->attr] <= node->threshold ? 0 : 1;
        else
            branch = static_cast<std::size_t>(row[node->attr]);
        node = &tree.nodes[static_cast<std::size_t>(node->children[branch])];
    }
    return *node;
}

// Squared distance from an instance to an exemplar's hyperrectangle:
// interval distance on numeric attributes, 0/1 mismatch on categorical ones.
double exemplar_sq_distance(const Exemplar& ex, const Schema& schema,
                            const std::vector<double>& row) {
    double sq = 0.0;
    for (std::size_t a = 0; a < schema.size(); ++a) {
        if (schema.attribute(a).kind == Kind::Numeric) {
            double v = row[a];
            double d = v < ex.lo[a] ? ex.lo[a] - v : (v > ex.hi[a] ? v - ex.hi[a] : 0.0);
            sq += d * d;
        } else {
            if (!ex.allowed[a][static_cast<std::size_t>(row[a])]) sq += 1.0;
        }
    }
    return sq;
}

} // namespace

ClassDistribution predict_distribution(const Model& m, const std::vector<double>& row) {
    if (row.size() != m.schema.size()) throw DataError("instance does not match training schema");
    if (const auto* tree = std::get_if<TreeModel>(&m.structure))
        return distribution_from_counts(route(*tree, row).counts);
    if (const auto* rules = std::get_if<RuleListModel>(&m.structure)) {
        for (const auto& rule : rules->rules) {
            bool all = true;
            for (const auto& cond : rule.conditions)
                if (!cond.matches(row)) {
                    all = false;
                    break;
                }
            if (all) return distribution_from_counts(rule.counts);
        }
        throw DataError("rule list has no catch-all default");
    }
    const auto& exemplars = std::get<ExemplarModel>(m.structure).exemplars;
    double best_sq = 0.0;
    int best_label = -1;
    for (const auto& ex : exemplars) {
        double sq = exemplar_sq_distance(ex, m.schema, row);
        if (best_label < 0 || sq < best_sq) {
            best_sq = sq;
            best_label = ex.label;
        }
    }
    if (best_label < 0) throw DataError("exemplar model is empty");
    return one_hot(best_label, m.schema.n_classes());
}

ClassDistribution predict_distribution(const VoteModel& m, const std::vector<double>& row) {
    if (m.bases.empty()) throw DataError("vote model has no base models");
    ClassDistribution mean;
    for (const auto& [name, base] : m.bases) {
        (void)name;
        ClassDistribution d = predict_distribution(base, row);
        if (mean.probs.empty()) mean.probs.assign(d.probs.size(), 0.0);
        if (mean.probs.size() != d.probs.size())
            throw DataError("vote base models disagree on class labels");
        for (std::size_t i = 0; i < d.probs.size(); ++i) mean.probs[i] += d.probs[i];
    }
    for (double& p : mean.probs) p /= static_cast<double>(m.bases.size());
    return mean;
}

int predict_label(const Model& m, const std::vector<double>& row) {
    return predict_distribution(m, row).argmax();
}

int predict_label(const VoteModel& m, const std::vector<double>& row) {
    return predict_distribution(m, row).argmax();
}

Model train(const LearnerSpec& spec, const Dataset& ds) {
    spec.validate();
    if (ds.rows.empty()) throw DataError("train: empty dataset");
    if (!ds.labeled()) throw DataError("train: dataset has no labels");
    switch (spec.algorithm) {
        case Algorithm::C45Tree: return detail::train_c45(spec, ds);
        case Algorithm::REPTree: return detail::train_reptree(spec, ds);
        case Algorithm::RandomTree: return detail::train_randomtree(spec, ds);
        case Algorithm::Ripper: return detail::train_ripper(spec, ds);
        case Algorithm::PartRules: return detail::train_part(spec, ds);
        case Algorithm::NNGE: return detail::train_nnge(spec, ds);
    }
    throw ConfigError("train: unknown algorithm");
}

namespace detail {

void refresh_rule_counts(RuleListModel& model, const Dataset& ds) {
    std::vector<std::size_t> all(ds.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const std::vector<double> total = count_classes(ds, all);

    std::vector<char> claimed(ds.n_rows(), 0);
    for (auto& rule : model.rules) {
        std::vector<double> counts(ds.schema.n_classes(), 0.0);
        for (std::size_t i = 0; i < ds.n_rows(); ++i) {
            if (claimed[i]) continue;
            bool all_match = true;
            for (const auto& cond : rule.conditions)
                if (!cond.matches(ds.rows[i])) {
                    all_match = false;
                    break;
                }
            if (all_match) {
                claimed[i] = 1;
                counts[static_cast<std::size_t>(ds.labels[i])] += 1.0;
            }
        }
        double sum = 0.0;
        for (double c : counts) sum += c;
        rule.counts = sum > 0.0 ? counts : total;
        // The reported label must agree with the stored distribution so the
        // exported text reproduces predictions exactly.
        rule.label = majority_class(rule.counts);
    }
}

} // namespace detail

} // namespace fuse
