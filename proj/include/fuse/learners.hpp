#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fuse/dataset.hpp"

namespace fuse {

enum class Algorithm { C45Tree, REPTree, RandomTree, Ripper, PartRules, NNGE };

constexpr int kAlgorithmCount = 6;
const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);
std::vector<Algorithm> all_algorithms();

struct LearnerSpec {
    Algorithm algorithm = Algorithm::C45Tree;
    std::uint64_t seed = 1;

    // Tree controls.
    bool prune = true;           // C45Tree pessimistic pruning / REPTree REP
    int min_split = 2;           // minimum instances per admissible branch
    double confidence = 0.25;    // C45Tree pruning confidence factor

    // Ripper controls.
    int optimization_passes = 2;

    static LearnerSpec make(Algorithm a, std::uint64_t seed = 1);
    // Capacity configuration: no pruning, single-instance branches allowed.
    static LearnerSpec unpruned(Algorithm a, std::uint64_t seed = 1);

    void validate() const; // throws ConfigError on out-of-range settings
};

// Probability per class label, schema order. Entries are >= 0 and sum to 1.
struct ClassDistribution {
    std::vector<double> probs;

    // Exact ties break toward the earlier class in schema order.
    int argmax() const;
};

// --- Model structures ------------------------------------------------------

struct Condition {
    enum class Op { LessEq, Greater, GreaterEq, Less, Equals, InInterval, InSet, True };
    Op op = Op::True;
    std::size_t attr = 0;
    double value = 0.0;                    // threshold for the comparison ops
    double lo = 0.0, hi = 0.0;             // InInterval bounds (closed)
    std::vector<std::size_t> categories;   // Equals uses [0]; InSet uses the full set

    bool matches(const std::vector<double>& row) const;
    // Squared contribution to the exemplar distance when the condition fails.
    double sq_distance(const std::vector<double>& row) const;
};

struct TreeNode {
    bool leaf = true;
    std::size_t attr = 0;
    bool numeric = true;         // numeric: child 0 is <= threshold, child 1 is >
    double threshold = 0.0;
    std::vector<int> children;   // indices into TreeModel::nodes
    std::vector<double> counts;  // class counts at this node (leaf payload)
};

struct TreeModel {
    std::vector<TreeNode> nodes; // root at index 0
    int size() const { return static_cast<int>(nodes.size()); }
};

struct Rule {
    std::vector<Condition> conditions; // empty conjunction = catch-all
    int label = 0;
    std::vector<double> counts;        // class counts covered (decision-list order)
};

// Ordered rule list; the final rule is always a catch-all default.
struct RuleListModel {
    std::vector<Rule> rules;
};

struct Exemplar {
    // Hyperrectangle: closed interval per numeric attribute, allowed category
    // set per categorical attribute.
    std::vector<double> lo, hi;                    // indexed by attribute
    std::vector<std::vector<char>> allowed;        // [attr][category] flags
    int label = 0;
    std::vector<double> counts;
};

struct ExemplarModel {
    std::vector<Exemplar> exemplars;
};

struct Model {
    LearnerSpec spec;
    Schema schema;
    std::variant<TreeModel, RuleListModel, ExemplarModel> structure;
};

// Per-source base models combined by averaging their class distributions.
struct VoteModel {
    std::vector<std::pair<std::string, Model>> bases; // (section heading, model)
};

// --- Operations ------------------------------------------------------------

// Deterministic given (spec, dataset, seed). A single-class dataset yields a
// constant model; an empty dataset is a DataError.
Model train(const LearnerSpec& spec, const Dataset& ds);

ClassDistribution predict_distribution(const Model& m, const std::vector<double>& row);
ClassDistribution predict_distribution(const VoteModel& m, const std::vector<double>& row);
int predict_label(const Model& m, const std::vector<double>& row);
int predict_label(const VoteModel& m, const std::vector<double>& row);

// Canonical rule text: one `If <conjunction> Then <label>` line per rule,
// trees flattened root to leaf, class counts in parentheses where the model
// keeps them, `Size of the tree: n` for tree models, and a final
// `Number of Rules: k`. Vote models emit one `=== <heading> ===` section per
// base model.
std::string export_rules(const Model& m);
std::string export_rules(const VoteModel& m);

// Evaluates exported rule text against an instance: first match wins within a
// section; if nothing matches (exemplar sections), the nearest rule by
// condition distance decides. Multi-section text averages the per-section
// distributions. Returns the class index.
int interpret_rules(const std::string& rule_text, const Schema& schema,
                    const std::vector<double>& row);

} // namespace fuse
