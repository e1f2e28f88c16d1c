#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fuse/learners.hpp"
#include "fuse/parallel.hpp"

namespace fuse {

struct FoldAssignment {
    std::vector<int> fold_of; // fold index per instance
    int k = 0;
    std::uint64_t seed = 0;
};

// Seeded shuffle within each class, then one continuous round-robin deal
// across classes so fold sizes differ by at most one.
FoldAssignment stratified_folds(const std::vector<int>& labels, std::size_t n_classes, int k,
                                std::uint64_t seed);

// 100 * correct / n.
double accuracy_pct(const std::vector<int>& predicted, const std::vector<int>& truth);

// Rank-based (Mann-Whitney) AUC with midrank tie handling for the positive
// class. Throws DataError when only one class is present.
double auc(const std::vector<double>& positive_probs, const std::vector<int>& truth,
           int positive_class = 0);

struct CellId {
    std::string mode;           // merge_all / select_merged / ensemble_per_source
    std::string representation; // numerical / discretized
    std::string algorithm;

    std::string to_string() const { return mode + ":" + representation + ":" + algorithm; }
    bool operator==(const CellId&) const = default;
};

struct EvalReport {
    CellId cell;
    std::vector<int> true_labels;
    std::vector<int> predicted_labels;
    std::vector<double> positive_probs; // out-of-fold probability of the first class
    double accuracy = 0.0;              // percent
    double auc = 0.0;

    bool operator==(const EvalReport&) const = default;
};

// Trains on the k-1 in-fold partitions and predicts the held-out fold; the
// metrics are computed once over the pooled out-of-fold predictions. Folds
// are independent jobs (parallel kernel); predictions land in per-instance
// slots so the result is schedule-invariant.
EvalReport cross_validate(const LearnerSpec& spec, const Dataset& ds, int k, std::uint64_t cv_seed,
                          Exec exec = Exec::Serial);

// Vote cell: one dataset per source with identical ids and labels; every base
// model trains and tests on the same fold partition.
EvalReport cross_validate_vote(const LearnerSpec& spec,
                               const std::vector<std::pair<std::string, Dataset>>& source_datasets,
                               int k, std::uint64_t cv_seed, Exec exec = Exec::Serial);

// Generic engine behind both entry points. The trainer maps (training
// indices, fold index) to a predictor over instance indices; tests use it to
// plug oracle and baseline learners.
using FoldPredictorFactory =
    std::function<std::function<ClassDistribution(std::size_t)>(const std::vector<std::size_t>&, int)>;

EvalReport cross_validate_custom(const FoldPredictorFactory& trainer, const std::vector<int>& labels,
                                 std::size_t n_classes, int k, std::uint64_t cv_seed,
                                 Exec exec = Exec::Serial);

struct SummaryRow {
    std::string mode;
    std::string representation;
    double mean_accuracy = 0.0;
    double mean_auc = 0.0;
    int n_reports = 0;

    bool operator==(const SummaryRow&) const = default;
};

// Unweighted mean of accuracy and AUC over the algorithms of each
// (mode, representation) cell.
std::vector<SummaryRow> summarize(const std::vector<EvalReport>& reports);

} // namespace fuse
