#include "fuse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fuse/error.hpp"
#include "fuse/rng.hpp"

namespace fuse {

FoldAssignment stratified_folds(const std::vector<int>& labels, std::size_t n_classes, int k,
                                std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 2) throw ConfigError("stratified_folds: k must be >= 2");
    if (static_cast<std::size_t>(k) > n) throw ConfigError("stratified_folds: k exceeds n");

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> per_class(n_classes);
    for (std::size_t i = 0; i < n; ++i) per_class[static_cast<std::size_t>(labels[i])].push_back(i);

    FoldAssignment fa;
    fa.fold_of.assign(n, 0);
    fa.k = k;
    fa.seed = seed;

    // One continuous round-robin deal across classes keeps both the per-class
    // and the total fold sizes within one of each other.
    int next_fold = 0;
    for (auto& members : per_class) {
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j) {
            fa.fold_of[members[j]] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return fa;
}

double accuracy_pct(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) throw DataError("accuracy: length mismatch");
    if (truth.empty()) throw DataError("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predicted[i] == truth[i]) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

double auc(const std::vector<double>& positive_probs, const std::vector<int>& truth,
           int positive_class) {
    if (positive_probs.size() != truth.size()) throw DataError("auc: length mismatch");
    const std::size_t n = truth.size();
    std::size_t n_pos = 0;
    for (int t : truth)
        if (t == positive_class) ++n_pos;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("auc: needs at least one instance of each class");

    // Midranks over the scores, then the Mann-Whitney statistic.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (positive_probs[a] != positive_probs[b]) return positive_probs[a] < positive_probs[b];
        return a < b;
    });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && positive_probs[order[j]] == positive_probs[order[i]]) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (truth[order[t]] == positive_class) rank_sum_pos += midrank;
        i = j;
    }
    double u = rank_sum_pos -
               static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport cross_validate_custom(const FoldPredictorFactory& trainer, const std::vector<int>& labels,
                                 std::size_t n_classes, int k, std::uint64_t cv_seed, Exec exec) {
    const std::size_t n = labels.size();
    if (n == 0) throw DataError("cross_validate: empty dataset");
    FoldAssignment folds = stratified_folds(labels, n_classes, k, cv_seed);

    std::vector<std::vector<std::size_t>> train_sets(static_cast<std::size_t>(k)),
        test_sets(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        for (int f = 0; f < k; ++f)
            (f == folds.fold_of[i] ? test_sets : train_sets)[static_cast<std::size_t>(f)]
                .push_back(i);
    }

    EvalReport report;
    report.true_labels = labels;
    report.predicted_labels.assign(n, 0);
    report.positive_probs.assign(n, 0.0);

    // Folds are independent jobs; every prediction lands in its instance slot.
    parallel_for(static_cast<std::size_t>(k), exec, [&](std::size_t f) {
        auto predict = trainer(train_sets[f], static_cast<int>(f));
        for (std::size_t i : test_sets[f]) {
            ClassDistribution dist = predict(i);
            report.predicted_labels[i] = dist.argmax();
            report.positive_probs[i] = dist.probs.empty() ? 0.0 : dist.probs[0];
        }
    });

    report.accuracy = accuracy_pct(report.predicted_labels, report.true_labels);
    report.auc = auc(report.positive_probs, report.true_labels, 0);
    return report;
}

EvalReport cross_validate(const LearnerSpec& spec, const Dataset& ds, int k, std::uint64_t cv_seed,
                          Exec exec) {
    if (!ds.labeled()) throw DataError("cross_validate: dataset has no labels");
    FoldPredictorFactory trainer = [&](const std::vector<std::size_t>& train_idx, int fold) {
        Dataset train_ds;
        train_ds.schema = ds.schema;
        for (std::size_t i : train_idx) {
            train_ds.ids.push_back(ds.ids[i]);
            train_ds.rows.push_back(ds.rows[i]);
            train_ds.labels.push_back(ds.labels[i]);
        }
        LearnerSpec fold_spec = spec;
        fold_spec.seed = mix_seed(spec.seed, static_cast<std::uint64_t>(fold));
        Model model = train(fold_spec, train_ds);
        return [model = std::move(model), &ds](std::size_t i) {
            return predict_distribution(model, ds.rows[i]);
        };
    };
    EvalReport report =
        cross_validate_custom(trainer, ds.labels, ds.schema.n_classes(), k, cv_seed, exec);
    report.cell.algorithm = algorithm_name(spec.algorithm);
    return report;
}

EvalReport cross_validate_vote(const LearnerSpec& spec,
                               const std::vector<std::pair<std::string, Dataset>>& source_datasets,
                               int k, std::uint64_t cv_seed, Exec exec) {
    if (source_datasets.empty()) throw DataError("cross_validate_vote: no source datasets");
    const Dataset& first = source_datasets.front().second;
    if (!first.labeled()) throw DataError("cross_validate_vote: datasets have no labels");
    for (const auto& [name, d] : source_datasets) {
        (void)name;
        if (d.ids != first.ids || d.labels != first.labels)
            throw DataError("cross_validate_vote: sources disagree on ids or labels");
    }

    FoldPredictorFactory trainer = [&](const std::vector<std::size_t>& train_idx, int fold) {
        VoteModel vote;
        for (std::size_t b = 0; b < source_datasets.size(); ++b) {
            const auto& [name, src] = source_datasets[b];
            Dataset train_ds;
            train_ds.schema = src.schema;
            for (std::size_t i : train_idx) {
                train_ds.ids.push_back(src.ids[i]);
                train_ds.rows.push_back(src.rows[i]);
                train_ds.labels.push_back(src.labels[i]);
            }
            LearnerSpec fold_spec = spec;
            fold_spec.seed =
                mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(fold)), b);
            vote.bases.emplace_back(name, train(fold_spec, train_ds));
        }
        return [vote = std::move(vote), &source_datasets](std::size_t i) {
            ClassDistribution mean;
            for (std::size_t b = 0; b < vote.bases.size(); ++b) {
                ClassDistribution d =
                    predict_distribution(vote.bases[b].second, source_datasets[b].second.rows[i]);
                if (mean.probs.empty()) mean.probs.assign(d.probs.size(), 0.0);
                for (std::size_t c = 0; c < d.probs.size(); ++c) mean.probs[c] += d.probs[c];
            }
            for (double& p : mean.probs) p /= static_cast<double>(vote.bases.size());
            return mean;
        };
    };
    EvalReport report =
        cross_validate_custom(trainer, first.labels, first.schema.n_classes(), k, cv_seed, exec);
    report.cell.algorithm = algorithm_name(spec.algorithm);
    return report;
}

std::vector<SummaryRow> summarize(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw DataError("summarize: no reports");
    std::vector<SummaryRow> rows;
    auto row_for = [&](const std::string& mode, const std::string& rep) -> SummaryRow& {
        for (auto& r : rows)
            if (r.mode == mode && r.representation == rep) return r;
        rows.push_back(SummaryRow{mode, rep, 0.0, 0.0, 0});
        return rows.back();
    };
    for (const auto& report : reports) {
        SummaryRow& row = row_for(report.cell.mode, report.cell.representation);
        row.mean_accuracy += report.accuracy;
        row.mean_auc += report.auc;
        row.n_reports += 1;
    }
    for (auto& row : rows) {
        row.mean_accuracy /= static_cast<double>(row.n_reports);
        row.mean_auc /= static_cast<double>(row.n_reports);
    }
    return rows;
}

} // namespace fuse
