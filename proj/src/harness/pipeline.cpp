#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "fuse/error.hpp"
#include "fuse/harness.hpp"
#include "fuse/rng.hpp"

namespace fuse {

namespace {

struct PipelineData {
    Dataset raw;         // merged + anonymized + labeled, source units
    Dataset numerical;   // min-max normalized
    Dataset discretized; // equal-width bins over the normalized values
    IdMap idmap;
};

PipelineData prepare_data(const ExperimentConfig& config) {
    SyntheticCohort cohort;
    if (config.data_dir.empty()) {
        cohort = generate_synthetic(config.gen, config.generator_seed);
    } else {
        const Schema schema = default_schema();
        cohort.logs = load_source_csv(config.data_dir + "/logs.csv", Source::Logs, schema,
                                      config.allow_missing);
        cohort.emotion = load_source_csv(config.data_dir + "/emotion.csv", Source::Emotion, schema,
                                         config.allow_missing);
        cohort.gaze = load_source_csv(config.data_dir + "/gaze.csv", Source::Gaze, schema,
                                      config.allow_missing);
        cohort.scores = load_scores_csv(config.data_dir + "/scores.csv");
    }

    Dataset joined = join_sources({cohort.logs, cohort.emotion, cohort.gaze}, cohort.scores);
    auto [anon, idmap] = anonymize(joined, config.anonymize_seed);
    Dataset labeled = label_by_score(anon, ClassCutoffs::pass_fail(config.class_cutoff));

    PipelineData data;
    data.raw = std::move(labeled);
    auto [numerical, norm_params] = min_max_normalize(data.raw, Exec::Parallel);
    (void)norm_params;
    data.numerical = std::move(numerical);
    auto [discretized, bin_params] = equal_width_discretize(data.numerical, config.n_bins,
                                                            Exec::Parallel);
    (void)bin_params;
    data.discretized = std::move(discretized);
    data.idmap = std::move(idmap);
    return data;
}

const Dataset& representation_of(const PipelineData& data, Representation rep) {
    return rep == Representation::Numerical ? data.numerical : data.discretized;
}

std::vector<std::size_t> source_indices(const Schema& schema, Source s) { return schema.indices_for(s); }

struct CellJob {
    PipelineMode mode;
    Representation rep;
    Algorithm algo;
};

// Fold-local preprocessing for the leakage-free mode: fit normalization,
// binning and selection on the training rows only.
struct FoldPrep {
    NormalizationParams norm;
    std::optional<BinningParams> bins;
    std::vector<std::size_t> keep; // attribute subset (indices into the full schema)

    std::vector<double> transform(const Dataset& raw, std::size_t i) const {
        std::vector<double> row = raw.rows[i];
        for (std::size_t a = 0; a < row.size(); ++a) {
            const auto [lo, hi] = norm.ranges[a];
            double span = hi - lo;
            double z = span > 0.0 ? (row[a] - lo) / span : 0.0;
            row[a] = std::clamp(z, 0.0, 1.0);
        }
        if (bins) {
            for (std::size_t a = 0; a < row.size(); ++a) {
                const auto& ab = bins->attrs[a];
                int idx = 0;
                if (ab.bin_width > 0.0) {
                    idx = static_cast<int>(std::floor((row[a] - ab.min) / ab.bin_width));
                    idx = std::clamp(idx, 0, ab.n_bins - 1);
                }
                row[a] = static_cast<double>(idx);
            }
        }
        std::vector<double> out;
        out.reserve(keep.size());
        for (std::size_t a : keep) out.push_back(row[a]);
        return out;
    }
};

Dataset subset_rows(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.schema = ds.schema;
    for (std::size_t i : idx) {
        out.ids.push_back(ds.ids[i]);
        out.rows.push_back(ds.rows[i]);
        if (!ds.labels.empty()) out.labels.push_back(ds.labels[i]);
        if (!ds.scores.empty()) out.scores.push_back(ds.scores[i]);
    }
    return out;
}

std::vector<std::size_t> identity_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

// Builds the fold-local view of the merged dataset for one representation:
// params fitted on the training rows, then applied to everything.
FoldPrep fit_fold_prep(const ExperimentConfig& config, const Dataset& raw,
                       const std::vector<std::size_t>& train_idx, Representation rep) {
    FoldPrep prep;
    Dataset train_raw = subset_rows(raw, train_idx);
    auto [train_num, norm] = min_max_normalize(train_raw);
    prep.norm = norm;
    if (rep == Representation::Discretized) {
        auto [train_disc, bins] = equal_width_discretize(train_num, config.n_bins);
        prep.bins = bins;
    }
    prep.keep = identity_indices(raw.schema.size());
    return prep;
}

Dataset materialize(const Dataset& raw, const FoldPrep& prep,
                    const std::optional<Representation>& rep_for_schema, int n_bins,
                    const std::vector<std::size_t>& idx) {
    // Build a dataset whose rows went through the fold transform.
    std::vector<Attribute> attrs;
    for (std::size_t a : prep.keep) attrs.push_back(raw.schema.attribute(a));
    if (rep_for_schema && *rep_for_schema == Representation::Discretized) {
        std::vector<std::string> labels =
            n_bins == 3 ? std::vector<std::string>{"LOW", "MEDIUM", "HIGH"} : [&] {
                std::vector<std::string> out;
                for (int i = 1; i <= n_bins; ++i) out.push_back("B" + std::to_string(i));
                return out;
            }();
        for (auto& a : attrs) {
            a.kind = Kind::Categorical;
            a.categories = labels;
        }
    }
    Dataset out;
    out.schema = Schema(std::move(attrs), raw.schema.class_labels());
    for (std::size_t i : idx) {
        out.ids.push_back(raw.ids[i]);
        out.rows.push_back(prep.transform(raw, i));
        out.labels.push_back(raw.labels[i]);
    }
    return out;
}

struct SelectionBundle {
    // Fidelity-mode selections, computed once on the full prepared data.
    std::map<std::string, FeatureSubset> merged;              // key: representation
    std::map<std::string, std::vector<std::pair<Source, FeatureSubset>>> per_source;
};

SelectionBundle run_selection(const PipelineData& data, const ExperimentConfig& config) {
    SelectionBundle out;
    for (Representation rep : config.representations) {
        const Dataset& ds = representation_of(data, rep);
        out.merged[representation_name(rep)] = select_best_first(ds, Exec::Parallel);
        std::vector<std::pair<Source, FeatureSubset>> rows;
        for (Source s : {Source::Logs, Source::Emotion, Source::Gaze}) {
            auto idx = source_indices(ds.schema, s);
            if (idx.empty()) continue;
            Dataset src = project(ds, idx);
            FeatureSubset sel = select_best_first(src, Exec::Parallel);
            // Map the source-local indices back into the merged schema.
            FeatureSubset mapped = sel;
            mapped.indices.clear();
            for (std::size_t local : sel.indices) mapped.indices.push_back(idx[local]);
            rows.emplace_back(s, std::move(mapped));
        }
        out.per_source[representation_name(rep)] = std::move(rows);
    }
    return out;
}

EvalReport evaluate_cell_fidelity(const CellJob& job, const PipelineData& data,
                                  const SelectionBundle& selections,
                                  const ExperimentConfig& config) {
    const Dataset& full = representation_of(data, job.rep);
    LearnerSpec spec = LearnerSpec::make(job.algo, config.learner_seed);

    switch (job.mode) {
        case PipelineMode::MergeAll:
            return cross_validate(spec, full, config.k, config.cv_seed, Exec::Serial);
        case PipelineMode::SelectMerged: {
            const auto& subset = selections.merged.at(representation_name(job.rep));
            return cross_validate(spec, project(full, subset.indices), config.k, config.cv_seed,
                                  Exec::Serial);
        }
        case PipelineMode::EnsemblePerSource: {
            std::vector<std::pair<std::string, Dataset>> sources;
            for (const auto& [src, sel] :
                 selections.per_source.at(representation_name(job.rep)))
                sources.emplace_back(source_name(src), project(full, sel.indices));
            return cross_validate_vote(spec, sources, config.k, config.cv_seed, Exec::Serial);
        }
    }
    throw ConfigError("unknown pipeline mode");
}

// Leakage-free evaluation: every fold refits normalization/binning (and the
// selection, where the mode uses one) on its own training rows.
EvalReport evaluate_cell_in_fold(const CellJob& job, const PipelineData& data,
                                 const ExperimentConfig& config) {
    const Dataset& raw = data.raw;
    LearnerSpec base_spec = LearnerSpec::make(job.algo, config.learner_seed);

    FoldPredictorFactory trainer = [&, job](const std::vector<std::size_t>& train_idx, int fold) {
        LearnerSpec spec = base_spec;
        spec.seed = mix_seed(base_spec.seed, static_cast<std::uint64_t>(fold));

        FoldPrep prep = fit_fold_prep(config, raw, train_idx, job.rep);
        std::optional<Representation> rep = job.rep;

        if (job.mode == PipelineMode::MergeAll || job.mode == PipelineMode::SelectMerged) {
            Dataset train_ds = materialize(raw, prep, rep, config.n_bins, train_idx);
            FoldPrep final_prep = prep;
            if (job.mode == PipelineMode::SelectMerged) {
                FeatureSubset sel = select_best_first(train_ds);
                final_prep.keep = sel.indices;
                train_ds = project(train_ds, sel.indices);
            }
            Model model = train(spec, train_ds);
            return std::function<ClassDistribution(std::size_t)>(
                [model = std::move(model), final_prep, &raw](std::size_t i) {
                    return predict_distribution(model, final_prep.transform(raw, i));
                });
        }

        // Per-source ensemble: selection and a base model per source.
        std::vector<FoldPrep> preps;
        std::vector<Model> bases;
        std::size_t b = 0;
        for (Source s : {Source::Logs, Source::Emotion, Source::Gaze}) {
            auto idx = source_indices(raw.schema, s);
            if (idx.empty()) continue;
            FoldPrep src_prep = prep;
            src_prep.keep = idx;
            Dataset train_src = materialize(raw, src_prep, rep, config.n_bins, train_idx);
            FeatureSubset sel = select_best_first(train_src);
            std::vector<std::size_t> kept;
            for (std::size_t local : sel.indices) kept.push_back(idx[local]);
            src_prep.keep = kept;
            Dataset train_kept = materialize(raw, src_prep, rep, config.n_bins, train_idx);
            LearnerSpec src_spec = spec;
            src_spec.seed = mix_seed(spec.seed, b++);
            bases.push_back(train(src_spec, train_kept));
            preps.push_back(std::move(src_prep));
        }
        return std::function<ClassDistribution(std::size_t)>(
            [bases = std::move(bases), preps = std::move(preps), &raw](std::size_t i) {
                ClassDistribution mean;
                for (std::size_t m = 0; m < bases.size(); ++m) {
                    ClassDistribution d = predict_distribution(bases[m], preps[m].transform(raw, i));
                    if (mean.probs.empty()) mean.probs.assign(d.probs.size(), 0.0);
                    for (std::size_t c = 0; c < d.probs.size(); ++c) mean.probs[c] += d.probs[c];
                }
                for (double& p : mean.probs) p /= static_cast<double>(bases.size());
                return mean;
            });
    };

    return cross_validate_custom(trainer, raw.labels, raw.schema.n_classes(), config.k,
                                 config.cv_seed, Exec::Serial);
}

// One Vote cell over every configured algorithm on every source (the
// heterogeneous-ensemble escape hatch).
EvalReport evaluate_vote_across(const Representation rep, const PipelineData& data,
                                const SelectionBundle& selections,
                                const ExperimentConfig& config) {
    const Dataset& full = representation_of(data, rep);
    std::vector<std::pair<std::string, Dataset>> sources;
    for (const auto& [src, sel] : selections.per_source.at(representation_name(rep)))
        sources.emplace_back(source_name(src), project(full, sel.indices));

    FoldPredictorFactory trainer = [&](const std::vector<std::size_t>& train_idx, int fold) {
        std::vector<std::pair<std::size_t, Model>> bases; // (source index, model)
        std::size_t b = 0;
        for (Algorithm algo : config.algorithms) {
            for (std::size_t s = 0; s < sources.size(); ++s) {
                LearnerSpec spec = LearnerSpec::make(algo, config.learner_seed);
                spec.seed = mix_seed(mix_seed(config.learner_seed,
                                              static_cast<std::uint64_t>(fold)),
                                     b++);
                bases.emplace_back(s, train(spec, subset_rows(sources[s].second, train_idx)));
            }
        }
        return std::function<ClassDistribution(std::size_t)>(
            [bases = std::move(bases), &sources](std::size_t i) {
                ClassDistribution mean;
                for (const auto& [s, model] : bases) {
                    ClassDistribution d = predict_distribution(model, sources[s].second.rows[i]);
                    if (mean.probs.empty()) mean.probs.assign(d.probs.size(), 0.0);
                    for (std::size_t c = 0; c < d.probs.size(); ++c) mean.probs[c] += d.probs[c];
                }
                for (double& p : mean.probs) p /= static_cast<double>(bases.size());
                return mean;
            });
    };

    EvalReport report = cross_validate_custom(trainer, full.labels, full.schema.n_classes(),
                                              config.k, config.cv_seed, Exec::Serial);
    report.cell = CellId{mode_name(PipelineMode::EnsemblePerSource), representation_name(rep),
                         "Vote"};
    return report;
}

std::string rules_for_trained_cell(const CellJob& job, const PipelineData& data,
                                   const SelectionBundle& selections,
                                   const ExperimentConfig& config) {
    const Dataset& full = representation_of(data, job.rep);
    LearnerSpec spec = LearnerSpec::make(job.algo, config.learner_seed);
    switch (job.mode) {
        case PipelineMode::MergeAll: return export_rules(train(spec, full));
        case PipelineMode::SelectMerged: {
            const auto& subset = selections.merged.at(representation_name(job.rep));
            return export_rules(train(spec, project(full, subset.indices)));
        }
        case PipelineMode::EnsemblePerSource: {
            VoteModel vote;
            for (const auto& [src, sel] :
                 selections.per_source.at(representation_name(job.rep))) {
                Dataset source_ds = project(full, sel.indices);
                vote.bases.emplace_back(source_name(src), train(spec, source_ds));
            }
            return export_rules(vote);
        }
    }
    throw ConfigError("unknown pipeline mode");
}

} // namespace

ReportBundle run_pipeline(const ExperimentConfig& config) {
    config.validate();
    set_threads(config.threads);

    PipelineData data = prepare_data(config);
    SelectionBundle selections = run_selection(data, config);

    ReportBundle bundle;
    bundle.config = config;
    // Where the results land and how many threads ran are invocation details,
    // not experiment identity; keep the recorded config invariant to them.
    bundle.config.out_dir = ExperimentConfig{}.out_dir;
    bundle.config.threads = 0;

    // Selection tables (merged for select_merged, per source for the ensemble).
    for (Representation rep : config.representations) {
        const std::string rep_name = representation_name(rep);
        if (std::find(config.modes.begin(), config.modes.end(), PipelineMode::SelectMerged) !=
            config.modes.end()) {
            const auto& sel = selections.merged.at(rep_name);
            SelectionRow row;
            row.mode = mode_name(PipelineMode::SelectMerged);
            row.representation = rep_name;
            row.dataset_name = "merged";
            for (std::size_t i : sel.indices)
                row.selected.push_back(data.numerical.schema.attribute(i).name);
            row.merit = sel.merit;
            bundle.selections.push_back(std::move(row));
        }
        if (std::find(config.modes.begin(), config.modes.end(),
                      PipelineMode::EnsemblePerSource) != config.modes.end()) {
            for (const auto& [src, sel] : selections.per_source.at(rep_name)) {
                SelectionRow row;
                row.mode = mode_name(PipelineMode::EnsemblePerSource);
                row.representation = rep_name;
                row.dataset_name = source_name(src);
                for (std::size_t i : sel.indices)
                    row.selected.push_back(data.numerical.schema.attribute(i).name);
                row.merit = sel.merit;
                bundle.selections.push_back(std::move(row));
            }
        }
    }

    // Grid cells are independent jobs; results land in preassigned slots.
    std::vector<CellJob> jobs;
    std::vector<bool> vote_across_slot;
    for (PipelineMode mode : config.modes)
        for (Representation rep : config.representations) {
            if (mode == PipelineMode::EnsemblePerSource && config.vote_across_algorithms) {
                jobs.push_back(CellJob{mode, rep, config.algorithms.front()});
                vote_across_slot.push_back(true);
                continue;
            }
            for (Algorithm algo : config.algorithms) {
                jobs.push_back(CellJob{mode, rep, algo});
                vote_across_slot.push_back(false);
            }
        }

    std::vector<EvalReport> reports(jobs.size());
    parallel_for(jobs.size(), Exec::Parallel, [&](std::size_t j) {
        const CellJob& job = jobs[j];
        EvalReport report;
        if (vote_across_slot[j]) {
            report = evaluate_vote_across(job.rep, data, selections, config);
        } else if (config.fit_in_fold) {
            report = evaluate_cell_in_fold(job, data, config);
            report.cell = CellId{mode_name(job.mode), representation_name(job.rep),
                                 algorithm_name(job.algo)};
        } else {
            report = evaluate_cell_fidelity(job, data, selections, config);
            report.cell = CellId{mode_name(job.mode), representation_name(job.rep),
                                 algorithm_name(job.algo)};
        }
        reports[j] = std::move(report);
    });
    bundle.reports = std::move(reports);

    bundle.summary = summarize(bundle.reports);

    // Best cell per mode: highest accuracy, then AUC, then grid order.
    for (PipelineMode mode : config.modes) {
        const EvalReport* best = nullptr;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].mode != mode) continue;
            const EvalReport& r = bundle.reports[j];
            if (!best || r.accuracy > best->accuracy ||
                (r.accuracy == best->accuracy && r.auc > best->auc)) {
                best = &r;
                best_j = j;
            }
        }
        if (!best) continue;
        RuleDump dump;
        dump.mode = mode_name(mode);
        dump.cell = best->cell;
        if (vote_across_slot[best_j]) {
            // Escape-hatch cell: dump the same-structure vote trained on all data.
            VoteModel vote;
            const Dataset& full = representation_of(data, jobs[best_j].rep);
            for (const auto& [src, sel] :
                 selections.per_source.at(representation_name(jobs[best_j].rep))) {
                Dataset source_ds = project(full, sel.indices);
                for (Algorithm algo : config.algorithms) {
                    LearnerSpec spec = LearnerSpec::make(algo, config.learner_seed);
                    vote.bases.emplace_back(std::string(source_name(src)) + ":" +
                                                algorithm_name(algo),
                                            train(spec, source_ds));
                }
            }
            dump.text = export_rules(vote);
        } else {
            dump.text = rules_for_trained_cell(jobs[best_j], data, selections, config);
        }
        bundle.best_rules.push_back(std::move(dump));
    }

    return bundle;
}

std::vector<std::string> write_derived_data(const ExperimentConfig& config,
                                            const std::string& dir) {
    config.validate();
    PipelineData data = prepare_data(config);
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;

    EmitOptions opts;
    opts.include_label = true;
    opts.header_comment = provenance_line(config);
    write_dataset_csv(data.numerical, dir + "/merged.numeric.csv", opts);
    written.push_back(dir + "/merged.numeric.csv");
    write_dataset_csv(data.discretized, dir + "/merged.discrete.csv", opts);
    written.push_back(dir + "/merged.discrete.csv");

    if (config.write_idmap) {
        std::ofstream out(dir + "/idmap.csv", std::ios::binary);
        if (!out) throw DataError("cannot write '" + dir + "/idmap.csv'");
        out << "# " << provenance_line(config) << '\n';
        out << "original,anonymous\n";
        for (const auto& [orig, anon] : data.idmap.pairs) out << orig << ',' << anon << '\n';
        written.push_back(dir + "/idmap.csv");
    }
    return written;
}

std::string rules_for_cell(const ExperimentConfig& config, const CellId& cell) {
    config.validate();
    auto mode = mode_from_name(cell.mode);
    auto rep = representation_from_name(cell.representation);
    auto algo = algorithm_from_name(cell.algorithm);
    if (!mode || !rep || !algo)
        throw ConfigError("unknown cell '" + cell.to_string() + "'");

    ExperimentConfig local = config;
    local.representations = {*rep};
    PipelineData data = prepare_data(local);
    SelectionBundle selections = run_selection(data, local);
    return rules_for_trained_cell(CellJob{*mode, *rep, *algo}, data, selections, local);
}

} // namespace fuse
