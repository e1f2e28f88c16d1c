#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fuse/dataset.hpp"
#include "fuse/evaluation.hpp"
#include "fuse/preprocess.hpp"
#include "fuse/selection.hpp"

namespace fuse {

enum class PipelineMode { MergeAll, SelectMerged, EnsemblePerSource };
const char* mode_name(PipelineMode m);
std::optional<PipelineMode> mode_from_name(const std::string& name);

enum class Representation { Numerical, Discretized };
const char* representation_name(Representation r);
std::optional<Representation> representation_from_name(const std::string& name);

// Synthetic cohort controls. The generator plants the published rule shape:
// high summary activity, high fixation count on the content-image zone, and
// a clear surprise signal predict PASS; the remaining attributes are noise.
struct GenParams {
    int n_students = 40;
    int pass_count = 21;
    // Probability scale for drawing a signal attribute from the wrong class
    // range; per-attribute coefficients multiply this.
    double noise = 0.2;
    // Multipliers for the planted signal attributes (flip probability =
    // noise * coefficient, clamped to [0, 0.5]). The defaults plant one
    // strong signal per source so the per-source ensemble has genuinely
    // diverse bases; `table2_emphasis` shifts the weight onto the two log
    // attributes instead.
    double summ_all_coeff = 0.5;
    double cois_coeff = 0.6;
    double aoi3_coeff = 0.6;
    double surprise_coeff = 0.65;
    double happiness_coeff = 1.8;
    double aoi1_coeff = 1.9;

    // Alternative emphasis: the log attributes dominate and the gaze/emotion
    // signals stay below the level where merged correlation selection would
    // keep them, mirroring a selection run that retains only the two log
    // attributes.
    static GenParams table2_emphasis();

    void validate(int k) const;

    bool operator==(const GenParams&) const = default;
};

struct SyntheticCohort {
    Dataset logs;
    Dataset emotion;
    Dataset gaze;
    std::vector<std::pair<std::string, double>> scores;
};

SyntheticCohort generate_synthetic(const GenParams& params, std::uint64_t seed);

// Writes logs.csv, emotion.csv, gaze.csv and scores.csv into `dir`.
void write_synthetic(const SyntheticCohort& cohort, const std::string& dir);

struct ExperimentConfig {
    // Input: a directory holding the four per-source CSV files, or the
    // generator when empty.
    std::string data_dir;
    GenParams gen;

    std::vector<PipelineMode> modes = {PipelineMode::MergeAll, PipelineMode::SelectMerged,
                                       PipelineMode::EnsemblePerSource};
    std::vector<Representation> representations = {Representation::Numerical,
                                                   Representation::Discretized};
    std::vector<Algorithm> algorithms = all_algorithms();

    int k = 10;
    std::uint64_t cv_seed = 1;
    std::uint64_t generator_seed = 1;
    std::uint64_t learner_seed = 1;
    std::uint64_t anonymize_seed = 1;
    int n_bins = 3;
    double class_cutoff = 5.0;
    std::string out_dir = "out";

    bool fit_in_fold = false;          // leakage-free preprocessing/selection
    bool allow_missing = false;        // impute rather than reject empty cells
    bool vote_across_algorithms = false;
    bool write_idmap = false;
    int threads = 0;                   // 0 = library default team size

    void validate() const; // throws ConfigError

    bool operator==(const ExperimentConfig&) const = default;
};

// Flat key-value config file (`key = value`, lists comma separated, `#`
// comments). Unknown keys are ConfigErrors. The FUSE_SEED environment
// variable overrides every seed not set explicitly in the file.
ExperimentConfig parse_config_file(const std::string& path);
// One-line run provenance: all seeds, k, bins, cutoff and the config hash.
std::string provenance_line(const ExperimentConfig& config);
ExperimentConfig parse_config_text(const std::string& text,
                                   std::optional<std::uint64_t> env_seed);
std::uint64_t config_hash(const ExperimentConfig& config);

struct SelectionRow {
    std::string mode;
    std::string representation;
    std::string dataset_name;   // "merged" or the source name
    std::vector<std::string> selected; // attribute names
    double merit = 0.0;

    bool operator==(const SelectionRow&) const = default;
};

struct RuleDump {
    std::string mode;
    CellId cell;
    std::string text;

    bool operator==(const RuleDump&) const = default;
};

struct ReportBundle {
    ExperimentConfig config;
    std::vector<EvalReport> reports;       // one per grid cell
    std::vector<SelectionRow> selections;  // select_merged / ensemble tables
    std::vector<SummaryRow> summary;
    std::vector<RuleDump> best_rules;      // best cell per mode, retrained on all data

    bool operator==(const ReportBundle&) const = default;
};

// Runs the requested experiment grid end to end: ingest/generate, join,
// anonymize, build both representations, evaluate every
// (mode, representation, algorithm) cell, pick each mode's best cell and
// export its rules. Grid cells are independent parallel jobs.
ReportBundle run_pipeline(const ExperimentConfig& config);

enum class RenderFormat { AlignedText, Csv, Json };

// Renders result/selection/summary tables and rule dumps into `dir`. Every
// file carries a provenance header (seeds, k, bins, cutoffs, config hash).
// Returns the paths written.
std::vector<std::string> render_tables(const ReportBundle& bundle, RenderFormat format,
                                       const std::string& dir);

// JSON round trip for the whole bundle.
std::string bundle_to_json(const ReportBundle& bundle);
ReportBundle bundle_from_json(const std::string& json_text);

// Emits the derived `merged.numeric.csv` / `merged.discrete.csv` files (plus
// `idmap.csv` when configured) into `dir`; returns the paths written.
std::vector<std::string> write_derived_data(const ExperimentConfig& config,
                                            const std::string& dir);

// Rule text for one cell, trained on the full cohort (used by `fuse rules`).
std::string rules_for_cell(const ExperimentConfig& config, const CellId& cell);

} // namespace fuse
