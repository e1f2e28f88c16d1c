#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fuse/error.hpp"
#include "fuse/harness.hpp"
#include "fuse/preprocess.hpp"
#include "fuse/text.hpp"
#include "helpers.hpp"

using namespace fuse;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "fuse_harness_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

ExperimentConfig quick_config() {
    ExperimentConfig config;
    config.modes = {PipelineMode::MergeAll};
    config.representations = {Representation::Numerical};
    config.algorithms = {Algorithm::C45Tree, Algorithm::REPTree};
    return config;
}

} // namespace

TEST_CASE("default generator yields 40 students with a 21/19 split") {
    GenParams params;
    SyntheticCohort cohort = generate_synthetic(params, 1);
    CHECK(cohort.logs.n_rows() == 40);
    CHECK(cohort.emotion.n_rows() == 40);
    CHECK(cohort.gaze.n_rows() == 40);
    CHECK(cohort.scores.size() == 40);

    std::vector<double> marks;
    for (const auto& [id, m] : cohort.scores) marks.push_back(m);
    auto labels = discretize_class(marks, ClassCutoffs::pass_fail(), default_schema());
    CHECK(std::count(labels.begin(), labels.end(), 0) == 21);
    CHECK(std::count(labels.begin(), labels.end(), 1) == 19);

    // Emotion confidences live in [0,1]; counts are non-negative.
    for (const auto& row : cohort.emotion.rows)
        for (double v : row) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    for (const auto& ds : {cohort.logs, cohort.gaze})
        for (const auto& row : ds.rows)
            for (double v : row) CHECK(v >= 0.0);
}

TEST_CASE("two generator seeds differ in data but share schema and balance") {
    GenParams params;
    SyntheticCohort a = generate_synthetic(params, 1);
    SyntheticCohort b = generate_synthetic(params, 2);
    CHECK(a.logs.schema == b.logs.schema);
    CHECK(a.logs.rows != b.logs.rows);

    auto count_pass = [](const SyntheticCohort& c) {
        int pass = 0;
        for (const auto& [id, m] : c.scores)
            if (m >= 5.0) ++pass;
        return pass;
    };
    CHECK(count_pass(a) == 21);
    CHECK(count_pass(b) == 21);
}

TEST_CASE("at noise 0 a single-attribute stump attains perfect CV accuracy") {
    GenParams params;
    params.noise = 0.0;
    SyntheticCohort cohort = generate_synthetic(params, 1);
    Dataset merged = join_sources({cohort.logs, cohort.emotion, cohort.gaze}, cohort.scores);
    merged = label_by_score(merged, ClassCutoffs::pass_fail());
    Dataset numeric = min_max_normalize(merged).first;
    Dataset stump_input = project(numeric, {*numeric.schema.index_of("SummAll")});

    EvalReport report = cross_validate(LearnerSpec::make(Algorithm::C45Tree, 1), stump_input, 10, 1);
    CHECK(report.accuracy == doctest::Approx(100.0));
}

TEST_CASE("run_pipeline yields the full grid of reports") {
    ExperimentConfig config; // defaults: 3 modes x 2 representations x 6 algorithms
    ReportBundle bundle = run_pipeline(config);
    CHECK(bundle.reports.size() == 36);

    std::set<std::string> cells;
    for (const auto& r : bundle.reports) cells.insert(r.cell.to_string());
    CHECK(cells.size() == 36);

    // Accuracy granularity on a 40-student cohort.
    for (const auto& r : bundle.reports) {
        double multiple = r.accuracy / 2.5;
        CHECK(multiple == doctest::Approx(std::round(multiple)));
        CHECK(r.auc >= 0.0);
        CHECK(r.auc <= 1.0);
    }
    CHECK(bundle.summary.size() == 6);
    CHECK(bundle.best_rules.size() == 3);
}

TEST_CASE("single-mode config produces a table-1 shaped bundle only") {
    ExperimentConfig config;
    config.modes = {PipelineMode::MergeAll};
    ReportBundle bundle = run_pipeline(config);
    CHECK(bundle.reports.size() == 12);
    for (const auto& r : bundle.reports) CHECK(r.cell.mode == "merge_all");
    CHECK(bundle.selections.empty());
}

TEST_CASE("pipeline outputs are byte-identical across reruns") {
    ExperimentConfig config = quick_config();
    ReportBundle b1 = run_pipeline(config);
    ReportBundle b2 = run_pipeline(config);
    CHECK(b1 == b2);

    std::string dir1 = temp_dir("run1");
    std::string dir2 = temp_dir("run2");
    for (auto format : {RenderFormat::AlignedText, RenderFormat::Csv, RenderFormat::Json}) {
        render_tables(b1, format, dir1);
        render_tables(b2, format, dir2);
    }
    write_derived_data(config, dir1);
    write_derived_data(config, dir2);

    for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
        auto name = entry.path().filename().string();
        CHECK(slurp(dir1 + "/" + name) == slurp(dir2 + "/" + name));
    }
}

TEST_CASE("rendered Avg. row equals the column means within print rounding") {
    ExperimentConfig config;
    config.modes = {PipelineMode::MergeAll};
    ReportBundle bundle = run_pipeline(config);
    std::string dir = temp_dir("avg");
    render_tables(bundle, RenderFormat::AlignedText, dir);
    std::string table = slurp(dir + "/results_merge_all.txt");

    double sum = 0.0;
    int n = 0;
    for (const auto& r : bundle.reports)
        if (r.cell.representation == "numerical") {
            sum += r.accuracy;
            ++n;
        }
    double mean = sum / n;

    auto pos = table.find("Avg.");
    REQUIRE(pos != std::string::npos);
    std::istringstream row(table.substr(pos + 4));
    double printed = 0.0;
    row >> printed;
    CHECK(std::abs(printed - mean) <= 0.005 + 1e-12);
}

TEST_CASE("JSON bundle round-trips to an equal bundle") {
    ExperimentConfig config = quick_config();
    ReportBundle bundle = run_pipeline(config);
    std::string json_text = bundle_to_json(bundle);
    ReportBundle back = bundle_from_json(json_text);
    CHECK(back == bundle);
}

TEST_CASE("config files parse with defaults, lists and unknown-key errors") {
    ExperimentConfig config = parse_config_text(
        "# comment\n"
        "modes = merge_all, select_merged\n"
        "representations = numerical\n"
        "algorithms = C45Tree, NNGE\n"
        "k = 5\n"
        "cv_seed = 9\n"
        "noise = 0.1\n",
        std::nullopt);
    CHECK(config.modes.size() == 2);
    CHECK(config.representations.size() == 1);
    CHECK(config.algorithms.size() == 2);
    CHECK(config.k == 5);
    CHECK(config.cv_seed == 9);
    CHECK(config.gen.noise == doctest::Approx(0.1));
    CHECK(config.generator_seed == 1); // untouched default

    CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n", std::nullopt), ConfigError);
    CHECK_THROWS_AS(parse_config_text("k\n", std::nullopt), ConfigError);
    CHECK_THROWS_AS(parse_config_text("k = 1\n", std::nullopt), ConfigError);
    CHECK_THROWS_AS(parse_config_text("modes = bogus\n", std::nullopt), ConfigError);
    CHECK_THROWS_AS(parse_config_text("k = 5\nk = 6\n", std::nullopt), ConfigError);
}

TEST_CASE("FUSE_SEED fills only the seeds a config leaves unset") {
    ExperimentConfig config = parse_config_text("cv_seed = 3\n", 77);
    CHECK(config.cv_seed == 3);
    CHECK(config.generator_seed == 77);
    CHECK(config.learner_seed == 77);
    CHECK(config.anonymize_seed == 77);
}

TEST_CASE("config hash tracks content") {
    ExperimentConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.cv_seed = 2;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("rules_for_cell emits interpretable text for any grid cell") {
    ExperimentConfig config;
    for (const char* cell : {"merge_all:numerical:C45Tree", "select_merged:discretized:Ripper",
                             "ensemble_per_source:numerical:REPTree"}) {
        auto parts = split(cell, ':');
        std::string text = rules_for_cell(config, CellId{parts[0], parts[1], parts[2]});
        CHECK(text.find("Number of Rules:") != std::string::npos);
    }
    CHECK_THROWS_AS(rules_for_cell(config, CellId{"bogus", "numerical", "C45Tree"}), ConfigError);
}

TEST_CASE("the vote-across-algorithms escape hatch collapses the ensemble grid") {
    ExperimentConfig config;
    config.modes = {PipelineMode::EnsemblePerSource};
    config.representations = {Representation::Numerical};
    config.algorithms = {Algorithm::C45Tree, Algorithm::REPTree};
    config.vote_across_algorithms = true;
    ReportBundle bundle = run_pipeline(config);
    REQUIRE(bundle.reports.size() == 1);
    CHECK(bundle.reports[0].cell.algorithm == "Vote");
}

TEST_CASE("fit-in-fold mode runs the leakage-free variant deterministically") {
    ExperimentConfig config;
    config.modes = {PipelineMode::MergeAll, PipelineMode::SelectMerged,
                    PipelineMode::EnsemblePerSource};
    config.representations = {Representation::Numerical};
    config.algorithms = {Algorithm::REPTree};
    config.fit_in_fold = true;
    ReportBundle a = run_pipeline(config);
    ReportBundle b = run_pipeline(config);
    CHECK(a == b);
    CHECK(a.reports.size() == 3);
}

TEST_CASE("write_derived_data emits the numeric and discrete merged files") {
    ExperimentConfig config = quick_config();
    std::string dir = temp_dir("derived");
    auto written = write_derived_data(config, dir);
    CHECK(std::filesystem::exists(dir + "/merged.numeric.csv"));
    CHECK(std::filesystem::exists(dir + "/merged.discrete.csv"));
    CHECK(!std::filesystem::exists(dir + "/idmap.csv"));

    // Values in the numeric file are normalized; the discrete file carries
    // bin labels.
    std::string numeric = slurp(dir + "/merged.numeric.csv");
    CHECK(numeric.find("SummAll") != std::string::npos);
    std::string discrete = slurp(dir + "/merged.discrete.csv");
    CHECK(discrete.find("LOW") != std::string::npos);

    config.write_idmap = true;
    write_derived_data(config, dir);
    CHECK(std::filesystem::exists(dir + "/idmap.csv"));
}
