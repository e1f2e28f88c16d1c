#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "fuse/error.hpp"
#include "fuse/harness.hpp"
#include "fuse/text.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

fuse::ExperimentConfig config_from_options(const std::string& config_path,
                                           const std::string& data_dir,
                                           const std::string& out_dir) {
    fuse::ExperimentConfig config;
    if (!config_path.empty()) {
        config = fuse::parse_config_file(config_path);
    } else if (const char* env = std::getenv("FUSE_SEED")) {
        auto v = fuse::parse_int(env);
        if (!v) throw fuse::ConfigError("FUSE_SEED must be an integer");
        config.cv_seed = config.generator_seed = config.learner_seed = config.anonymize_seed =
            static_cast<std::uint64_t>(*v);
    }
    if (!data_dir.empty()) config.data_dir = data_dir;
    if (!out_dir.empty()) config.out_dir = out_dir;
    config.validate();
    return config;
}

int run_command(const std::string& config_path, const std::string& data_dir,
                const std::string& out_dir) {
    fuse::ExperimentConfig config = config_from_options(config_path, data_dir, out_dir);
    fuse::ReportBundle bundle = fuse::run_pipeline(config);

    std::vector<std::string> written = fuse::write_derived_data(config, config.out_dir);
    for (auto format :
         {fuse::RenderFormat::AlignedText, fuse::RenderFormat::Csv, fuse::RenderFormat::Json}) {
        auto paths = fuse::render_tables(bundle, format, config.out_dir);
        written.insert(written.end(), paths.begin(), paths.end());
    }
    for (const auto& path : written) std::cout << path << '\n';
    return kExitOk;
}

int gen_command(std::uint64_t seed, const std::string& out_dir, int n, int pass_count,
                double noise) {
    fuse::GenParams params;
    params.n_students = n;
    params.pass_count = pass_count;
    params.noise = noise;
    params.validate(0);
    fuse::SyntheticCohort cohort = fuse::generate_synthetic(params, seed);
    fuse::write_synthetic(cohort, out_dir);
    std::cout << out_dir << "/logs.csv\n"
              << out_dir << "/emotion.csv\n"
              << out_dir << "/gaze.csv\n"
              << out_dir << "/scores.csv\n";
    return kExitOk;
}

int select_command(const std::string& config_path, const std::string& data_dir) {
    fuse::ExperimentConfig config = config_from_options(config_path, data_dir, "");
    config.modes = {fuse::PipelineMode::SelectMerged, fuse::PipelineMode::EnsemblePerSource};
    fuse::ReportBundle bundle = fuse::run_pipeline(config);
    for (const auto& row : bundle.selections) {
        std::cout << row.mode << '\t' << row.representation << '\t' << row.dataset_name << '\t';
        for (std::size_t i = 0; i < row.selected.size(); ++i) {
            if (i) std::cout << ", ";
            std::cout << row.selected[i];
        }
        std::cout << "\t(merit " << fuse::format_fixed(row.merit, 4) << ")\n";
    }
    return kExitOk;
}

int rules_command(const std::string& cell_text, const std::string& config_path,
                  const std::string& data_dir) {
    auto parts = fuse::split(cell_text, ':');
    if (parts.size() != 3)
        throw fuse::ConfigError("--cell expects MODE:REPRESENTATION:ALGORITHM");
    fuse::ExperimentConfig config = config_from_options(config_path, data_dir, "");
    fuse::CellId cell{parts[0], parts[1], parts[2]};
    std::cout << fuse::rules_for_cell(config, cell);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal data-fusion pipeline for PASS/FAIL prediction"};
    app.require_subcommand(1);

    std::string config_path, data_dir, out_dir, cell;
    std::uint64_t seed = 1;
    int n_students = 40, pass_count = 21;
    double noise = 0.2;

    CLI::App* run = app.add_subcommand("run", "Run the experiment grid from a config file");
    run->add_option("--config", config_path, "Flat key-value config file");
    run->add_option("--data", data_dir, "Directory with logs/emotion/gaze/scores CSV files");
    run->add_option("--out", out_dir, "Output directory");

    CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic cohort");
    gen->add_option("--seed", seed, "Generator seed");
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--n", n_students, "Number of students");
    gen->add_option("--pass", pass_count, "Number of PASS students");
    gen->add_option("--noise", noise, "Signal noise level in [0,1]");

    CLI::App* sel = app.add_subcommand("select", "Report the selected attributes only");
    sel->add_option("--in", data_dir, "Directory with the four per-source CSV files");
    sel->add_option("--config", config_path, "Flat key-value config file");

    CLI::App* rules = app.add_subcommand("rules", "Dump the rule text for one grid cell");
    rules->add_option("--cell", cell, "MODE:REPRESENTATION:ALGORITHM")->required();
    rules->add_option("--config", config_path, "Flat key-value config file");
    rules->add_option("--in", data_dir, "Directory with the four per-source CSV files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return run_command(config_path, data_dir, out_dir);
        if (gen->parsed()) return gen_command(seed, out_dir, n_students, pass_count, noise);
        if (sel->parsed()) return select_command(config_path, data_dir);
        if (rules->parsed()) return rules_command(cell, config_path, data_dir);
    } catch (const fuse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fuse::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitConfig;
}
