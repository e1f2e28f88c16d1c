#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fuse/error.hpp"
#include "fuse/harness.hpp"
#include "fuse/text.hpp"

namespace fuse {

namespace {

using nlohmann::json;

} // namespace

std::string provenance_line(const ExperimentConfig& c) {
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(c)));
    std::ostringstream out;
    out << "cv_seed=" << c.cv_seed << " generator_seed=" << c.generator_seed
        << " learner_seed=" << c.learner_seed << " anonymize_seed=" << c.anonymize_seed
        << " k=" << c.k << " n_bins=" << c.n_bins << " class_cutoff=" << format_double(c.class_cutoff)
        << " config_hash=" << hash;
    return out.str();
}

namespace {

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << content;
    written.push_back(path);
}

// Cells of one mode keyed by (representation, algorithm) for table layout.
struct ModeTable {
    std::vector<std::string> algorithms; // row order
    std::map<std::string, std::map<std::string, const EvalReport*>> cells; // rep -> algo -> report
};

ModeTable table_for_mode(const ReportBundle& bundle, const std::string& mode) {
    ModeTable t;
    for (const auto& r : bundle.reports) {
        if (r.cell.mode != mode) continue;
        if (std::find(t.algorithms.begin(), t.algorithms.end(), r.cell.algorithm) ==
            t.algorithms.end())
            t.algorithms.push_back(r.cell.algorithm);
        t.cells[r.cell.representation][r.cell.algorithm] = &r;
    }
    return t;
}

std::vector<std::string> representation_order(const ReportBundle& bundle) {
    std::vector<std::string> reps;
    for (Representation r : bundle.config.representations)
        reps.emplace_back(representation_name(r));
    return reps;
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string aligned_results_table(const ReportBundle& bundle, const std::string& mode) {
    ModeTable t = table_for_mode(bundle, mode);
    auto reps = representation_order(bundle);
    std::ostringstream out;
    out << "# " << provenance_line(bundle.config) << "\n";
    out << "# results: " << mode << "\n";

    char line[256];
    out << std::string(22, ' ');
    for (const auto& rep : reps) {
        std::snprintf(line, sizeof(line), "%-24s", (upper(rep) + " DATA").c_str());
        out << line;
    }
    out << "\n";
    std::snprintf(line, sizeof(line), "%-22s", "Algorithm");
    out << line;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        std::snprintf(line, sizeof(line), "%12s%12s", "%Accuracy", "AUC");
        out << line;
    }
    out << "\n";

    std::map<std::string, std::pair<double, double>> sums; // rep -> (acc, auc)
    for (const auto& algo : t.algorithms) {
        std::snprintf(line, sizeof(line), "%-22s", algo.c_str());
        out << line;
        for (const auto& rep : reps) {
            const EvalReport* r = t.cells[rep].count(algo) ? t.cells[rep][algo] : nullptr;
            if (r) {
                std::snprintf(line, sizeof(line), "%12.2f%12.2f", r->accuracy, r->auc);
                sums[rep].first += r->accuracy;
                sums[rep].second += r->auc;
            } else {
                std::snprintf(line, sizeof(line), "%12s%12s", "-", "-");
            }
            out << line;
        }
        out << "\n";
    }
    std::snprintf(line, sizeof(line), "%-22s", "Avg.");
    out << line;
    const double n = static_cast<double>(t.algorithms.size());
    for (const auto& rep : reps) {
        std::snprintf(line, sizeof(line), "%12.2f%12.2f", sums[rep].first / n,
                      sums[rep].second / n);
        out << line;
    }
    out << "\n";
    return out.str();
}

std::string aligned_selection_table(const ReportBundle& bundle) {
    std::ostringstream out;
    out << "# " << provenance_line(bundle.config) << "\n";
    char line[512];
    std::snprintf(line, sizeof(line), "%-22s%-16s%-10s%-12s%s\n", "Mode", "Representation",
                  "Dataset", "#selected", "Selected features");
    out << line;
    for (const auto& row : bundle.selections) {
        std::string names;
        for (std::size_t i = 0; i < row.selected.size(); ++i) {
            if (i) names += ", ";
            names += row.selected[i];
        }
        std::snprintf(line, sizeof(line), "%-22s%-16s%-10s%-12zu%s\n", row.mode.c_str(),
                      row.representation.c_str(), row.dataset_name.c_str(), row.selected.size(),
                      names.c_str());
        out << line;
    }
    return out.str();
}

std::string aligned_summary_table(const ReportBundle& bundle) {
    auto reps = representation_order(bundle);
    std::ostringstream out;
    out << "# " << provenance_line(bundle.config) << "\n";
    out << "# average prediction performance per fusion approach\n";
    char line[256];
    out << std::string(22, ' ');
    for (const auto& rep : reps) {
        std::snprintf(line, sizeof(line), "%-24s", (upper(rep) + " DATA").c_str());
        out << line;
    }
    out << "\n";
    std::snprintf(line, sizeof(line), "%-22s", "Approach");
    out << line;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        std::snprintf(line, sizeof(line), "%12s%12s", "%Accuracy", "AUC");
        out << line;
    }
    out << "\n";
    for (PipelineMode mode : bundle.config.modes) {
        std::snprintf(line, sizeof(line), "%-22s", mode_name(mode));
        out << line;
        for (const auto& rep : reps) {
            const SummaryRow* found = nullptr;
            for (const auto& row : bundle.summary)
                if (row.mode == mode_name(mode) && row.representation == rep) found = &row;
            if (found)
                std::snprintf(line, sizeof(line), "%12.2f%12.2f", found->mean_accuracy,
                              found->mean_auc);
            else
                std::snprintf(line, sizeof(line), "%12s%12s", "-", "-");
            out << line;
        }
        out << "\n";
    }
    return out.str();
}

// --- JSON --------------------------------------------------------------------

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["data_dir"] = c.data_dir;
    j["gen"] = {{"n_students", c.gen.n_students},
                {"pass_count", c.gen.pass_count},
                {"noise", c.gen.noise},
                {"coeff_summ_all", c.gen.summ_all_coeff},
                {"coeff_cois", c.gen.cois_coeff},
                {"coeff_aoi3", c.gen.aoi3_coeff},
                {"coeff_surprise", c.gen.surprise_coeff},
                {"coeff_happiness", c.gen.happiness_coeff},
                {"coeff_aoi1", c.gen.aoi1_coeff}};
    j["modes"] = json::array();
    for (auto m : c.modes) j["modes"].push_back(mode_name(m));
    j["representations"] = json::array();
    for (auto r : c.representations) j["representations"].push_back(representation_name(r));
    j["algorithms"] = json::array();
    for (auto a : c.algorithms) j["algorithms"].push_back(algorithm_name(a));
    j["k"] = c.k;
    j["cv_seed"] = c.cv_seed;
    j["generator_seed"] = c.generator_seed;
    j["learner_seed"] = c.learner_seed;
    j["anonymize_seed"] = c.anonymize_seed;
    j["n_bins"] = c.n_bins;
    j["class_cutoff"] = c.class_cutoff;
    j["out_dir"] = c.out_dir;
    j["fit_in_fold"] = c.fit_in_fold;
    j["allow_missing"] = c.allow_missing;
    j["vote_across_algorithms"] = c.vote_across_algorithms;
    j["write_idmap"] = c.write_idmap;
    j["threads"] = c.threads;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.data_dir = j.at("data_dir").get<std::string>();
    const json& g = j.at("gen");
    c.gen.n_students = g.at("n_students").get<int>();
    c.gen.pass_count = g.at("pass_count").get<int>();
    c.gen.noise = g.at("noise").get<double>();
    c.gen.summ_all_coeff = g.at("coeff_summ_all").get<double>();
    c.gen.cois_coeff = g.at("coeff_cois").get<double>();
    c.gen.aoi3_coeff = g.at("coeff_aoi3").get<double>();
    c.gen.surprise_coeff = g.at("coeff_surprise").get<double>();
    c.gen.happiness_coeff = g.at("coeff_happiness").get<double>();
    c.gen.aoi1_coeff = g.at("coeff_aoi1").get<double>();
    c.modes.clear();
    for (const auto& m : j.at("modes")) c.modes.push_back(*mode_from_name(m.get<std::string>()));
    c.representations.clear();
    for (const auto& r : j.at("representations"))
        c.representations.push_back(*representation_from_name(r.get<std::string>()));
    c.algorithms.clear();
    for (const auto& a : j.at("algorithms"))
        c.algorithms.push_back(*algorithm_from_name(a.get<std::string>()));
    c.k = j.at("k").get<int>();
    c.cv_seed = j.at("cv_seed").get<std::uint64_t>();
    c.generator_seed = j.at("generator_seed").get<std::uint64_t>();
    c.learner_seed = j.at("learner_seed").get<std::uint64_t>();
    c.anonymize_seed = j.at("anonymize_seed").get<std::uint64_t>();
    c.n_bins = j.at("n_bins").get<int>();
    c.class_cutoff = j.at("class_cutoff").get<double>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.fit_in_fold = j.at("fit_in_fold").get<bool>();
    c.allow_missing = j.at("allow_missing").get<bool>();
    c.vote_across_algorithms = j.at("vote_across_algorithms").get<bool>();
    c.write_idmap = j.at("write_idmap").get<bool>();
    c.threads = j.at("threads").get<int>();
    return c;
}

} // namespace

std::string bundle_to_json(const ReportBundle& bundle) {
    json j;
    j["provenance"] = provenance_line(bundle.config);
    j["config"] = config_to_json(bundle.config);
    j["reports"] = json::array();
    for (const auto& r : bundle.reports) {
        json jr;
        jr["mode"] = r.cell.mode;
        jr["representation"] = r.cell.representation;
        jr["algorithm"] = r.cell.algorithm;
        jr["true_labels"] = r.true_labels;
        jr["predicted_labels"] = r.predicted_labels;
        jr["positive_probs"] = r.positive_probs;
        jr["accuracy_pct"] = r.accuracy;
        jr["auc"] = r.auc;
        j["reports"].push_back(std::move(jr));
    }
    j["selections"] = json::array();
    for (const auto& s : bundle.selections) {
        json js;
        js["mode"] = s.mode;
        js["representation"] = s.representation;
        js["dataset"] = s.dataset_name;
        js["selected"] = s.selected;
        js["merit"] = s.merit;
        j["selections"].push_back(std::move(js));
    }
    j["summary"] = json::array();
    for (const auto& s : bundle.summary) {
        json js;
        js["mode"] = s.mode;
        js["representation"] = s.representation;
        js["mean_accuracy"] = s.mean_accuracy;
        js["mean_auc"] = s.mean_auc;
        js["n_reports"] = s.n_reports;
        j["summary"].push_back(std::move(js));
    }
    j["best_rules"] = json::array();
    for (const auto& r : bundle.best_rules) {
        json jr;
        jr["mode"] = r.mode;
        jr["cell"] = r.cell.to_string();
        jr["text"] = r.text;
        j["best_rules"].push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

ReportBundle bundle_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    ReportBundle bundle;
    bundle.config = config_from_json(j.at("config"));
    for (const auto& jr : j.at("reports")) {
        EvalReport r;
        r.cell.mode = jr.at("mode").get<std::string>();
        r.cell.representation = jr.at("representation").get<std::string>();
        r.cell.algorithm = jr.at("algorithm").get<std::string>();
        r.true_labels = jr.at("true_labels").get<std::vector<int>>();
        r.predicted_labels = jr.at("predicted_labels").get<std::vector<int>>();
        r.positive_probs = jr.at("positive_probs").get<std::vector<double>>();
        r.accuracy = jr.at("accuracy_pct").get<double>();
        r.auc = jr.at("auc").get<double>();
        bundle.reports.push_back(std::move(r));
    }
    for (const auto& js : j.at("selections")) {
        SelectionRow s;
        s.mode = js.at("mode").get<std::string>();
        s.representation = js.at("representation").get<std::string>();
        s.dataset_name = js.at("dataset").get<std::string>();
        s.selected = js.at("selected").get<std::vector<std::string>>();
        s.merit = js.at("merit").get<double>();
        bundle.selections.push_back(std::move(s));
    }
    for (const auto& js : j.at("summary")) {
        SummaryRow s;
        s.mode = js.at("mode").get<std::string>();
        s.representation = js.at("representation").get<std::string>();
        s.mean_accuracy = js.at("mean_accuracy").get<double>();
        s.mean_auc = js.at("mean_auc").get<double>();
        s.n_reports = js.at("n_reports").get<int>();
        bundle.summary.push_back(std::move(s));
    }
    for (const auto& jr : j.at("best_rules")) {
        RuleDump r;
        r.mode = jr.at("mode").get<std::string>();
        std::string cell = jr.at("cell").get<std::string>();
        auto parts = split(cell, ':');
        if (parts.size() == 3) r.cell = CellId{parts[0], parts[1], parts[2]};
        r.text = jr.at("text").get<std::string>();
        bundle.best_rules.push_back(std::move(r));
    }
    return bundle;
}

std::vector<std::string> render_tables(const ReportBundle& bundle, RenderFormat format,
                                       const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;

    if (format == RenderFormat::AlignedText) {
        for (PipelineMode mode : bundle.config.modes)
            write_file(dir + "/results_" + mode_name(mode) + ".txt",
                       aligned_results_table(bundle, mode_name(mode)), written);
        if (!bundle.selections.empty())
            write_file(dir + "/selection.txt", aligned_selection_table(bundle), written);
        write_file(dir + "/summary.txt", aligned_summary_table(bundle), written);
        for (const auto& dump : bundle.best_rules) {
            std::ostringstream out;
            out << "# " << provenance_line(bundle.config) << "\n";
            out << "# best cell: " << dump.cell.to_string() << "\n";
            out << dump.text;
            write_file(dir + "/rules_" + dump.mode + ".txt", out.str(), written);
        }
    } else if (format == RenderFormat::Csv) {
        {
            std::ostringstream out;
            out << "# " << provenance_line(bundle.config) << "\n";
            out << "mode,representation,algorithm,accuracy_pct,auc\n";
            for (const auto& r : bundle.reports)
                out << r.cell.mode << ',' << r.cell.representation << ',' << r.cell.algorithm
                    << ',' << format_double(r.accuracy) << ',' << format_double(r.auc) << '\n';
            write_file(dir + "/results.csv", out.str(), written);
        }
        if (!bundle.selections.empty()) {
            std::ostringstream out;
            out << "# " << provenance_line(bundle.config) << "\n";
            out << "mode,representation,dataset,n_selected,selected,merit\n";
            for (const auto& s : bundle.selections) {
                std::string names;
                for (std::size_t i = 0; i < s.selected.size(); ++i) {
                    if (i) names += ' ';
                    names += s.selected[i];
                }
                out << s.mode << ',' << s.representation << ',' << s.dataset_name << ','
                    << s.selected.size() << ',' << names << ',' << format_double(s.merit) << '\n';
            }
            write_file(dir + "/selection.csv", out.str(), written);
        }
        {
            std::ostringstream out;
            out << "# " << provenance_line(bundle.config) << "\n";
            out << "mode,representation,mean_accuracy_pct,mean_auc,n_reports\n";
            for (const auto& s : bundle.summary)
                out << s.mode << ',' << s.representation << ',' << format_double(s.mean_accuracy)
                    << ',' << format_double(s.mean_auc) << ',' << s.n_reports << '\n';
            write_file(dir + "/summary.csv", out.str(), written);
        }
    } else {
        write_file(dir + "/report.json", bundle_to_json(bundle), written);
    }
    return written;
}

} // namespace fuse
