#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "fuse/error.hpp"
#include "fuse/harness.hpp"
#include "fuse/text.hpp"

namespace fuse {

const char* mode_name(PipelineMode m) {
    switch (m) {
        case PipelineMode::MergeAll: return "merge_all";
        case PipelineMode::SelectMerged: return "select_merged";
        case PipelineMode::EnsemblePerSource: return "ensemble_per_source";
    }
    return "?";
}

std::optional<PipelineMode> mode_from_name(const std::string& name) {
    if (name == "merge_all") return PipelineMode::MergeAll;
    if (name == "select_merged") return PipelineMode::SelectMerged;
    if (name == "ensemble_per_source") return PipelineMode::EnsemblePerSource;
    return std::nullopt;
}

const char* representation_name(Representation r) {
    return r == Representation::Numerical ? "numerical" : "discretized";
}

std::optional<Representation> representation_from_name(const std::string& name) {
    if (name == "numerical") return Representation::Numerical;
    if (name == "discretized") return Representation::Discretized;
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    gen.validate(k);
    if (modes.empty()) throw ConfigError("config: at least one mode required");
    if (representations.empty()) throw ConfigError("config: at least one representation required");
    if (algorithms.empty()) throw ConfigError("config: at least one algorithm required");
    if (k < 2) throw ConfigError("config: k must be >= 2");
    if (n_bins < 2) throw ConfigError("config: n_bins must be >= 2");
    if (!(class_cutoff > 0.0 && class_cutoff < 10.0))
        throw ConfigError("config: class_cutoff must lie in (0, 10)");
    if (threads < 0) throw ConfigError("config: threads must be >= 0");
    std::set<PipelineMode> m(modes.begin(), modes.end());
    if (m.size() != modes.size()) throw ConfigError("config: duplicate mode");
    std::set<Representation> r(representations.begin(), representations.end());
    if (r.size() != representations.size()) throw ConfigError("config: duplicate representation");
    std::set<Algorithm> a(algorithms.begin(), algorithms.end());
    if (a.size() != algorithms.size()) throw ConfigError("config: duplicate algorithm");
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

long long parse_int_or_throw(const std::string& v, const std::string& key) {
    auto p = parse_int(v);
    if (!p) throw ConfigError("config: bad integer for '" + key + "': " + v);
    return *p;
}

double parse_double_or_throw(const std::string& v, const std::string& key) {
    auto p = parse_double(v);
    if (!p) throw ConfigError("config: bad number for '" + key + "': " + v);
    return *p;
}

std::vector<std::string> parse_list(const std::string& v) {
    std::vector<std::string> out;
    for (const auto& part : split(v, ',')) {
        std::string t(trim(part));
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   std::optional<std::uint64_t> env_seed) {
    ExperimentConfig config;
    std::set<std::string> set_keys;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t(trim(line));
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key(trim(std::string_view(t).substr(0, eq)));
        std::string value(trim(std::string_view(t).substr(eq + 1)));
        if (!set_keys.insert(key).second)
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

        if (key == "data_dir") {
            config.data_dir = value;
        } else if (key == "out_dir") {
            config.out_dir = value;
        } else if (key == "n_students") {
            config.gen.n_students = static_cast<int>(parse_int_or_throw(value, key));
        } else if (key == "pass_count") {
            config.gen.pass_count = static_cast<int>(parse_int_or_throw(value, key));
        } else if (key == "noise") {
            config.gen.noise = parse_double_or_throw(value, key);
        } else if (key == "coeff_summ_all") {
            config.gen.summ_all_coeff = parse_double_or_throw(value, key);
        } else if (key == "coeff_cois") {
            config.gen.cois_coeff = parse_double_or_throw(value, key);
        } else if (key == "coeff_aoi3") {
            config.gen.aoi3_coeff = parse_double_or_throw(value, key);
        } else if (key == "coeff_surprise") {
            config.gen.surprise_coeff = parse_double_or_throw(value, key);
        } else if (key == "coeff_happiness") {
            config.gen.happiness_coeff = parse_double_or_throw(value, key);
        } else if (key == "coeff_aoi1") {
            config.gen.aoi1_coeff = parse_double_or_throw(value, key);
        } else if (key == "modes") {
            config.modes.clear();
            for (const auto& name : parse_list(value)) {
                auto m = mode_from_name(name);
                if (!m) throw ConfigError("config: unknown mode '" + name + "'");
                config.modes.push_back(*m);
            }
        } else if (key == "representations") {
            config.representations.clear();
            for (const auto& name : parse_list(value)) {
                auto r = representation_from_name(name);
                if (!r) throw ConfigError("config: unknown representation '" + name + "'");
                config.representations.push_back(*r);
            }
        } else if (key == "algorithms") {
            config.algorithms.clear();
            for (const auto& name : parse_list(value)) {
                auto a = algorithm_from_name(name);
                if (!a) throw ConfigError("config: unknown algorithm '" + name + "'");
                config.algorithms.push_back(*a);
            }
        } else if (key == "k") {
            config.k = static_cast<int>(parse_int_or_throw(value, key));
        } else if (key == "cv_seed") {
            config.cv_seed = static_cast<std::uint64_t>(parse_int_or_throw(value, key));
        } else if (key == "generator_seed") {
            config.generator_seed = static_cast<std::uint64_t>(parse_int_or_throw(value, key));
        } else if (key == "learner_seed") {
            config.learner_seed = static_cast<std::uint64_t>(parse_int_or_throw(value, key));
        } else if (key == "anonymize_seed") {
            config.anonymize_seed = static_cast<std::uint64_t>(parse_int_or_throw(value, key));
        } else if (key == "n_bins") {
            config.n_bins = static_cast<int>(parse_int_or_throw(value, key));
        } else if (key == "class_cutoff") {
            config.class_cutoff = parse_double_or_throw(value, key);
        } else if (key == "fit_in_fold") {
            config.fit_in_fold = parse_bool(value, key);
        } else if (key == "allow_missing") {
            config.allow_missing = parse_bool(value, key);
        } else if (key == "vote_across_algorithms") {
            config.vote_across_algorithms = parse_bool(value, key);
        } else if (key == "write_idmap") {
            config.write_idmap = parse_bool(value, key);
        } else if (key == "threads") {
            config.threads = static_cast<int>(parse_int_or_throw(value, key));
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }

    // FUSE_SEED fills every seed the file left unset.
    if (env_seed) {
        if (!set_keys.count("cv_seed")) config.cv_seed = *env_seed;
        if (!set_keys.count("generator_seed")) config.generator_seed = *env_seed;
        if (!set_keys.count("learner_seed")) config.learner_seed = *env_seed;
        if (!set_keys.count("anonymize_seed")) config.anonymize_seed = *env_seed;
    }

    config.validate();
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    std::optional<std::uint64_t> env_seed;
    if (const char* env = std::getenv("FUSE_SEED")) {
        auto v = parse_int(env);
        if (!v) throw ConfigError("FUSE_SEED must be an integer");
        env_seed = static_cast<std::uint64_t>(*v);
    }
    return parse_config_text(buf.str(), env_seed);
}

namespace {

void hash_field(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL; // FNV-1a
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
}

} // namespace

std::uint64_t config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_field(h, c.data_dir);
    hash_field(h, std::to_string(c.gen.n_students));
    hash_field(h, std::to_string(c.gen.pass_count));
    hash_field(h, format_double(c.gen.noise));
    hash_field(h, format_double(c.gen.summ_all_coeff));
    hash_field(h, format_double(c.gen.cois_coeff));
    hash_field(h, format_double(c.gen.aoi3_coeff));
    hash_field(h, format_double(c.gen.surprise_coeff));
    hash_field(h, format_double(c.gen.happiness_coeff));
    hash_field(h, format_double(c.gen.aoi1_coeff));
    for (auto m : c.modes) hash_field(h, mode_name(m));
    for (auto r : c.representations) hash_field(h, representation_name(r));
    for (auto a : c.algorithms) hash_field(h, algorithm_name(a));
    hash_field(h, std::to_string(c.k));
    hash_field(h, std::to_string(c.cv_seed));
    hash_field(h, std::to_string(c.generator_seed));
    hash_field(h, std::to_string(c.learner_seed));
    hash_field(h, std::to_string(c.anonymize_seed));
    hash_field(h, std::to_string(c.n_bins));
    hash_field(h, format_double(c.class_cutoff));
    hash_field(h, c.fit_in_fold ? "1" : "0");
    hash_field(h, c.allow_missing ? "1" : "0");
    hash_field(h, c.vote_across_algorithms ? "1" : "0");
    return h;
}

} // namespace fuse
