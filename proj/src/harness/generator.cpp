#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "fuse/error.hpp"
#include "fuse/harness.hpp"
#include "fuse/rng.hpp"
#include "fuse/text.hpp"

namespace fuse {

GenParams GenParams::table2_emphasis() {
    GenParams params;
    params.cois_coeff = 0.3;
    params.aoi3_coeff = 1.1;
    params.surprise_coeff = 1.3;
    return params;
}

void GenParams::validate(int k) const {
    if (n_students < 1) throw ConfigError("generator: n_students must be >= 1");
    if (k > 0 && n_students < k) throw ConfigError("generator: n_students must be >= k");
    if (pass_count < 0 || pass_count > n_students)
        throw ConfigError("generator: pass_count must lie in [0, n_students]");
    if (noise < 0.0 || noise > 1.0) throw ConfigError("generator: noise must lie in [0, 1]");
}

namespace {

struct IntRange {
    long lo, hi;
};
struct RealRange {
    double lo, hi;
};

long draw_int(Rng& rng, IntRange r) {
    return r.lo + static_cast<long>(rng.next_below(static_cast<std::uint64_t>(r.hi - r.lo + 1)));
}

double draw_real(Rng& rng, RealRange r) { return rng.next_double(r.lo, r.hi); }

} // namespace

// Cohort with a planted rule structure: strong summary-writing signal in the
// logs, a medium image-fixation signal in the gaze counts, a medium surprise
// signal in the emotions, weak echoes in COIStotalFreq / happiness / AOI1,
// and everything else independent noise. The class gaps sit inside an
// equal-width bin so the discretized representation loses a little
// resolution, while the numeric thresholds separate cleanly at noise 0.
SyntheticCohort generate_synthetic(const GenParams& params, std::uint64_t seed) {
    params.validate(0);
    const int n = params.n_students;
    Rng rng(mix_seed(seed, 0x6e61));

    // Class assignment: exactly pass_count PASS, seeded placement.
    std::vector<int> cls(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < params.pass_count; ++i) cls[static_cast<std::size_t>(i)] = 0;
    rng.shuffle(cls);

    auto flip = [&](double coeff) {
        double p = std::clamp(params.noise * coeff, 0.0, 0.5);
        return rng.next_double() < p;
    };
    // side: 0 = PASS-like values, 1 = FAIL-like values.
    auto side = [&](int student, double coeff) {
        int s = cls[static_cast<std::size_t>(student)];
        return flip(coeff) ? 1 - s : s;
    };

    int width = n >= 1000 ? 4 : (n >= 100 ? 3 : 2);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "s%0*d", width, i + 1);
        ids.emplace_back(buf);
    }

    const Schema full = default_schema();
    SyntheticCohort out;
    out.logs.schema = schema_for_source(full, Source::Logs);
    out.emotion.schema = schema_for_source(full, Source::Emotion);
    out.gaze.schema = schema_for_source(full, Source::Gaze);
    out.logs.ids = out.emotion.ids = out.gaze.ids = ids;

    const IntRange summ[2] = {{14, 30}, {0, 12}};      // PASS side, FAIL side
    const IntRange cois[2] = {{12, 25}, {0, 10}};
    const IntRange pka{0, 15};
    const IntRange aoi1[2] = {{20, 60}, {0, 35}};
    const IntRange aoi2{0, 60};
    const IntRange aoi3[2] = {{35, 80}, {0, 30}};
    const RealRange happiness[2] = {{0.4, 1.0}, {0.0, 0.5}};
    const RealRange surprise[2] = {{0.38, 0.9}, {0.0, 0.32}};
    const RealRange low_emotion{0.0, 0.6};
    const RealRange neutral{0.2, 1.0};

    for (int i = 0; i < n; ++i) {
        std::vector<double> logs_row(3), emo_row(8), gaze_row(3);
        logs_row[0] = static_cast<double>(draw_int(rng, summ[side(i, params.summ_all_coeff)]));
        logs_row[1] = static_cast<double>(draw_int(rng, cois[side(i, params.cois_coeff)]));
        logs_row[2] = static_cast<double>(draw_int(rng, pka));

        emo_row[0] = draw_real(rng, low_emotion); // anger
        emo_row[1] = draw_real(rng, low_emotion); // contempt
        emo_row[2] = draw_real(rng, low_emotion); // disgust
        emo_row[3] = draw_real(rng, low_emotion); // fear
        emo_row[4] = draw_real(rng, happiness[side(i, params.happiness_coeff)]);
        emo_row[5] = draw_real(rng, neutral);     // neutral
        emo_row[6] = draw_real(rng, low_emotion); // sadness
        emo_row[7] = draw_real(rng, surprise[side(i, params.surprise_coeff)]);

        gaze_row[0] = static_cast<double>(draw_int(rng, aoi1[side(i, params.aoi1_coeff)]));
        gaze_row[1] = static_cast<double>(draw_int(rng, aoi2));
        gaze_row[2] = static_cast<double>(draw_int(rng, aoi3[side(i, params.aoi3_coeff)]));

        out.logs.rows.push_back(std::move(logs_row));
        out.emotion.rows.push_back(std::move(emo_row));
        out.gaze.rows.push_back(std::move(gaze_row));

        double mark = cls[static_cast<std::size_t>(i)] == 0 ? rng.next_double(5.0, 10.0)
                                                            : rng.next_double(0.0, 5.0);
        out.scores.emplace_back(ids[static_cast<std::size_t>(i)], mark);
    }
    return out;
}

void write_synthetic(const SyntheticCohort& cohort, const std::string& dir) {
    std::filesystem::create_directories(dir);
    EmitOptions opts;
    opts.include_label = false;
    opts.include_score = false;
    write_dataset_csv(cohort.logs, dir + "/logs.csv", opts);
    write_dataset_csv(cohort.emotion, dir + "/emotion.csv", opts);
    write_dataset_csv(cohort.gaze, dir + "/gaze.csv", opts);

    std::ofstream out(dir + "/scores.csv", std::ios::binary);
    if (!out) throw DataError("cannot write '" + dir + "/scores.csv'");
    out << "id,score\n";
    for (const auto& [id, mark] : cohort.scores) out << id << ',' << format_double(mark) << '\n';
}

} // namespace fuse
