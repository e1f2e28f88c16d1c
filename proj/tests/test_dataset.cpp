#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "fuse/dataset.hpp"
#include "fuse/error.hpp"
#include "fuse/harness.hpp"
#include "helpers.hpp"

using namespace fuse;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "fuse_dataset_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

std::string logs_csv_40() {
    std::string csv = "id,SummAll,COIStotalFreq,PKAtotalFreq\n";
    for (int i = 1; i <= 40; ++i) {
        csv += "s" + std::to_string(i) + "," + std::to_string(i % 7) + "," +
               std::to_string(i % 5) + "," + std::to_string(i % 3) + "\n";
    }
    return csv;
}

} // namespace

TEST_CASE("load_source_csv reads a 40-row logs file") {
    auto path = write_temp("logs40.csv", logs_csv_40());
    Dataset ds = load_source_csv(path, Source::Logs, default_schema());
    CHECK(ds.n_rows() == 40);
    CHECK(ds.schema.size() == 3);
    CHECK(ds.schema.attribute(0).name == "SummAll");
    CHECK(ds.rows[0][0] == doctest::Approx(1.0));
}

TEST_CASE("load_source_csv accepts a header-only file") {
    auto path = write_temp("empty.csv", "id,SummAll,COIStotalFreq,PKAtotalFreq\n");
    Dataset ds = load_source_csv(path, Source::Logs, default_schema());
    CHECK(ds.n_rows() == 0);
}

TEST_CASE("load_source_csv reports the row and column of a bad cell") {
    auto path = write_temp("bad_cell.csv",
                           "id,SummAll,COIStotalFreq,PKAtotalFreq\n"
                           "s1,1,2,3\n"
                           "s2,4,5,6\n"
                           "s3,abc,7,8\n");
    CHECK_THROWS_WITH_AS(load_source_csv(path, Source::Logs, default_schema()),
                         doctest::Contains("row 3"), DataError);
    try {
        load_source_csv(path, Source::Logs, default_schema());
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("SummAll") != std::string::npos);
    }
}

TEST_CASE("load_source_csv rejects duplicate ids, duplicate and unknown headers") {
    auto dup_id = write_temp("dup_id.csv",
                             "id,SummAll,COIStotalFreq,PKAtotalFreq\ns1,1,2,3\ns1,4,5,6\n");
    CHECK_THROWS_AS(load_source_csv(dup_id, Source::Logs, default_schema()), DataError);

    auto dup_col = write_temp("dup_col.csv", "id,SummAll,SummAll,PKAtotalFreq\n");
    CHECK_THROWS_AS(load_source_csv(dup_col, Source::Logs, default_schema()), DataError);

    auto unknown = write_temp("unknown.csv", "id,SummAll,COIStotalFreq,PKAtotalFreq,bogus\n");
    CHECK_THROWS_AS(load_source_csv(unknown, Source::Logs, default_schema()), DataError);

    auto missing = write_temp("missing.csv", "id,SummAll\n");
    CHECK_THROWS_AS(load_source_csv(missing, Source::Logs, default_schema()), DataError);
}

TEST_CASE("missing cells are rejected unless allow_missing imputes them") {
    auto path = write_temp("gaps.csv",
                           "id,SummAll,COIStotalFreq,PKAtotalFreq\n"
                           "s1,1,2,3\n"
                           "s2,,2,3\n"
                           "s3,5,2,3\n");
    CHECK_THROWS_AS(load_source_csv(path, Source::Logs, default_schema()), DataError);
    Dataset ds = load_source_csv(path, Source::Logs, default_schema(), /*allow_missing=*/true);
    CHECK(ds.rows[1][0] == doctest::Approx(3.0)); // mean of 1 and 5
}

TEST_CASE("join_sources merges three sources in schema order") {
    GenParams params;
    SyntheticCohort cohort = generate_synthetic(params, 1);
    Dataset merged = join_sources({cohort.logs, cohort.emotion, cohort.gaze}, cohort.scores);
    CHECK(merged.n_rows() == 40);
    CHECK(merged.schema.size() == 14);
    CHECK(merged.schema.attribute(0).name == "SummAll");
    CHECK(merged.schema.attribute(3).name == "anger");
    CHECK(merged.schema.attribute(11).name == "AOI1FixCount");
    CHECK(merged.scores.size() == 40);

    // Part order must not matter.
    Dataset merged2 = join_sources({cohort.gaze, cohort.logs, cohort.emotion}, cohort.scores);
    CHECK(merged == merged2);
}

TEST_CASE("join_sources passes a single part through") {
    GenParams params;
    params.n_students = 5;
    params.pass_count = 3;
    SyntheticCohort cohort = generate_synthetic(params, 2);
    Dataset joined = join_sources({cohort.logs}, cohort.scores);
    CHECK(joined.n_rows() == 5);
    CHECK(joined.schema.size() == 3);
    CHECK(joined.rows[0] == cohort.logs.rows[0]);
}

TEST_CASE("join_sources lists orphan ids") {
    GenParams params;
    params.n_students = 8;
    params.pass_count = 4;
    SyntheticCohort cohort = generate_synthetic(params, 3);
    // Drop s07 from the gaze part.
    Dataset gaze = cohort.gaze;
    std::size_t victim = 6;
    gaze.ids.erase(gaze.ids.begin() + victim);
    gaze.rows.erase(gaze.rows.begin() + victim);
    CHECK_THROWS_WITH_AS(join_sources({cohort.logs, cohort.emotion, gaze}, cohort.scores),
                         doctest::Contains("s07"), DataError);
}

TEST_CASE("anonymize is deterministic, bijective and cell-preserving") {
    GenParams params;
    SyntheticCohort cohort = generate_synthetic(params, 4);
    Dataset merged = join_sources({cohort.logs, cohort.emotion, cohort.gaze}, cohort.scores);

    auto [anon1, map1] = anonymize(merged, 11);
    auto [anon2, map2] = anonymize(merged, 11);
    CHECK(anon1.ids == anon2.ids);
    CHECK(map1.pairs == map2.pairs);

    // 40 distinct tokens, none containing an original id.
    std::set<std::string> tokens(anon1.ids.begin(), anon1.ids.end());
    CHECK(tokens.size() == 40);
    for (const auto& token : anon1.ids)
        for (const auto& orig : merged.ids) CHECK(token.find(orig) == std::string::npos);

    // Every non-id cell bit-exact, order unchanged.
    CHECK(anon1.rows == merged.rows);
    CHECK(anon1.scores == merged.scores);

    auto [anon3, map3] = anonymize(merged, 12);
    CHECK(anon3.ids != anon1.ids);
    std::set<std::string> tokens3(anon3.ids.begin(), anon3.ids.end());
    CHECK(tokens3.size() == 40);
}

TEST_CASE("dataset CSV round-trips value-identically") {
    for (std::uint64_t seed : {1, 2, 3}) {
        Dataset ds = testutil::random_dataset(seed, 25, 6);
        ds.scores.assign(ds.n_rows(), 5.5);
        EmitOptions opts;
        opts.include_score = true;
        opts.include_label = true;
        auto path = write_temp("roundtrip" + std::to_string(seed) + ".csv",
                               dataset_to_csv(ds, opts));
        Dataset back = load_dataset_csv(path, ds.schema);
        CHECK(back == ds);
    }
}

TEST_CASE("scores outside [0,10] are rejected") {
    auto path = write_temp("bad_scores.csv", "id,score\ns1,11\n");
    CHECK_THROWS_AS(load_scores_csv(path), DataError);
    auto ok = write_temp("ok_scores.csv", "id,score\ns1,10\ns2,0\n");
    auto scores = load_scores_csv(ok);
    CHECK(scores.size() == 2);
}

TEST_CASE("non-finite numeric cells are rejected") {
    auto path = write_temp("nonfinite.csv",
                           "id,SummAll,COIStotalFreq,PKAtotalFreq\ns1,nan,2,3\n");
    CHECK_THROWS_AS(load_source_csv(path, Source::Logs, default_schema()), DataError);
    auto inf_path = write_temp("inf.csv",
                               "id,SummAll,COIStotalFreq,PKAtotalFreq\ns1,inf,2,3\n");
    CHECK_THROWS_AS(load_source_csv(inf_path, Source::Logs, default_schema()), DataError);
}

TEST_CASE("a comment header line survives the CSV round trip") {
    Dataset ds = testutil::random_dataset(9, 10, 4);
    EmitOptions opts;
    opts.header_comment = "seeds and settings";
    auto path = write_temp("commented.csv", dataset_to_csv(ds, opts));
    Dataset back = load_dataset_csv(path, ds.schema);
    CHECK(back == ds);
}
