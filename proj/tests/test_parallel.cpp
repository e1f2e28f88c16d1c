#include <doctest.h>

#include "fuse/evaluation.hpp"
#include "fuse/harness.hpp"
#include "fuse/preprocess.hpp"
#include "fuse/selection.hpp"
#include "helpers.hpp"

using namespace fuse;

// Every OpenMP kernel must reproduce its serial reference exactly.

TEST_CASE("parallel normalization matches the serial reference") {
    Rng rng(51);
    std::vector<std::vector<double>> cols(10, std::vector<double>(200));
    for (auto& col : cols)
        for (auto& v : col) v = rng.next_double(-40.0, 75.0);
    Dataset ds = testutil::numeric_dataset(
        {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"}, cols);
    CHECK(min_max_normalize(ds, Exec::Serial).first == min_max_normalize(ds, Exec::Parallel).first);
}

TEST_CASE("parallel discretization matches the serial reference") {
    Dataset ds = testutil::numeric_dataset(
        {"a", "b"}, {{1, 2, 3, 4, 5, 6, 7, 8}, {0.5, 0.1, 0.9, 0.2, 0.7, 0.3, 0.8, 0.4}});
    CHECK(equal_width_discretize(ds, 3, Exec::Serial).first ==
          equal_width_discretize(ds, 3, Exec::Parallel).first);
}

TEST_CASE("parallel correlation cache and searches match the serial reference") {
    for (std::uint64_t seed : {61, 62}) {
        Dataset ds = testutil::random_dataset(seed, 80, 8);
        FeatureSubset serial = select_best_first(ds, Exec::Serial);
        FeatureSubset parallel = select_best_first(ds, Exec::Parallel);
        CHECK(serial.indices == parallel.indices);
        CHECK(serial.merit == parallel.merit);
        CHECK(serial.trace == parallel.trace);

        FeatureSubset ex_serial = select_exhaustive(ds, Exec::Serial);
        FeatureSubset ex_parallel = select_exhaustive(ds, Exec::Parallel);
        CHECK(ex_serial.indices == ex_parallel.indices);
        CHECK(ex_serial.merit == ex_parallel.merit);
    }
}

TEST_CASE("parallel cross-validation matches the serial reference") {
    Dataset ds = testutil::random_dataset(71, 60, 6);
    for (Algorithm algo : {Algorithm::C45Tree, Algorithm::Ripper, Algorithm::NNGE}) {
        LearnerSpec spec = LearnerSpec::make(algo, 2);
        CHECK(cross_validate(spec, ds, 6, 3, Exec::Serial) ==
              cross_validate(spec, ds, 6, 3, Exec::Parallel));
    }
}

TEST_CASE("thread cap does not change pipeline output") {
    ExperimentConfig config;
    config.modes = {PipelineMode::MergeAll};
    config.representations = {Representation::Numerical};
    config.algorithms = {Algorithm::C45Tree, Algorithm::NNGE};
    ReportBundle wide = run_pipeline(config);
    config.threads = 1;
    ReportBundle narrow = run_pipeline(config);
    narrow.config.threads = wide.config.threads = 0;
    CHECK(wide == narrow);
    set_threads(0);
}
