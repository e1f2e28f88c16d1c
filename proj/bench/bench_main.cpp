// Times the OpenMP kernels against their serial reference paths on scaled-up
// synthetic inputs and checks that both produce identical results.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fuse/evaluation.hpp"
#include "fuse/harness.hpp"
#include "fuse/preprocess.hpp"
#include "fuse/rng.hpp"
#include "fuse/selection.hpp"

namespace {

double now_seconds() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return static_cast<double>(clock()) / CLOCKS_PER_SEC;
#endif
}

struct KernelResult {
    std::string name;
    double serial_s = 0.0;
    double parallel_s = 0.0;
    bool identical = false;
};

void print_row(const KernelResult& r) {
    std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", r.name.c_str(), r.serial_s, r.parallel_s,
                r.serial_s / std::max(r.parallel_s, 1e-9), r.identical ? "identical" : "DIFFER");
}

// Wide random numeric dataset for the correlation kernels.
fuse::Dataset wide_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::vector<fuse::Attribute> attrs;
    for (std::size_t a = 0; a < d; ++a)
        attrs.push_back({"f" + std::to_string(a), fuse::Source::Logs, fuse::Kind::Numeric, {}});
    fuse::Dataset ds;
    ds.schema = fuse::Schema(std::move(attrs), {"PASS", "FAIL"});
    fuse::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(d);
        for (auto& v : row) v = rng.next_double();
        ds.labels.push_back(row[0] + rng.next_double(-0.2, 0.2) > 0.5 ? 0 : 1);
        ds.rows.push_back(std::move(row));
        ds.ids.push_back("r" + std::to_string(i));
    }
    return ds;
}

template <typename F>
double timed(F&& fn) {
    double t0 = now_seconds();
    fn();
    return now_seconds() - t0;
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", fuse::max_threads());
    std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");

    // Per-attribute min-max normalization.
    {
        fuse::Dataset ds = wide_dataset(20000, 64, 7);
        fuse::Dataset a, b;
        KernelResult r{"min_max_normalize"};
        r.serial_s = timed([&] { a = fuse::min_max_normalize(ds, fuse::Exec::Serial).first; });
        r.parallel_s = timed([&] { b = fuse::min_max_normalize(ds, fuse::Exec::Parallel).first; });
        r.identical = a == b;
        print_row(r);
    }

    // Pairwise symmetric-uncertainty matrix (drives the CFS searches).
    {
        fuse::Dataset ds = wide_dataset(4000, 96, 11);
        fuse::FeatureSubset a, b;
        KernelResult r{"cfs best-first search"};
        r.serial_s = timed([&] { a = fuse::select_best_first(ds, fuse::Exec::Serial); });
        r.parallel_s = timed([&] { b = fuse::select_best_first(ds, fuse::Exec::Parallel); });
        r.identical = a.indices == b.indices && a.merit == b.merit;
        print_row(r);
    }

    // Exhaustive subset enumeration.
    {
        fuse::Dataset ds = wide_dataset(600, 16, 13);
        fuse::FeatureSubset a, b;
        KernelResult r{"cfs exhaustive search"};
        r.serial_s = timed([&] { a = fuse::select_exhaustive(ds, fuse::Exec::Serial); });
        r.parallel_s = timed([&] { b = fuse::select_exhaustive(ds, fuse::Exec::Parallel); });
        r.identical = a.indices == b.indices && a.merit == b.merit;
        print_row(r);
    }

    // Cross-validation folds of one tree cell on a big cohort.
    {
        fuse::GenParams params;
        params.n_students = 2000;
        params.pass_count = 1050;
        fuse::SyntheticCohort cohort = fuse::generate_synthetic(params, 3);
        fuse::Dataset merged = fuse::join_sources({cohort.logs, cohort.emotion, cohort.gaze},
                                                  cohort.scores);
        merged = fuse::label_by_score(merged, fuse::ClassCutoffs::pass_fail());
        merged = fuse::min_max_normalize(merged).first;
        fuse::LearnerSpec spec = fuse::LearnerSpec::make(fuse::Algorithm::C45Tree, 1);
        fuse::EvalReport a, b;
        KernelResult r{"cross_validate (C45, k=10)"};
        r.serial_s = timed([&] { a = fuse::cross_validate(spec, merged, 10, 1, fuse::Exec::Serial); });
        r.parallel_s =
            timed([&] { b = fuse::cross_validate(spec, merged, 10, 1, fuse::Exec::Parallel); });
        r.identical = a == b;
        print_row(r);
    }

    return 0;
}
