#pragma once

#include <string>
#include <vector>

#include "fuse/dataset.hpp"
#include "fuse/rng.hpp"

namespace testutil {

// Single-source numeric dataset with explicit columns (column-major input).
inline fuse::Dataset numeric_dataset(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns,
                                     const std::vector<int>& labels = {}) {
    std::vector<fuse::Attribute> attrs;
    for (const auto& n : names)
        attrs.push_back({n, fuse::Source::Logs, fuse::Kind::Numeric, {}});
    fuse::Dataset ds;
    ds.schema = fuse::Schema(std::move(attrs), {"PASS", "FAIL"});
    const std::size_t n_rows = columns.empty() ? 0 : columns[0].size();
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::vector<double> row;
        for (const auto& col : columns) row.push_back(col[r]);
        ds.rows.push_back(std::move(row));
        ds.ids.push_back("r" + std::to_string(r + 1));
    }
    ds.labels = labels;
    return ds;
}

// Random mixed-kind labeled dataset for property tests. Roughly half the
// attributes are categorical with 2-4 categories; labels correlate with the
// first attribute so trees have something to find.
inline fuse::Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t d) {
    fuse::Rng rng(seed);
    std::vector<fuse::Attribute> attrs;
    for (std::size_t a = 0; a < d; ++a) {
        if (a % 2 == 1) {
            std::size_t n_cats = 2 + rng.next_below(3);
            std::vector<std::string> cats;
            for (std::size_t c = 0; c < n_cats; ++c)
                cats.push_back("V" + std::to_string(c + 1));
            attrs.push_back({"cat" + std::to_string(a), fuse::Source::Emotion,
                             fuse::Kind::Categorical, cats});
        } else {
            attrs.push_back({"num" + std::to_string(a), fuse::Source::Logs, fuse::Kind::Numeric, {}});
        }
    }
    fuse::Dataset ds;
    ds.schema = fuse::Schema(std::move(attrs), {"PASS", "FAIL"});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(d);
        for (std::size_t a = 0; a < d; ++a) {
            const auto& attr = ds.schema.attribute(a);
            if (attr.kind == fuse::Kind::Categorical)
                row[a] = static_cast<double>(rng.next_below(attr.categories.size()));
            else
                row[a] = rng.next_double();
        }
        int label = (row[0] + rng.next_double(-0.35, 0.35)) > 0.5 ? 0 : 1;
        ds.rows.push_back(std::move(row));
        ds.ids.push_back("r" + std::to_string(i + 1));
        ds.labels.push_back(label);
    }
    return ds;
}

// Random instance conforming to a schema (values may fall outside the
// training range on purpose).
inline std::vector<double> random_instance(const fuse::Schema& schema, fuse::Rng& rng) {
    std::vector<double> row(schema.size());
    for (std::size_t a = 0; a < schema.size(); ++a) {
        const auto& attr = schema.attribute(a);
        if (attr.kind == fuse::Kind::Categorical)
            row[a] = static_cast<double>(rng.next_below(attr.categories.size()));
        else
            row[a] = rng.next_double(-0.25, 1.25);
    }
    return row;
}

} // namespace testutil
