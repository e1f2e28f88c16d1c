#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuse/schema.hpp"

namespace fuse {

// Immutable-by-convention table of instances bound to a schema. Cells hold
// the numeric value in source units, or the category index for categorical
// attributes. `labels` is empty for unlabeled data; `scores` holds the raw
// 0-10 mark when known.
struct Dataset {
    Schema schema;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;     // class indices, empty if unlabeled
    std::vector<double> scores;  // raw marks, empty if absent

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_attributes() const { return schema.size(); }
    bool labeled() const { return !labels.empty(); }

    // Column view (copies; columns are short).
    std::vector<double> column(std::size_t attr) const;

    // Per-class instance counts (requires labels).
    std::vector<std::size_t> class_counts() const;

    // Structural + invariant check; throws DataError on violation.
    void validate() const;

    bool operator==(const Dataset&) const = default;
};

struct IdMap {
    std::vector<std::pair<std::string, std::string>> pairs; // (original, anonymous)
};

// --- CSV ingestion -------------------------------------------------------

// Reads one per-source CSV (`id` column plus that source's attribute columns,
// any column order). Unknown or missing columns, duplicate ids and
// non-parsable cells are DataErrors naming the row and column. With
// `allow_missing`, empty cells are imputed with the column mean (numeric) or
// modal category (categorical) instead of being rejected.
Dataset load_source_csv(const std::string& path, Source source, const Schema& full_schema,
                        bool allow_missing = false);

// Reads a previously emitted dataset file: `id`, every schema attribute, and
// optional `score` / `class` columns.
Dataset load_dataset_csv(const std::string& path, const Schema& schema,
                         bool allow_missing = false);

// (id, mark) table from `scores.csv` (header `id,score`).
std::vector<std::pair<std::string, double>> load_scores_csv(const std::string& path);

// --- Emission ------------------------------------------------------------

struct EmitOptions {
    bool include_score = false;
    bool include_label = true;
    std::string header_comment; // written as a leading '# ...' line when set
};

std::string dataset_to_csv(const Dataset& ds, const EmitOptions& opts = {});
void write_dataset_csv(const Dataset& ds, const std::string& path, const EmitOptions& opts = {});

// --- Assembly ------------------------------------------------------------

// Joins single-source datasets by id and attaches raw marks. Attribute order
// is logs, emotion, gaze regardless of the order of `parts`; row order
// follows the score table. Ids missing from any part (or from the score
// table) are reported as a DataError listing the orphans.
Dataset join_sources(const std::vector<Dataset>& parts,
                     const std::vector<std::pair<std::string, double>>& scores);

// Replaces ids with seeded random tokens; row order and every non-id cell are
// untouched. The map is returned separately and is never written into result
// files by default.
std::pair<Dataset, IdMap> anonymize(const Dataset& ds, std::uint64_t seed);

} // namespace fuse
