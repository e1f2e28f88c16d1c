#include "fuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fuse/error.hpp"
#include "fuse/rng.hpp"
#include "fuse/text.hpp"

namespace fuse {

std::vector<double> Dataset::column(std::size_t attr) const {
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][attr];
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(schema.n_classes(), 0);
    for (int l : labels) counts[static_cast<std::size_t>(l)]++;
    return counts;
}

void Dataset::validate() const {
    if (ids.size() != rows.size()) throw DataError("id count does not match row count");
    if (!labels.empty() && labels.size() != rows.size())
        throw DataError("label count does not match row count");
    if (!scores.empty() && scores.size() != rows.size())
        throw DataError("score count does not match row count");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second) throw DataError("duplicate id '" + id + "'");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != schema.size())
            throw DataError("row " + std::to_string(r + 1) + " has wrong cell count");
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            const auto& attr = schema.attribute(c);
            if (attr.kind == Kind::Categorical) {
                double v = rows[r][c];
                if (v != std::floor(v) || v < 0 || v >= static_cast<double>(attr.categories.size()))
                    throw DataError("row " + std::to_string(r + 1) + ", column '" + attr.name +
                                    "': invalid category index");
            }
        }
    }
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= schema.n_classes())
            throw DataError("label index out of range");
    for (double s : scores)
        if (!(s >= 0.0 && s <= 10.0)) throw DataError("score outside [0, 10]");
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows; // ragged rows rejected by caller
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && !line.empty() && line.front() == '#') continue; // comment header
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        auto cells = split(line, ',');
        for (auto& c : cells) c = std::string(trim(c));
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw DataError("'" + path + "' is empty (no header row)");
    return table;
}

void check_header(const CsvTable& table, const std::string& path) {
    std::unordered_set<std::string> seen;
    for (const auto& name : table.header) {
        if (name.empty()) throw DataError("'" + path + "': empty header name");
        if (!seen.insert(name).second)
            throw DataError("'" + path + "': duplicate header name '" + name + "'");
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.header.size())
            throw DataError("'" + path + "': row " + std::to_string(r + 1) + " has " +
                            std::to_string(table.rows[r].size()) + " cells, expected " +
                            std::to_string(table.header.size()));
    }
}

// Parses one attribute column into cell values; empty cells become NaN
// placeholders when allow_missing is set, otherwise they are errors.
void parse_cell(const std::string& raw, const Attribute& attr, std::size_t row_1based,
                bool allow_missing, double& out, bool& missing) {
    missing = false;
    if (raw.empty()) {
        if (!allow_missing)
            throw DataError("row " + std::to_string(row_1based) + ", column '" + attr.name +
                            "': missing value");
        missing = true;
        out = 0.0;
        return;
    }
    if (attr.kind == Kind::Numeric) {
        auto v = parse_double(raw);
        if (!v || !std::isfinite(*v))
            throw DataError("row " + std::to_string(row_1based) + ", column '" + attr.name +
                            "': cannot parse '" + raw + "' as a number");
        out = *v;
    } else {
        for (std::size_t i = 0; i < attr.categories.size(); ++i) {
            if (attr.categories[i] == raw) {
                out = static_cast<double>(i);
                return;
            }
        }
        throw DataError("row " + std::to_string(row_1based) + ", column '" + attr.name +
                        "': unknown category '" + raw + "'");
    }
}

// Training-data imputation: column mean for numeric attributes, modal
// category (first-appearance tie-break) for categorical ones.
void impute_column(std::vector<std::vector<double>>& rows, const std::vector<bool>& missing_flags,
                   std::size_t col, const Attribute& attr) {
    double fill = 0.0;
    if (attr.kind == Kind::Numeric) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!missing_flags[r]) {
                sum += rows[r][col];
                ++n;
            }
        fill = n > 0 ? sum / static_cast<double>(n) : 0.0;
    } else {
        std::vector<std::size_t> counts(attr.categories.size(), 0);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!missing_flags[r]) counts[static_cast<std::size_t>(rows[r][col])]++;
        std::size_t best = 0;
        for (std::size_t i = 1; i < counts.size(); ++i)
            if (counts[i] > counts[best]) best = i;
        fill = static_cast<double>(best);
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (missing_flags[r]) rows[r][col] = fill;
}

Dataset load_with_columns(const std::string& path, const Schema& schema, bool allow_missing,
                          bool accept_score, bool accept_label) {
    CsvTable table = read_csv(path);
    check_header(table, path);

    std::optional<std::size_t> id_col, score_col, label_col;
    std::vector<std::optional<std::size_t>> attr_col(schema.size());
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const std::string& name = table.header[c];
        if (name == "id") {
            id_col = c;
        } else if (accept_score && name == "score") {
            score_col = c;
        } else if (accept_label && name == "class") {
            label_col = c;
        } else if (auto idx = schema.index_of(name)) {
            attr_col[*idx] = c;
        } else {
            throw DataError("'" + path + "': unknown column '" + name + "'");
        }
    }
    if (!id_col) throw DataError("'" + path + "': missing 'id' column");
    for (std::size_t a = 0; a < schema.size(); ++a)
        if (!attr_col[a])
            throw DataError("'" + path + "': missing column '" + schema.attribute(a).name + "'");

    Dataset ds;
    ds.schema = schema;
    std::vector<std::vector<bool>> missing(schema.size(),
                                           std::vector<bool>(table.rows.size(), false));
    std::unordered_set<std::string> seen_ids;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        const std::string& id = cells[*id_col];
        if (id.empty()) throw DataError("'" + path + "': row " + std::to_string(r + 1) + ": empty id");
        if (!seen_ids.insert(id).second)
            throw DataError("'" + path + "': duplicate id '" + id + "'");
        ds.ids.push_back(id);

        std::vector<double> row(schema.size(), 0.0);
        for (std::size_t a = 0; a < schema.size(); ++a) {
            bool miss = false;
            parse_cell(cells[*attr_col[a]], schema.attribute(a), r + 1, allow_missing, row[a], miss);
            missing[a][r] = miss;
        }
        ds.rows.push_back(std::move(row));

        if (score_col) {
            auto v = parse_double(cells[*score_col]);
            if (!v)
                throw DataError("row " + std::to_string(r + 1) + ", column 'score': cannot parse '" +
                                cells[*score_col] + "'");
            if (!(*v >= 0.0 && *v <= 10.0))
                throw DataError("row " + std::to_string(r + 1) + ": score " + format_double(*v) +
                                " outside [0, 10]");
            ds.scores.push_back(*v);
        }
        if (label_col) {
            auto idx = schema.class_index(cells[*label_col]);
            if (!idx)
                throw DataError("row " + std::to_string(r + 1) + ", column 'class': unknown label '" +
                                cells[*label_col] + "'");
            ds.labels.push_back(*idx);
        }
    }

    if (allow_missing)
        for (std::size_t a = 0; a < schema.size(); ++a)
            impute_column(ds.rows, missing[a], a, ds.schema.attribute(a));

    return ds;
}

} // namespace

Dataset load_source_csv(const std::string& path, Source source, const Schema& full_schema,
                        bool allow_missing) {
    Schema part = schema_for_source(full_schema, source);
    if (part.size() == 0)
        throw DataError("schema has no attributes for source '" + std::string(source_name(source)) + "'");
    return load_with_columns(path, part, allow_missing, /*accept_score=*/false,
                             /*accept_label=*/false);
}

Dataset load_dataset_csv(const std::string& path, const Schema& schema, bool allow_missing) {
    return load_with_columns(path, schema, allow_missing, /*accept_score=*/true,
                             /*accept_label=*/true);
}

std::vector<std::pair<std::string, double>> load_scores_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    check_header(table, path);
    if (table.header.size() != 2 || table.header[0] != "id" || table.header[1] != "score")
        throw DataError("'" + path + "': expected header 'id,score'");
    std::vector<std::pair<std::string, double>> out;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string& id = table.rows[r][0];
        if (!seen.insert(id).second) throw DataError("'" + path + "': duplicate id '" + id + "'");
        auto v = parse_double(table.rows[r][1]);
        if (!v)
            throw DataError("'" + path + "': row " + std::to_string(r + 1) +
                            ", column 'score': cannot parse '" + table.rows[r][1] + "'");
        if (!(*v >= 0.0 && *v <= 10.0))
            throw DataError("'" + path + "': row " + std::to_string(r + 1) + ": score " +
                            format_double(*v) + " outside [0, 10]");
        out.emplace_back(id, *v);
    }
    return out;
}

std::string dataset_to_csv(const Dataset& ds, const EmitOptions& opts) {
    const bool with_score = opts.include_score && !ds.scores.empty();
    const bool with_label = opts.include_label && !ds.labels.empty();
    std::ostringstream out;
    if (!opts.header_comment.empty()) out << "# " << opts.header_comment << '\n';
    out << "id";
    for (const auto& a : ds.schema.attributes()) out << ',' << a.name;
    if (with_score) out << ",score";
    if (with_label) out << ",class";
    out << '\n';
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        out << ds.ids[r];
        for (std::size_t a = 0; a < ds.schema.size(); ++a) {
            const auto& attr = ds.schema.attribute(a);
            out << ',';
            if (attr.kind == Kind::Numeric)
                out << format_double(ds.rows[r][a]);
            else
                out << attr.categories[static_cast<std::size_t>(ds.rows[r][a])];
        }
        if (with_score) out << ',' << format_double(ds.scores[r]);
        if (with_label) out << ',' << ds.schema.class_labels()[static_cast<std::size_t>(ds.labels[r])];
        out << '\n';
    }
    return out.str();
}

void write_dataset_csv(const Dataset& ds, const std::string& path, const EmitOptions& opts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << dataset_to_csv(ds, opts);
}

Dataset join_sources(const std::vector<Dataset>& parts,
                     const std::vector<std::pair<std::string, double>>& scores) {
    if (parts.empty()) throw DataError("join needs at least one source dataset");

    // Canonical attribute order: logs, emotion, gaze.
    std::vector<const Dataset*> ordered;
    for (Source s : {Source::Logs, Source::Emotion, Source::Gaze})
        for (const auto& p : parts)
            if (!p.schema.attributes().empty() && p.schema.attribute(0).source == s)
                ordered.push_back(&p);
    if (ordered.size() != parts.size())
        throw DataError("join parts must each hold a single source");

    std::vector<Attribute> attrs;
    for (const auto* p : ordered)
        for (const auto& a : p->schema.attributes()) attrs.push_back(a);
    Schema merged_schema(std::move(attrs), parts.front().schema.class_labels());

    // Id universe check: every id must appear in every part and in the score
    // table.
    std::unordered_map<std::string, double> score_of;
    for (const auto& [id, mark] : scores) {
        if (!score_of.emplace(id, mark).second) throw DataError("duplicate id '" + id + "' in scores");
    }
    std::vector<std::string> orphans;
    auto note_orphan = [&](const std::string& id, const std::string& where) {
        orphans.push_back(id + " (missing from " + where + ")");
    };
    std::vector<std::unordered_map<std::string, std::size_t>> row_of(ordered.size());
    for (std::size_t p = 0; p < ordered.size(); ++p)
        for (std::size_t r = 0; r < ordered[p]->ids.size(); ++r)
            row_of[p][ordered[p]->ids[r]] = r;

    for (std::size_t p = 0; p < ordered.size(); ++p)
        for (const auto& id : ordered[p]->ids)
            if (!score_of.count(id)) note_orphan(id, "scores");
    for (const auto& [id, mark] : scores) {
        (void)mark;
        for (std::size_t p = 0; p < ordered.size(); ++p)
            if (!row_of[p].count(id))
                note_orphan(id, std::string(source_name(ordered[p]->schema.attribute(0).source)));
    }
    if (!orphans.empty()) {
        std::sort(orphans.begin(), orphans.end());
        orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
        std::string msg = "join id mismatch: ";
        for (std::size_t i = 0; i < orphans.size(); ++i) {
            if (i) msg += ", ";
            msg += orphans[i];
        }
        throw DataError(msg);
    }

    // Row order follows the score table so the result is insensitive to the
    // order of `parts`.
    Dataset out;
    out.schema = std::move(merged_schema);
    for (const auto& [id, mark] : scores) {
        out.ids.push_back(id);
        out.scores.push_back(mark);
        std::vector<double> row;
        row.reserve(out.schema.size());
        for (std::size_t p = 0; p < ordered.size(); ++p) {
            const auto& src_row = ordered[p]->rows[row_of[p].at(id)];
            row.insert(row.end(), src_row.begin(), src_row.end());
        }
        out.rows.push_back(std::move(row));
    }
    out.validate();
    return out;
}

std::pair<Dataset, IdMap> anonymize(const Dataset& ds, std::uint64_t seed) {
    Rng rng(seed);
    std::unordered_set<std::string> used;
    auto clashes_with_original = [&](const std::string& token) {
        for (const auto& orig : ds.ids)
            if (token.find(orig) != std::string::npos || orig.find(token) != std::string::npos)
                return true;
        return false;
    };

    Dataset out = ds;
    IdMap map;
    for (std::size_t r = 0; r < ds.ids.size(); ++r) {
        std::string token;
        int attempts = 0;
        do {
            if (++attempts > 1000)
                throw DataError("cannot generate anonymous ids that avoid the originals");
            char buf[32];
            std::snprintf(buf, sizeof(buf), "anon-%010llu",
                          static_cast<unsigned long long>(rng.next_below(10000000000ULL)));
            token = buf;
        } while (used.count(token) || clashes_with_original(token));
        used.insert(token);
        out.ids[r] = token;
        map.pairs.emplace_back(ds.ids[r], token);
    }
    return {std::move(out), std::move(map)};
}

} // namespace fuse
