#include <algorithm>
#include <cmath>
#include <sstream>

#include "fuse/error.hpp"
#include "fuse/text.hpp"
#include "learners/internal.hpp"

namespace fuse {

namespace {

std::string render_counts(const std::vector<double>& counts) {
    std::string out = " (";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) out += '/';
        out += format_double(counts[i]);
    }
    out += ')';
    return out;
}

std::string render_condition(const Schema& schema, const Condition& cond) {
    const auto& name = schema.attribute(cond.attr).name;
    auto cat = [&](std::size_t c) { return schema.attribute(cond.attr).categories[c]; };
    switch (cond.op) {
        case Condition::Op::True: return "true";
        case Condition::Op::LessEq: return name + " <= " + format_double(cond.value);
        case Condition::Op::Greater: return name + " > " + format_double(cond.value);
        case Condition::Op::GreaterEq: return name + " >= " + format_double(cond.value);
        case Condition::Op::Less: return name + " < " + format_double(cond.value);
        case Condition::Op::Equals: return name + " = " + cat(cond.categories[0]);
        case Condition::Op::InInterval:
            return name + " in [" + format_double(cond.lo) + ", " + format_double(cond.hi) + "]";
        case Condition::Op::InSet: {
            std::string out = name + " in {";
            for (std::size_t i = 0; i < cond.categories.size(); ++i) {
                if (i) out += ", ";
                out += cat(cond.categories[i]);
            }
            return out + "}";
        }
    }
    return "?";
}

std::string render_rule_line(const Schema& schema, const std::vector<Condition>& conds, int label,
                             const std::vector<double>* counts) {
    std::string out = "If ";
    if (conds.empty()) {
        out += "true";
    } else {
        for (std::size_t i = 0; i < conds.size(); ++i) {
            if (i) out += " AND ";
            out += render_condition(schema, conds[i]);
        }
    }
    out += " Then ";
    out += schema.class_labels()[static_cast<std::size_t>(label)];
    if (counts) out += render_counts(*counts);
    return out;
}

void flatten_tree_rules(const TreeModel& tree, const Schema& schema, int node_index,
                        std::vector<Condition>& path, std::ostringstream& out, int& n_rules) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    if (node.leaf) {
        int label = detail::majority_class(node.counts);
        out << render_rule_line(schema, path, label, &node.counts) << '\n';
        ++n_rules;
        return;
    }
    for (std::size_t b = 0; b < node.children.size(); ++b) {
        Condition cond;
        cond.attr = node.attr;
        if (node.numeric) {
            cond.op = b == 0 ? Condition::Op::LessEq : Condition::Op::Greater;
            cond.value = node.threshold;
        } else {
            cond.op = Condition::Op::Equals;
            cond.categories = {b};
        }
        path.push_back(cond);
        flatten_tree_rules(tree, schema, node.children[b], path, out, n_rules);
        path.pop_back();
    }
}

std::vector<Condition> exemplar_conditions(const Exemplar& ex, const Schema& schema) {
    std::vector<Condition> conds;
    for (std::size_t a = 0; a < schema.size(); ++a) {
        const auto& attr = schema.attribute(a);
        Condition cond;
        cond.attr = a;
        if (attr.kind == Kind::Numeric) {
            cond.op = Condition::Op::InInterval;
            cond.lo = ex.lo[a];
            cond.hi = ex.hi[a];
            conds.push_back(std::move(cond));
        } else {
            std::vector<std::size_t> allowed;
            for (std::size_t c = 0; c < ex.allowed[a].size(); ++c)
                if (ex.allowed[a][c]) allowed.push_back(c);
            if (allowed.size() == ex.allowed[a].size()) continue; // unconstrained
            if (allowed.size() == 1) {
                cond.op = Condition::Op::Equals;
                cond.categories = {allowed[0]};
            } else {
                cond.op = Condition::Op::InSet;
                cond.categories = std::move(allowed);
            }
            conds.push_back(std::move(cond));
        }
    }
    return conds;
}

} // namespace

std::string export_rules(const Model& m) {
    std::ostringstream out;
    int n_rules = 0;
    if (const auto* tree = std::get_if<TreeModel>(&m.structure)) {
        std::vector<Condition> path;
        flatten_tree_rules(*tree, m.schema, 0, path, out, n_rules);
        out << "Size of the tree: " << tree->size() << '\n';
    } else if (const auto* rules = std::get_if<RuleListModel>(&m.structure)) {
        for (const auto& rule : rules->rules) {
            out << render_rule_line(m.schema, rule.conditions, rule.label, &rule.counts) << '\n';
            ++n_rules;
        }
    } else {
        const auto& exemplars = std::get<ExemplarModel>(m.structure).exemplars;
        for (const auto& ex : exemplars) {
            auto conds = exemplar_conditions(ex, m.schema);
            // No counts: exemplar predictions are one-hot.
            out << render_rule_line(m.schema, conds, ex.label, nullptr) << '\n';
            ++n_rules;
        }
    }
    out << "Number of Rules: " << n_rules << '\n';
    return out.str();
}

std::string export_rules(const VoteModel& m) {
    std::ostringstream out;
    for (std::size_t b = 0; b < m.bases.size(); ++b) {
        if (b) out << '\n';
        out << "=== " << m.bases[b].first << " ===\n";
        out << export_rules(m.bases[b].second);
    }
    return out.str();
}

// --- Interpreter -----------------------------------------------------------

namespace {

struct ParsedRule {
    std::vector<Condition> conditions;
    int label = 0;
    std::vector<double> counts; // empty when the line carries none
};

struct ParsedSection {
    std::string heading;
    std::vector<ParsedRule> rules;
    std::optional<int> declared_rule_count;
};

[[noreturn]] void malformed(const std::string& what) {
    throw DataError("malformed rule text: " + what);
}

Condition parse_condition(const Schema& schema, std::string_view text) {
    std::string s(trim(text));
    if (s == "true") {
        Condition c;
        c.op = Condition::Op::True;
        return c;
    }
    struct OpPattern {
        const char* token;
        Condition::Op op;
    };
    static const OpPattern patterns[] = {
        {" <= ", Condition::Op::LessEq}, {" >= ", Condition::Op::GreaterEq},
        {" > ", Condition::Op::Greater}, {" < ", Condition::Op::Less},
        {" in [", Condition::Op::InInterval}, {" in {", Condition::Op::InSet},
        {" = ", Condition::Op::Equals},
    };
    for (const auto& pat : patterns) {
        auto pos = s.find(pat.token);
        if (pos == std::string::npos) continue;
        std::string name = s.substr(0, pos);
        auto attr = schema.index_of(name);
        if (!attr) malformed("unknown attribute '" + name + "'");
        std::string rhs = s.substr(pos + std::string(pat.token).size());

        Condition cond;
        cond.op = pat.op;
        cond.attr = *attr;
        switch (pat.op) {
            case Condition::Op::LessEq:
            case Condition::Op::GreaterEq:
            case Condition::Op::Greater:
            case Condition::Op::Less: {
                auto v = parse_double(trim(rhs));
                if (!v) malformed("bad threshold in '" + s + "'");
                cond.value = *v;
                return cond;
            }
            case Condition::Op::Equals: {
                auto c = schema.category_index(*attr, std::string(trim(rhs)));
                if (!c) malformed("unknown category in '" + s + "'");
                cond.categories = {*c};
                return cond;
            }
            case Condition::Op::InInterval: {
                if (rhs.empty() || rhs.back() != ']') malformed("unterminated interval in '" + s + "'");
                rhs.pop_back();
                auto parts = split(rhs, ',');
                if (parts.size() != 2) malformed("interval needs two bounds in '" + s + "'");
                auto lo = parse_double(trim(parts[0])), hi = parse_double(trim(parts[1]));
                if (!lo || !hi) malformed("bad interval bound in '" + s + "'");
                cond.lo = *lo;
                cond.hi = *hi;
                return cond;
            }
            case Condition::Op::InSet: {
                if (rhs.empty() || rhs.back() != '}') malformed("unterminated set in '" + s + "'");
                rhs.pop_back();
                for (const auto& part : split(rhs, ',')) {
                    auto c = schema.category_index(*attr, std::string(trim(part)));
                    if (!c) malformed("unknown category in '" + s + "'");
                    cond.categories.push_back(*c);
                }
                if (cond.categories.empty()) malformed("empty category set in '" + s + "'");
                return cond;
            }
            case Condition::Op::True: break;
        }
    }
    malformed("unrecognized condition '" + s + "'");
}

ParsedRule parse_rule_line(const Schema& schema, std::string_view line) {
    std::string s(line);
    if (!starts_with(s, "If ")) malformed("rule line must start with 'If '");
    auto then_pos = s.rfind(" Then ");
    if (then_pos == std::string::npos) malformed("rule line lacks ' Then ': " + s);
    std::string lhs = s.substr(3, then_pos - 3);
    std::string rhs = s.substr(then_pos + 6);

    ParsedRule rule;
    if (!rhs.empty() && rhs.back() == ')') {
        auto open = rhs.rfind(" (");
        if (open == std::string::npos) malformed("unbalanced counts in: " + s);
        std::string counts_text = rhs.substr(open + 2);
        counts_text.pop_back(); // trailing ')'
        for (const auto& part : split(counts_text, '/')) {
            auto v = parse_double(trim(part));
            if (!v || *v < 0) malformed("bad class count in: " + s);
            rule.counts.push_back(*v);
        }
        rhs = rhs.substr(0, open);
    }
    auto label = schema.class_index(std::string(trim(rhs)));
    if (!label) malformed("unknown class label '" + std::string(trim(rhs)) + "'");
    rule.label = *label;
    if (!rule.counts.empty() && rule.counts.size() != schema.n_classes())
        malformed("count list length mismatch in: " + s);

    std::string conjunction(trim(lhs));
    if (conjunction != "true") {
        std::size_t start = 0;
        while (true) {
            auto pos = conjunction.find(" AND ", start);
            std::string part = pos == std::string::npos
                                   ? conjunction.substr(start)
                                   : conjunction.substr(start, pos - start);
            rule.conditions.push_back(parse_condition(schema, part));
            if (pos == std::string::npos) break;
            start = pos + 5;
        }
    }
    return rule;
}

std::vector<ParsedSection> parse_sections(const Schema& schema, const std::string& text) {
    std::vector<ParsedSection> sections;
    ParsedSection current;
    bool has_content = false;
    auto finish = [&]() {
        if (!current.rules.empty() || !current.heading.empty()) {
            if (current.rules.empty()) malformed("section without rules");
            if (current.declared_rule_count &&
                *current.declared_rule_count != static_cast<int>(current.rules.size()))
                malformed("rule count footer disagrees with the rules listed");
            sections.push_back(std::move(current));
            current = {};
        }
    };

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t(trim(line));
        if (t.empty()) continue;
        if (starts_with(t, "=== ") && t.size() > 8 && t.substr(t.size() - 4) == " ===") {
            finish();
            current.heading = t.substr(4, t.size() - 8);
            has_content = true;
        } else if (starts_with(t, "If ")) {
            current.rules.push_back(parse_rule_line(schema, t));
            has_content = true;
        } else if (starts_with(t, "Size of the tree:")) {
            // informational footer
        } else if (starts_with(t, "Number of Rules:")) {
            auto v = parse_int(trim(std::string_view(t).substr(16)));
            if (!v) malformed("bad rule count footer: " + t);
            current.declared_rule_count = static_cast<int>(*v);
        } else {
            malformed("unrecognized line: " + t);
        }
    }
    finish();
    if (!has_content || sections.empty()) malformed("no rules found");
    return sections;
}

ClassDistribution section_distribution(const ParsedSection& section, const Schema& schema,
                                       const std::vector<double>& row, int& matched_label) {
    const ParsedRule* hit = nullptr;
    for (const auto& rule : section.rules) {
        bool all = true;
        for (const auto& cond : rule.conditions)
            if (!cond.matches(row)) {
                all = false;
                break;
            }
        if (all) {
            hit = &rule;
            break;
        }
    }
    if (!hit) {
        // Exemplar-style fallback: nearest rule by condition distance,
        // earliest on ties.
        double best_sq = 0.0;
        for (const auto& rule : section.rules) {
            double sq = 0.0;
            for (const auto& cond : rule.conditions) sq += cond.sq_distance(row);
            if (!hit || sq < best_sq) {
                hit = &rule;
                best_sq = sq;
            }
        }
    }
    matched_label = hit->label;

    ClassDistribution dist;
    dist.probs.assign(schema.n_classes(), 0.0);
    if (hit->counts.empty()) {
        dist.probs[static_cast<std::size_t>(hit->label)] = 1.0;
    } else {
        double total = 0.0;
        for (double c : hit->counts) total += c;
        if (total > 0.0)
            for (std::size_t i = 0; i < hit->counts.size(); ++i)
                dist.probs[i] = hit->counts[i] / total;
        else
            dist.probs[static_cast<std::size_t>(hit->label)] = 1.0;
    }
    return dist;
}

} // namespace

int interpret_rules(const std::string& rule_text, const Schema& schema,
                    const std::vector<double>& row) {
    if (row.size() != schema.size()) throw DataError("instance does not match schema");
    auto sections = parse_sections(schema, rule_text);

    if (sections.size() == 1) {
        int label = 0;
        section_distribution(sections[0], schema, row, label);
        return label;
    }

    // Vote text: average the per-section distributions.
    ClassDistribution mean;
    mean.probs.assign(schema.n_classes(), 0.0);
    for (const auto& section : sections) {
        int label = 0;
        ClassDistribution d = section_distribution(section, schema, row, label);
        for (std::size_t i = 0; i < mean.probs.size(); ++i) mean.probs[i] += d.probs[i];
    }
    for (double& p : mean.probs) p /= static_cast<double>(sections.size());
    return mean.argmax();
}

} // namespace fuse
