#include <algorithm>
#include <cmath>
#include <set>

#include "fuse/error.hpp"
#include "learners/internal.hpp"

namespace fuse::detail {

namespace {

constexpr double kDlSurplus = 64.0; // bits of slack before rule adding stops

bool rule_matches(const std::vector<Condition>& conds, const std::vector<double>& row) {
    for (const auto& c : conds)
        if (!c.matches(row)) return false;
    return true;
}

struct PosNeg {
    double p = 0.0, n = 0.0;
};

PosNeg coverage(const Dataset& ds, const std::vector<std::size_t>& idx,
                const std::vector<Condition>& conds, int pos_class) {
    PosNeg out;
    for (std::size_t i : idx) {
        if (!rule_matches(conds, ds.rows[i])) continue;
        if (ds.labels[i] == pos_class)
            out.p += 1.0;
        else
            out.n += 1.0;
    }
    return out;
}

// --- MDL machinery ---------------------------------------------------------

double subset_dl(double t, double k, double p) {
    double rt = p > 0.0 ? -k * std::log2(p) : 0.0;
    if (t - k > 0.0 && p < 1.0) rt -= (t - k) * std::log2(1.0 - p);
    return rt;
}

// Bits to transmit one rule drawn from `num_all_conds` possible conditions.
double theory_dl(std::size_t n_conds, double num_all_conds) {
    if (n_conds == 0) return 0.0;
    double k = static_cast<double>(n_conds);
    double tdl = std::log2(k);
    if (k > 1.0) tdl += 2.0 * std::log2(tdl);
    tdl += subset_dl(num_all_conds, k, k / num_all_conds);
    return 0.5 * tdl;
}

// Bits to transmit the exceptions of a ruleset with the given coverage.
double data_dl(double exp_fp_over_err, double cover, double uncover, double fp, double fn) {
    double total_bits = std::log2(cover + uncover + 1.0);
    double cover_bits = 0.0, uncover_bits = 0.0;
    double exp_err;
    if (cover > uncover) {
        exp_err = exp_fp_over_err * (fp + fn);
        cover_bits = subset_dl(cover, fp, cover > 0.0 ? exp_err / cover : 0.0);
        uncover_bits = uncover > 0.0 ? subset_dl(uncover, fn, fn / uncover) : 0.0;
    } else {
        exp_err = (1.0 - exp_fp_over_err) * (fp + fn);
        cover_bits = cover > 0.0 ? subset_dl(cover, fp, fp / cover) : 0.0;
        uncover_bits = uncover > 0.0 ? subset_dl(uncover, fn, exp_err / uncover) : 0.0;
    }
    return total_bits + cover_bits + uncover_bits;
}

struct RunContext {
    const Dataset& ds;
    int pos_class;
    std::vector<std::size_t> run_idx; // data for this class run
    double num_all_conds = 0.0;
    double exp_fp_rate = 0.0;

    RunContext(const Dataset& d, int pos, std::vector<std::size_t> idx)
        : ds(d), pos_class(pos), run_idx(std::move(idx)) {
        for (std::size_t a = 0; a < ds.schema.size(); ++a) {
            const auto& attr = ds.schema.attribute(a);
            if (attr.kind == Kind::Categorical) {
                num_all_conds += static_cast<double>(attr.categories.size());
            } else {
                std::set<double> distinct;
                for (std::size_t i : run_idx) distinct.insert(ds.rows[i][a]);
                num_all_conds += 2.0 * static_cast<double>(distinct.size());
            }
        }
        PosNeg pn = coverage(ds, run_idx, {}, pos_class);
        double total = pn.p + pn.n;
        exp_fp_rate = total > 0.0 ? pn.p / total : 0.0;
    }

    // Total description length of a candidate ruleset under decision-list
    // coverage: theory bits per rule plus exception bits.
    double total_dl(const std::vector<std::vector<Condition>>& rules) const {
        double cover = 0.0, fp = 0.0;
        std::vector<char> claimed(run_idx.size(), 0);
        double dl = 0.0;
        for (const auto& conds : rules) {
            dl += theory_dl(conds.size(), num_all_conds);
            for (std::size_t j = 0; j < run_idx.size(); ++j) {
                if (claimed[j]) continue;
                if (rule_matches(conds, ds.rows[run_idx[j]])) {
                    claimed[j] = 1;
                    cover += 1.0;
                    if (ds.labels[run_idx[j]] != pos_class) fp += 1.0;
                }
            }
        }
        double uncover = 0.0, fn = 0.0;
        for (std::size_t j = 0; j < run_idx.size(); ++j) {
            if (!claimed[j]) {
                uncover += 1.0;
                if (ds.labels[run_idx[j]] == pos_class) fn += 1.0;
            }
        }
        return dl + data_dl(exp_fp_rate, cover, uncover, fp, fn);
    }
};

// --- Growing and pruning ---------------------------------------------------

// Best single condition by FOIL information gain over the covered instances.
std::optional<Condition> best_foil_condition(const Dataset& ds,
                                             const std::vector<std::size_t>& covered,
                                             int pos_class) {
    PosNeg before = coverage(ds, covered, {}, pos_class);
    if (before.p <= 0.0) return std::nullopt;
    const double base = std::log2(before.p / (before.p + before.n));

    std::optional<Condition> best;
    double best_gain = 0.0;
    auto consider = [&](const Condition& cond, double p, double n) {
        if (p <= 0.0) return;
        double gain = p * (std::log2(p / (p + n)) - base);
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best = cond;
        }
    };

    for (std::size_t a = 0; a < ds.schema.size(); ++a) {
        const auto& attr = ds.schema.attribute(a);
        if (attr.kind == Kind::Categorical) {
            std::vector<PosNeg> per_cat(attr.categories.size());
            for (std::size_t i : covered) {
                auto c = static_cast<std::size_t>(ds.rows[i][a]);
                if (ds.labels[i] == pos_class)
                    per_cat[c].p += 1.0;
                else
                    per_cat[c].n += 1.0;
            }
            for (std::size_t c = 0; c < per_cat.size(); ++c) {
                Condition cond;
                cond.op = Condition::Op::Equals;
                cond.attr = a;
                cond.categories = {c};
                consider(cond, per_cat[c].p, per_cat[c].n);
            }
        } else {
            std::vector<std::size_t> order(covered);
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                double vx = ds.rows[x][a], vy = ds.rows[y][a];
                if (vx != vy) return vx < vy;
                return x < y;
            });
            double p_left = 0.0, n_left = 0.0;
            for (std::size_t j = 0; j + 1 < order.size(); ++j) {
                if (ds.labels[order[j]] == pos_class)
                    p_left += 1.0;
                else
                    n_left += 1.0;
                double v = ds.rows[order[j]][a];
                double next = ds.rows[order[j + 1]][a];
                if (next == v) continue;
                double mid = (v + next) / 2.0;
                Condition le;
                le.op = Condition::Op::LessEq;
                le.attr = a;
                le.value = mid;
                consider(le, p_left, n_left);
                Condition ge;
                ge.op = Condition::Op::GreaterEq;
                ge.attr = a;
                ge.value = mid;
                consider(ge, before.p - p_left, before.n - n_left);
            }
        }
    }
    return best;
}

std::vector<Condition> grow_rule(const Dataset& ds, const std::vector<std::size_t>& grow_idx,
                                 int pos_class) {
    std::vector<Condition> conds;
    std::vector<std::size_t> covered = grow_idx;
    while (true) {
        PosNeg pn = coverage(ds, covered, {}, pos_class);
        if (pn.n <= 0.0) break; // rule is pure on the grow set
        auto cond = best_foil_condition(ds, covered, pos_class);
        if (!cond) break;
        conds.push_back(*cond);
        std::vector<std::size_t> next;
        for (std::size_t i : covered)
            if (cond->matches(ds.rows[i])) next.push_back(i);
        covered = std::move(next);
    }
    return conds;
}

// Extends an existing rule with further grown conditions (revision variant).
std::vector<Condition> grow_from(const Dataset& ds, const std::vector<std::size_t>& grow_idx,
                                 int pos_class, std::vector<Condition> conds) {
    std::vector<std::size_t> covered;
    for (std::size_t i : grow_idx)
        if (rule_matches(conds, ds.rows[i])) covered.push_back(i);
    while (true) {
        PosNeg pn = coverage(ds, covered, {}, pos_class);
        if (pn.n <= 0.0) break;
        auto cond = best_foil_condition(ds, covered, pos_class);
        if (!cond) break;
        conds.push_back(*cond);
        std::vector<std::size_t> next;
        for (std::size_t i : covered)
            if (cond->matches(ds.rows[i])) next.push_back(i);
        covered = std::move(next);
    }
    return conds;
}

// Deletes the final sequence of conditions maximizing (p - n) / (p + n) on
// the prune set; ties keep the longer rule. Never prunes to an empty rule.
std::vector<Condition> prune_rule(const Dataset& ds, std::vector<Condition> conds,
                                  const std::vector<std::size_t>& prune_idx, int pos_class) {
    if (conds.empty() || prune_idx.empty()) return conds;
    auto value_at = [&](std::size_t len) {
        std::vector<Condition> prefix(conds.begin(), conds.begin() + static_cast<long>(len));
        PosNeg pn = coverage(ds, prune_idx, prefix, pos_class);
        if (pn.p + pn.n <= 0.0) return -1.0;
        return (pn.p - pn.n) / (pn.p + pn.n);
    };
    std::size_t best_len = conds.size();
    double best_value = value_at(best_len);
    for (std::size_t len = conds.size(); len-- > 1;) {
        double v = value_at(len);
        if (v > best_value) {
            best_value = v;
            best_len = len;
        }
    }
    conds.resize(best_len);
    return conds;
}

// Stratified 2:1 grow/prune partition with a fresh shuffle per rule.
void split_grow_prune(const Dataset& ds, const std::vector<std::size_t>& idx, Rng& rng,
                      std::vector<std::size_t>& grow, std::vector<std::size_t>& prune) {
    grow.clear();
    prune.clear();
    std::vector<std::vector<std::size_t>> per_class(ds.schema.n_classes());
    for (std::size_t i : idx) per_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    for (auto& members : per_class) {
        rng.shuffle(members);
        std::size_t n_prune = members.size() / 3;
        for (std::size_t j = 0; j < members.size(); ++j)
            (j < n_prune ? prune : grow).push_back(members[j]);
    }
    std::sort(grow.begin(), grow.end());
    std::sort(prune.begin(), prune.end());
    if (grow.empty()) std::swap(grow, prune);
}

std::vector<std::size_t> remove_covered(const Dataset& ds, const std::vector<std::size_t>& idx,
                                        const std::vector<Condition>& conds) {
    std::vector<std::size_t> out;
    for (std::size_t i : idx)
        if (!rule_matches(conds, ds.rows[i])) out.push_back(i);
    return out;
}

bool has_positive(const Dataset& ds, const std::vector<std::size_t>& idx, int pos_class) {
    for (std::size_t i : idx)
        if (ds.labels[i] == pos_class) return true;
    return false;
}

// Grows rules for one class until the MDL stop fires; appends onto `rules`.
void add_rules_for_class(const RunContext& ctx, Rng& rng,
                         std::vector<std::vector<Condition>>& rules,
                         std::vector<std::size_t>& remaining) {
    double min_dl = ctx.total_dl(rules);
    while (has_positive(ctx.ds, remaining, ctx.pos_class)) {
        std::vector<std::size_t> grow, prune;
        split_grow_prune(ctx.ds, remaining, rng, grow, prune);
        std::vector<Condition> conds = grow_rule(ctx.ds, grow, ctx.pos_class);
        if (conds.empty()) break;
        conds = prune_rule(ctx.ds, conds, prune, ctx.pos_class);

        // Reject the rule (and stop) once its prune-set error reaches 50%.
        PosNeg pn = coverage(ctx.ds, prune, conds, ctx.pos_class);
        if (pn.p + pn.n > 0.0 && pn.n >= pn.p) break;

        rules.push_back(conds);
        double dl = ctx.total_dl(rules);
        if (dl > min_dl + kDlSurplus) {
            rules.pop_back();
            break;
        }
        min_dl = std::min(min_dl, dl);
        auto next = remove_covered(ctx.ds, remaining, conds);
        if (next.size() == remaining.size()) {
            rules.pop_back();
            break; // no progress; avoid an infinite loop
        }
        remaining = std::move(next);
    }
}

void optimize_pass(const RunContext& ctx, Rng& rng, std::vector<std::vector<Condition>>& rules) {
    for (std::size_t r = 0; r < rules.size(); ++r) {
        // Decision-list position: instances surviving the earlier rules.
        std::vector<std::size_t> context = ctx.run_idx;
        for (std::size_t j = 0; j < r; ++j) context = remove_covered(ctx.ds, context, rules[j]);
        if (!has_positive(ctx.ds, context, ctx.pos_class)) continue;

        std::vector<std::size_t> grow, prune;
        split_grow_prune(ctx.ds, context, rng, grow, prune);

        std::vector<Condition> replacement =
            prune_rule(ctx.ds, grow_rule(ctx.ds, grow, ctx.pos_class), prune, ctx.pos_class);
        std::vector<Condition> revision =
            prune_rule(ctx.ds, grow_from(ctx.ds, grow, ctx.pos_class, rules[r]), prune,
                       ctx.pos_class);

        double dl_original = ctx.total_dl(rules);
        auto with_variant = [&](const std::vector<Condition>& v) {
            auto copy = rules;
            copy[r] = v;
            return ctx.total_dl(copy);
        };
        double dl_replacement = replacement.empty() ? dl_original + 1.0 : with_variant(replacement);
        double dl_revision = revision.empty() ? dl_original + 1.0 : with_variant(revision);

        if (dl_replacement < dl_original && dl_replacement <= dl_revision)
            rules[r] = replacement;
        else if (dl_revision < dl_original)
            rules[r] = revision;
    }
}

} // namespace

Model train_ripper(const LearnerSpec& spec, const Dataset& ds) {
    Rng rng(mix_seed(spec.seed, 0x5172));
    const std::size_t n_classes = ds.schema.n_classes();

    std::vector<std::size_t> all(ds.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<double> totals = count_classes(ds, all);

    // Classes from rarest to most frequent; the last one becomes the default.
    std::vector<std::size_t> order(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });

    RuleListModel model;
    std::vector<std::size_t> data = all;
    for (std::size_t oi = 0; oi + 1 < order.size(); ++oi) {
        const int pos_class = static_cast<int>(order[oi]);
        if (!has_positive(ds, data, pos_class)) continue;
        RunContext ctx(ds, pos_class, data);

        std::vector<std::vector<Condition>> rules;
        std::vector<std::size_t> remaining = data;
        add_rules_for_class(ctx, rng, rules, remaining);

        for (int pass = 0; pass < spec.optimization_passes; ++pass) optimize_pass(ctx, rng, rules);

        // Mop up positives still uncovered after optimization.
        remaining = data;
        for (const auto& conds : rules) remaining = remove_covered(ds, remaining, conds);
        if (has_positive(ds, remaining, pos_class)) add_rules_for_class(ctx, rng, rules, remaining);

        // Drop rules whose removal shortens the description, last to first.
        for (std::size_t r = rules.size(); r-- > 0;) {
            auto without = rules;
            without.erase(without.begin() + static_cast<long>(r));
            if (ctx.total_dl(without) < ctx.total_dl(rules)) rules = std::move(without);
        }

        for (auto& conds : rules) {
            Rule rule;
            rule.conditions = std::move(conds);
            rule.label = pos_class;
            model.rules.push_back(std::move(rule));
        }
        for (const auto& rule : model.rules) data = remove_covered(ds, data, rule.conditions);
    }

    // Catch-all default for the most frequent class.
    Rule def;
    def.label = static_cast<int>(order.back());
    model.rules.push_back(std::move(def));

    refresh_rule_counts(model, ds);

    Model m;
    m.spec = spec;
    m.schema = ds.schema;
    m.structure = std::move(model);
    return m;
}

} // namespace fuse::detail
