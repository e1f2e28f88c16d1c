#include <algorithm>
#include <cmath>

#include "fuse/error.hpp"
#include "learners/internal.hpp"

namespace fuse::detail {

namespace {

// Training-time exemplar: hyperrectangle plus the member points it covers.
struct GrowingExemplar {
    std::vector<double> lo, hi;              // numeric bounds (categorical slots unused)
    std::vector<std::vector<char>> allowed;  // categorical value sets
    int label = 0;
    std::vector<std::size_t> members;
};

struct NngeState {
    const Dataset& ds;
    std::vector<GrowingExemplar> exemplars;

    explicit NngeState(const Dataset& d) : ds(d) {}

    bool is_numeric(std::size_t a) const { return ds.schema.attribute(a).kind == Kind::Numeric; }

    GrowingExemplar point_exemplar(std::size_t row) const {
        GrowingExemplar ex;
        const auto& schema = ds.schema;
        ex.lo.assign(schema.size(), 0.0);
        ex.hi.assign(schema.size(), 0.0);
        ex.allowed.resize(schema.size());
        for (std::size_t a = 0; a < schema.size(); ++a) {
            if (is_numeric(a)) {
                ex.lo[a] = ex.hi[a] = ds.rows[row][a];
            } else {
                ex.allowed[a].assign(schema.attribute(a).categories.size(), 0);
                ex.allowed[a][static_cast<std::size_t>(ds.rows[row][a])] = 1;
            }
        }
        ex.label = ds.labels[row];
        ex.members = {row};
        return ex;
    }

    bool covers(const GrowingExemplar& ex, const std::vector<double>& row) const {
        for (std::size_t a = 0; a < ds.schema.size(); ++a) {
            if (is_numeric(a)) {
                if (row[a] < ex.lo[a] || row[a] > ex.hi[a]) return false;
            } else if (!ex.allowed[a][static_cast<std::size_t>(row[a])]) {
                return false;
            }
        }
        return true;
    }

    double sq_distance(const GrowingExemplar& ex, const std::vector<double>& row) const {
        double sq = 0.0;
        for (std::size_t a = 0; a < ds.schema.size(); ++a) {
            if (is_numeric(a)) {
                double v = row[a];
                double d = v < ex.lo[a] ? ex.lo[a] - v : (v > ex.hi[a] ? v - ex.hi[a] : 0.0);
                sq += d * d;
            } else if (!ex.allowed[a][static_cast<std::size_t>(row[a])]) {
                sq += 1.0;
            }
        }
        return sq;
    }

    // Closed-region intersection test between two hyperrectangles.
    bool overlaps(const GrowingExemplar& a, const GrowingExemplar& b) const {
        for (std::size_t at = 0; at < ds.schema.size(); ++at) {
            if (is_numeric(at)) {
                if (a.hi[at] < b.lo[at] || b.hi[at] < a.lo[at]) return false;
            } else {
                bool shared = false;
                for (std::size_t c = 0; c < a.allowed[at].size(); ++c)
                    if (a.allowed[at][c] && b.allowed[at][c]) {
                        shared = true;
                        break;
                    }
                if (!shared) return false;
            }
        }
        return true;
    }

    // Minimal extension of `ex` that also covers `row`.
    GrowingExemplar extended(const GrowingExemplar& ex, std::size_t row) const {
        GrowingExemplar out = ex;
        for (std::size_t a = 0; a < ds.schema.size(); ++a) {
            double v = ds.rows[row][a];
            if (is_numeric(a)) {
                out.lo[a] = std::min(out.lo[a], v);
                out.hi[a] = std::max(out.hi[a], v);
            } else {
                out.allowed[a][static_cast<std::size_t>(v)] = 1;
            }
        }
        out.members.push_back(row);
        return out;
    }

    // A candidate rectangle conflicts when it overlaps a different-class
    // exemplar or swallows a different-class training point seen so far.
    bool conflicts(const GrowingExemplar& candidate, std::size_t skip_index,
                   std::size_t rows_seen) const {
        for (std::size_t e = 0; e < exemplars.size(); ++e) {
            if (e == skip_index) continue;
            if (exemplars[e].label != candidate.label && overlaps(candidate, exemplars[e]))
                return true;
        }
        for (std::size_t r = 0; r < rows_seen; ++r)
            if (ds.labels[r] != candidate.label && covers(candidate, ds.rows[r])) return true;
        return false;
    }
};

} // namespace

Model train_nnge(const LearnerSpec& spec, const Dataset& ds) {
    NngeState state(ds);

    for (std::size_t row = 0; row < ds.n_rows(); ++row) {
        const auto& x = ds.rows[row];
        const int cls = ds.labels[row];

        // A different-class exemplar covering the new instance is split:
        // dissolved into point exemplars of its members, none of which can
        // cover the instance. Contradictory duplicates stay as single points.
        for (std::size_t e = 0; e < state.exemplars.size();) {
            if (state.exemplars[e].members.size() > 1 && state.exemplars[e].label != cls &&
                state.covers(state.exemplars[e], x)) {
                GrowingExemplar victim = std::move(state.exemplars[e]);
                state.exemplars.erase(state.exemplars.begin() + static_cast<long>(e));
                for (std::size_t member : victim.members)
                    state.exemplars.push_back(state.point_exemplar(member));
            } else {
                ++e;
            }
        }

        // Generalize into the nearest same-class exemplar whose extension
        // stays conflict-free; otherwise store a point exemplar.
        std::vector<std::size_t> same_class;
        for (std::size_t e = 0; e < state.exemplars.size(); ++e)
            if (state.exemplars[e].label == cls) same_class.push_back(e);
        std::stable_sort(same_class.begin(), same_class.end(), [&](std::size_t a, std::size_t b) {
            return state.sq_distance(state.exemplars[a], x) <
                   state.sq_distance(state.exemplars[b], x);
        });

        bool committed = false;
        for (std::size_t e : same_class) {
            GrowingExemplar candidate = state.extended(state.exemplars[e], row);
            if (!state.conflicts(candidate, e, row)) {
                state.exemplars[e] = std::move(candidate);
                committed = true;
                break;
            }
        }
        if (!committed) state.exemplars.push_back(state.point_exemplar(row));
    }

    ExemplarModel em;
    em.exemplars.reserve(state.exemplars.size());
    for (const auto& g : state.exemplars) {
        Exemplar ex;
        ex.lo = g.lo;
        ex.hi = g.hi;
        ex.allowed = g.allowed;
        ex.label = g.label;
        ex.counts.assign(ds.schema.n_classes(), 0.0);
        ex.counts[static_cast<std::size_t>(g.label)] = static_cast<double>(g.members.size());
        em.exemplars.push_back(std::move(ex));
    }

    Model m;
    m.spec = spec;
    m.schema = ds.schema;
    m.structure = std::move(em);
    return m;
}

} // namespace fuse::detail
