#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kan.hpp"
#include "monads.hpp"
#include "poset.hpp"
#include "reflection.hpp"

namespace kaninj {

struct FreeConstruction {
    PosetPtr object;
    MonotoneMap unit;
};

/// Nonempty downsets of P under inclusion, with the principal-downset unit.
/// Built directly from the order — no reflection machinery involved — so it
/// can serve as independent ground truth for the reflection engine.
inline FreeConstruction free_join_semilattice(const PosetPtr& P) {
    detail::DownsetPoset d = detail::downset_poset(P, /*include_empty=*/false);
    std::vector<std::size_t> unit(P->size());
    for (std::size_t x = 0; x < P->size(); ++x)
        unit[x] = d.at(detail::principal_mask(*P, x));
    return FreeConstruction{d.object,
                            MonotoneMap(MonotoneMap::unchecked_t{}, P, d.object, std::move(unit))};
}

/// All downsets of P (the empty one included) under inclusion, with the
/// principal-downset unit.
inline FreeConstruction downset_completion(const PosetPtr& P) {
    detail::DownsetPoset d = detail::downset_poset(P, /*include_empty=*/true);
    std::vector<std::size_t> unit(P->size());
    for (std::size_t x = 0; x < P->size(); ++x)
        unit[x] = d.at(detail::principal_mask(*P, x));
    return FreeConstruction{d.object,
                            MonotoneMap(MonotoneMap::unchecked_t{}, P, d.object, std::move(unit))};
}

struct ReflectionVerification {
    bool ok = false;
    std::string detail;
};

/// Checks the couniversal property of a candidate reflection (R, unit) of
/// X = dom(unit) by literal exhaustion: R must be a member of the left
/// injectivity class of H, and for every map p from X into a member target,
/// exactly one member-morphism q: R -> target satisfies q ∘ unit = p. The
/// check never consults the reflection engine.
inline ReflectionVerification verify_reflection(const FreeConstruction& candidate,
                                                std::span<const MonotoneMap> H,
                                                std::span<const PosetPtr> targets) {
    ReflectionVerification out;
    if (*candidate.unit.cod() != *candidate.object) {
        out.detail = "unit codomain differs from the candidate object";
        return out;
    }
    if (!membership(Subject(candidate.object), H, Side::left).ok) {
        out.detail = "candidate object is not a member of the injectivity class";
        return out;
    }
    const PosetPtr X = candidate.unit.dom();
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const PosetPtr& Q = targets[t];
        if (!membership(Subject(Q), H, Side::left).ok) {
            out.detail = "target " + std::to_string(t) + " is not a member";
            return out;
        }
        // Bucket composites q ∘ unit of all member-morphisms q: R -> Q, then
        // demand exactly one hit per map p: X -> Q.
        std::map<std::vector<std::size_t>, std::size_t> buckets;
        for_each_monotone_map(candidate.object, Q, [&](const MonotoneMap& q) {
            if (!membership(Subject(q), H, Side::left).ok) return;
            ++buckets[compose(q, candidate.unit).assignment()];
        });
        bool bad = false;
        for_each_monotone_map(X, Q, [&](const MonotoneMap& p) {
            auto it = buckets.find(p.assignment());
            std::size_t hits = it == buckets.end() ? 0 : it->second;
            if (hits == 1) return true;
            out.detail = (hits == 0 ? "no factorization" : "multiple factorizations") +
                         std::string(" through the unit for a map into target ") +
                         std::to_string(t);
            bad = true;
            return false;
        });
        if (bad) return out;
    }
    out.ok = true;
    out.detail = "verified";
    return out;
}

struct WeakStrongReport {
    struct Row {
        bool weak_member = false;    // w.r.t. H
        bool strong_member = false;  // w.r.t. the collected units
    };
    std::vector<MonotoneMap> collected_units;  // weak-reflection units, one per subject
    std::vector<Row> rows;                     // aligned with the universe
    /// Weak members are strong members w.r.t. the collected units — this
    /// direction is exact.
    bool inclusion_ok = true;
    /// Strong-but-not-weak subjects. The converse direction is only checked
    /// relative to this universe: a unit defeating such a subject may live
    /// outside it.
    std::vector<std::size_t> converse_exceptions;
};

/// Compares weak injectivity w.r.t. H against strong injectivity w.r.t. the
/// units of the weak reflections of every poset in the universe.
inline WeakStrongReport weak_equals_strong_probe(std::span<const MonotoneMap> H,
                                                 std::span<const PosetPtr> universe,
                                                 ReflectionOptions options = {}) {
    options.mode = ChainMode::weak;
    WeakStrongReport rep;
    for (const PosetPtr& U : universe) {
        ReflectionTrace trace = run_reflection(U, H, options);
        rep.collected_units.push_back(trace.connecting(0, *trace.converged_at));
    }
    for (std::size_t i = 0; i < universe.size(); ++i) {
        WeakStrongReport::Row row;
        row.weak_member = membership(Subject(universe[i]), H, Side::weak_left).ok;
        row.strong_member = membership(Subject(universe[i]), rep.collected_units, Side::left).ok;
        if (row.weak_member && !row.strong_member) rep.inclusion_ok = false;
        if (row.strong_member && !row.weak_member) rep.converse_exceptions.push_back(i);
        rep.rows.push_back(row);
    }
    return rep;
}

/// Order-isomorphism search by backtracking, pruned with (down-degree,
/// up-degree) invariants. Exact for the sizes this library targets.
inline std::optional<MonotoneMap> find_isomorphism(const PosetPtr& P, const PosetPtr& Q) {
    const std::size_t n = P->size();
    if (n != Q->size()) return std::nullopt;
    auto degrees = [](const FinPoset& X) {
        std::vector<std::pair<std::size_t, std::size_t>> d(X.size());
        for (std::size_t i = 0; i < X.size(); ++i)
            for (std::size_t j = 0; j < X.size(); ++j) {
                if (X.leq(j, i)) ++d[i].first;
                if (X.leq(i, j)) ++d[i].second;
            }
        return d;
    };
    std::vector<std::pair<std::size_t, std::size_t>> dp = degrees(*P), dq = degrees(*Q);
    {
        auto sp = dp, sq = dq;
        std::sort(sp.begin(), sp.end());
        std::sort(sq.begin(), sq.end());
        if (sp != sq) return std::nullopt;
    }
    std::vector<std::size_t> assign(n, 0);
    std::vector<bool> used(n, false);
    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == n) return true;
        for (std::size_t v = 0; v < n; ++v) {
            if (used[v] || dp[i] != dq[v]) continue;
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j)
                ok = P->leq(i, j) == Q->leq(v, assign[j]) &&
                     P->leq(j, i) == Q->leq(assign[j], v);
            if (!ok) continue;
            assign[i] = v;
            used[v] = true;
            if (self(self, i + 1)) return true;
            used[v] = false;
        }
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    return MonotoneMap(MonotoneMap::unchecked_t{}, P, Q, std::move(assign));
}

inline bool is_isomorphic(const PosetPtr& P, const PosetPtr& Q) {
    return find_isomorphism(P, Q).has_value();
}

/// Every poset on n labeled elements, by exhausting the three states of each
/// unordered pair (incomparable, <, >) and keeping the transitive outcomes.
inline std::vector<PosetPtr> all_posets_labeled(std::size_t n, const std::string& prefix = "x") {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    std::vector<PosetPtr> out;
    std::vector<int> state(pairs.size(), 0);
    for (;;) {
        std::vector<std::uint8_t> leq(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            if (state[p] == 1) leq[pairs[p].first * n + pairs[p].second] = 1;
            if (state[p] == 2) leq[pairs[p].second * n + pairs[p].first] = 1;
        }
        bool transitive = true;
        for (std::size_t i = 0; i < n && transitive; ++i)
            for (std::size_t j = 0; j < n && transitive; ++j) {
                if (!leq[i * n + j]) continue;
                for (std::size_t k = 0; k < n; ++k)
                    if (leq[j * n + k] && !leq[i * n + k]) {
                        transitive = false;
                        break;
                    }
            }
        if (transitive) out.push_back(make_poset(names, std::move(leq)));
        std::size_t p = 0;
        while (p < pairs.size() && state[p] == 2) state[p++] = 0;
        if (p == pairs.size()) break;
        ++state[p];
    }
    return out;
}

/// One representative per isomorphism class of posets on n elements.
inline std::vector<PosetPtr> all_posets_up_to_iso(std::size_t n,
                                                  const std::string& prefix = "x") {
    std::vector<PosetPtr> reps;
    for (const PosetPtr& P : all_posets_labeled(n, prefix)) {
        bool fresh = true;
        for (const PosetPtr& R : reps)
            if (is_isomorphic(P, R)) {
                fresh = false;
                break;
            }
        if (fresh) reps.push_back(P);
    }
    return reps;
}

/// Literal check: every subset (the empty one included) has a join.
inline bool is_complete_lattice(const FinPoset& P) {
    if (P.size() > 20) throw ValidationError("is_complete_lattice: poset too large");
    const std::size_t n = P.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask)
        if (!join_of(P, detail::mask_members(mask))) return false;
    return true;
}

/// Literal check: every nonempty subset has a join.
inline bool is_join_semilattice(const FinPoset& P) {
    if (P.size() > 20) throw ValidationError("is_join_semilattice: poset too large");
    const std::size_t n = P.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << n); ++mask)
        if (!join_of(P, detail::mask_members(mask))) return false;
    return true;
}

}  // namespace kaninj
