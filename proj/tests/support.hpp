#pragma once

// Shared fixtures and brute-force helpers for the test suites. Everything in
// this header is deliberately definitional: the helpers quantify over
// enumerated maps and never reuse the classification or search shortcuts of
// the library code they are used to check.

#include <cstddef>
#include <utility>
#include <vector>

#include <kaninj/constructions.hpp>
#include <kaninj/kan.hpp>
#include <kaninj/monads.hpp>
#include <kaninj/oracles.hpp>
#include <kaninj/poset.hpp>
#include <kaninj/reflection.hpp>
#include <kaninj/workspace.hpp>

namespace fixtures {

using namespace kaninj;

// ---- standard small posets -------------------------------------------------

inline PosetPtr empty_poset() { return validate_poset({}, {}); }
inline PosetPtr point() { return validate_poset({"p"}, {}); }
inline PosetPtr antichain2() { return validate_poset({"a", "b"}, {}); }
inline PosetPtr antichain3() { return validate_poset({"a", "b", "c"}, {}); }

/// Two incomparable elements under a shared top.
inline PosetPtr vee() { return validate_poset({"a", "b", "t"}, {{"a", "t"}, {"b", "t"}}); }

/// Two incomparable elements over a shared bottom.
inline PosetPtr wedge() {
    return validate_poset({"bot", "l", "r"}, {{"bot", "l"}, {"bot", "r"}});
}

/// Four-element lattice whose middle pair is incomparable.
inline PosetPtr diamond() {
    return validate_poset({"bot", "x", "y", "top"},
                          {{"bot", "x"}, {"bot", "y"}, {"x", "top"}, {"y", "top"}});
}

// ---- standard arrows ---------------------------------------------------------

/// The two-element antichain embedded as the two legs of the vee.
inline MonotoneMap emb_2_V() {
    PosetPtr A = antichain2();
    PosetPtr V = vee();
    return MonotoneMap(A, V, {0, 1});
}

/// Collapse of the two-element antichain onto the point.
inline MonotoneMap collapse_2_1() { return MonotoneMap(antichain2(), point(), {0, 0}); }

/// The empty map into the point.
inline MonotoneMap emb_0_1() { return MonotoneMap(empty_poset(), point(), {}); }

// ---- enumeration helpers -----------------------------------------------------

/// All labeled posets of size 0..n.
inline std::vector<PosetPtr> posets_up_to(std::size_t n) {
    std::vector<PosetPtr> out;
    for (std::size_t k = 0; k <= n; ++k)
        for (const PosetPtr& p : all_posets_labeled(k)) out.push_back(p);
    return out;
}

/// One representative per isomorphism class, sizes 0..n.
inline std::vector<PosetPtr> reps_up_to(std::size_t n) {
    std::vector<PosetPtr> out;
    for (std::size_t k = 0; k <= n; ++k)
        for (const PosetPtr& p : all_posets_up_to_iso(k)) out.push_back(p);
    return out;
}

// ---- definitional order-theoretic probes ---------------------------------------

/// Probe objects that are complete for the definitional checks below at any
/// size: the point separates values, the 2-chain separates order.
inline std::vector<PosetPtr> standard_probes() {
    return {point(), make_chain(2), antichain2()};
}

/// Definitional order-monomorphism: precomposition with i reflects the
/// pointwise order of maps out of every probe.
inline bool probe_order_mono(const MonotoneMap& i, const std::vector<PosetPtr>& probes) {
    for (const PosetPtr& P : probes) {
        std::vector<MonotoneMap> maps = all_monotone_maps(P, i.dom());
        for (const MonotoneMap& f : maps)
            for (const MonotoneMap& g : maps)
                if (map_leq(compose(i, f), compose(i, g)) && !map_leq(f, g)) return false;
    }
    return true;
}

/// Definitional order-epimorphism: postcomposition with e reflects the
/// pointwise order of maps into every probe.
inline bool probe_order_epi(const MonotoneMap& e, const std::vector<PosetPtr>& probes) {
    for (const PosetPtr& P : probes) {
        std::vector<MonotoneMap> maps = all_monotone_maps(e.cod(), P);
        for (const MonotoneMap& f : maps)
            for (const MonotoneMap& g : maps)
                if (map_leq(compose(f, e), compose(g, e)) && !map_leq(f, g)) return false;
    }
    return true;
}

// ---- brute-force universal-property checks -------------------------------------

/// Every monotone d out of X that respects the forced pairs factors through
/// the quotient projection exactly once, for every listed target.
inline bool quotient_couniversal(const PosetPtr& X,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& forced,
                                 const std::vector<PosetPtr>& targets) {
    QuotientResult q = quotient_by_relations(X, forced);
    for (const PosetPtr& Z : targets) {
        bool ok = true;
        for_each_monotone_map(X, Z, [&](const MonotoneMap& d) {
            for (const auto& [a, b] : forced)
                if (!Z->leq(d.apply(a), d.apply(b))) return true;  // not admissible
            std::size_t hits = 0;
            for_each_monotone_map(q.quotient, Z, [&](const MonotoneMap& e) {
                if (compose(e, q.projection) == d) ++hits;
                return hits < 2;
            });
            if (hits != 1) {
                ok = false;
                return false;
            }
            return true;
        });
        if (!ok) return false;
    }
    return true;
}

/// Every j : Z -> dom(u) with u∘j <= v∘j factors through the inserter arrow
/// exactly once, for every listed source Z.
inline bool inserter_universal(const InserterResult& ins, const MonotoneMap& u,
                               const MonotoneMap& v, const std::vector<PosetPtr>& sources) {
    for (const PosetPtr& Z : sources) {
        bool ok = true;
        for_each_monotone_map(Z, u.dom(), [&](const MonotoneMap& j) {
            if (!map_leq(compose(u, j), compose(v, j))) return true;
            std::size_t hits = 0;
            for_each_monotone_map(Z, ins.object, [&](const MonotoneMap& jp) {
                if (compose(ins.arrow, jp) == j) ++hits;
                return hits < 2;
            });
            if (hits != 1) {
                ok = false;
                return false;
            }
            return true;
        });
        if (!ok) return false;
    }
    return true;
}

/// Every commuting cocone (j1∘f = j2∘h) factors through the square exactly
/// once, for every listed target.
inline bool pushout_universal(const ColimitSquare& sq, const MonotoneMap& f,
                              const MonotoneMap& h, const std::vector<PosetPtr>& targets) {
    for (const PosetPtr& Z : targets) {
        bool ok = true;
        for_each_monotone_map(f.cod(), Z, [&](const MonotoneMap& j1) {
            for_each_monotone_map(h.cod(), Z, [&](const MonotoneMap& j2) {
                if (compose(j1, f) != compose(j2, h)) return true;
                std::size_t hits = 0;
                for_each_monotone_map(sq.apex, Z, [&](const MonotoneMap& m) {
                    if (compose(m, sq.left_leg) == j1 && compose(m, sq.right_leg) == j2) ++hits;
                    return hits < 2;
                });
                if (hits != 1) {
                    ok = false;
                    return false;
                }
                return true;
            });
            return ok;
        });
        if (!ok) return false;
    }
    return true;
}

/// Every lax cocone (j1∘p <= j2∘q) factors through the square exactly once,
/// for every listed target.
inline bool cocomma_couniversal(const ColimitSquare& sq, const MonotoneMap& p,
                                const MonotoneMap& q, const std::vector<PosetPtr>& targets) {
    for (const PosetPtr& Z : targets) {
        bool ok = true;
        for_each_monotone_map(p.cod(), Z, [&](const MonotoneMap& j1) {
            for_each_monotone_map(q.cod(), Z, [&](const MonotoneMap& j2) {
                if (!map_leq(compose(j1, p), compose(j2, q))) return true;
                std::size_t hits = 0;
                for_each_monotone_map(sq.apex, Z, [&](const MonotoneMap& m) {
                    if (compose(m, sq.left_leg) == j1 && compose(m, sq.right_leg) == j2) ++hits;
                    return hits < 2;
                });
                if (hits != 1) {
                    ok = false;
                    return false;
                }
                return true;
            });
            return ok;
        });
        if (!ok) return false;
    }
    return true;
}

/// True when some isomorphism m : P -> Q satisfies m∘u = v. Searches every
/// isomorphism, not just the first one found — automorphisms of P can hide
/// the commuting one.
inline bool isomorphic_under(const PosetPtr& P, const PosetPtr& Q, const MonotoneMap& u,
                             const MonotoneMap& v) {
    bool found = false;
    for_each_monotone_map(P, Q, [&](const MonotoneMap& m) {
        if (is_isomorphism(m) && compose(m, u) == v) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

/// p maps the join of every pair that has one to the join of the images.
inline bool preserves_binary_joins(const MonotoneMap& p) {
    const FinPoset& X = *p.dom();
    const FinPoset& Y = *p.cod();
    for (std::size_t a = 0; a < X.size(); ++a)
        for (std::size_t b = 0; b < X.size(); ++b) {
            const std::size_t pair[2] = {a, b};
            auto jx = join_of(X, pair);
            if (!jx) continue;
            const std::size_t image[2] = {p.apply(a), p.apply(b)};
            auto jy = join_of(Y, image);
            if (!jy || *jy != p.apply(*jx)) return false;
        }
    return true;
}

/// p maps the join of every downset of its domain to the join of the image —
/// the literal reading of "join-preserving" for complete carriers.
inline bool preserves_downset_joins(const MonotoneMap& p) {
    detail::DownsetPoset tx = detail::downset_poset(p.dom());
    for (std::uint64_t mask : tx.masks) {
        auto members = detail::mask_members(mask);
        auto jx = join_of(*p.dom(), members);
        if (!jx) return false;  // caller promises a complete domain
        std::vector<std::size_t> image;
        image.reserve(members.size());
        for (std::size_t m : members) image.push_back(p.apply(m));
        auto jy = join_of(*p.cod(), image);
        if (!jy || *jy != p.apply(*jx)) return false;
    }
    return true;
}

}  // namespace fixtures
