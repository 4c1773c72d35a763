#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kan.hpp"
#include "poset.hpp"

namespace kaninj {

namespace detail {

/// Downsets of P as bitmasks, generated in canonical-extension order and
/// sorted by (size, mask). Throws when P is too large or the count passes
/// `cap` — callers fall back to generating families then.
inline std::vector<std::uint64_t> all_downsets(const FinPoset& P,
                                               std::size_t cap = (1u << 22)) {
    if (P.size() > 63) throw ValidationError("all_downsets: poset too large");
    const auto& order = P.canonical_order();
    std::vector<std::uint64_t> out;
    // DFS over canonical positions; an element may enter only when all its
    // strict predecessors (earlier in the extension) are already in.
    std::vector<std::pair<std::size_t, std::uint64_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [pos, mask] = stack.back();
        stack.pop_back();
        if (pos == order.size()) {
            if (out.size() >= cap) throw BudgetExceededError("all_downsets: cap exceeded");
            out.push_back(mask);
            continue;
        }
        std::size_t e = order[pos];
        bool can_add = true;
        for (std::size_t j = 0; j < P.size() && can_add; ++j)
            if (j != e && P.leq(j, e) && !((mask >> j) & 1)) can_add = false;
        if (can_add) stack.emplace_back(pos + 1, mask | (std::uint64_t(1) << e));
        stack.emplace_back(pos + 1, mask);
    }
    std::sort(out.begin(), out.end(), [](std::uint64_t a, std::uint64_t b) {
        int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
        return pa != pb ? pa < pb : a < b;
    });
    return out;
}

inline std::string downset_name(const FinPoset& base, std::uint64_t mask) {
    if (mask == 0) return "empty";
    std::string name;
    for (std::size_t i = 0; i < base.size(); ++i)
        if ((mask >> i) & 1) {
            if (!name.empty()) name += "_";
            name += base.element(i);
        }
    return name;
}

struct DownsetPoset {
    PosetPtr object;
    std::vector<std::uint64_t> masks;  // aligned with object's elements
    std::unordered_map<std::uint64_t, std::size_t> index;

    std::size_t at(std::uint64_t mask) const { return index.find(mask)->second; }
};

/// All downsets of `base` (optionally without the empty one) under
/// inclusion.
inline DownsetPoset downset_poset(const PosetPtr& base, bool include_empty = true) {
    std::vector<std::uint64_t> masks = all_downsets(*base);
    if (!include_empty) masks.erase(masks.begin());  // sorted: empty is first
    const std::size_t n = masks.size();
    NameAllocator alloc;
    std::vector<std::string> names;
    names.reserve(n);
    for (std::uint64_t m : masks) names.push_back(alloc.claim(downset_name(*base, m)));
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            leq[i * n + j] = (masks[i] & ~masks[j]) == 0 ? 1 : 0;
    DownsetPoset out{make_poset(std::move(names), std::move(leq)), std::move(masks), {}};
    for (std::size_t i = 0; i < out.masks.size(); ++i) out.index.emplace(out.masks[i], i);
    return out;
}

/// Principal downset of element i, as a mask.
inline std::uint64_t principal_mask(const FinPoset& P, std::size_t i) {
    std::uint64_t m = 0;
    for (std::size_t j = 0; j < P.size(); ++j)
        if (P.leq(j, i)) m |= std::uint64_t(1) << j;
    return m;
}

inline std::vector<std::size_t> mask_members(std::uint64_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; mask != 0; ++i, mask >>= 1)
        if (mask & 1) out.push_back(i);
    return out;
}

}  // namespace detail

struct LowersetAlgebra {
    PosetPtr base;
    PosetPtr TX;        // all downsets of base, by inclusion
    MonotoneMap unit;   // x |-> principal downset
    MonotoneMap mult;   // TTX -> TX, union
    /// Downset-join map TX -> base when every downset has a join.
    std::optional<MonotoneMap> algebra;
};

/// The lowerset monad at X: TX with unit and multiplication (and the algebra
/// structure when X has all downset joins).
inline LowersetAlgebra lowerset(const PosetPtr& X) {
    detail::DownsetPoset tx = detail::downset_poset(X);

    std::vector<std::size_t> unit(X->size());
    for (std::size_t x = 0; x < X->size(); ++x)
        unit[x] = tx.at(detail::principal_mask(*X, x));

    detail::DownsetPoset ttx = detail::downset_poset(tx.object);
    std::vector<std::size_t> mult(ttx.object->size());
    for (std::size_t e = 0; e < ttx.masks.size(); ++e) {
        std::uint64_t u = 0;
        for (std::size_t s : detail::mask_members(ttx.masks[e])) u |= tx.masks[s];
        mult[e] = tx.at(u);
    }

    std::optional<MonotoneMap> algebra;
    {
        std::vector<std::size_t> alpha(tx.masks.size());
        bool total = true;
        for (std::size_t s = 0; s < tx.masks.size() && total; ++s) {
            auto members = detail::mask_members(tx.masks[s]);
            auto j = join_of(*X, members);
            if (!j)
                total = false;
            else
                alpha[s] = *j;
        }
        if (total && X->size() > 0)
            algebra = MonotoneMap(tx.object, X, std::move(alpha));
        if (X->size() == 0) algebra = std::nullopt;
    }

    return LowersetAlgebra{X, tx.object,
                           MonotoneMap(MonotoneMap::unchecked_t{}, X, tx.object,
                                       std::move(unit)),
                           MonotoneMap(MonotoneMap::unchecked_t{}, ttx.object, tx.object,
                                       std::move(mult)),
                           std::move(algebra)};
}

/// T f : TX -> TY, D |-> down-closure of f[D].
inline MonotoneMap lowerset_on_map(const MonotoneMap& f) {
    detail::DownsetPoset tx = detail::downset_poset(f.dom());
    detail::DownsetPoset ty = detail::downset_poset(f.cod());
    std::vector<std::size_t> assign(tx.masks.size());
    for (std::size_t s = 0; s < tx.masks.size(); ++s) {
        std::uint64_t u = 0;
        for (std::size_t x : detail::mask_members(tx.masks[s]))
            u |= detail::principal_mask(*f.cod(), f.apply(x));
        assign[s] = ty.at(u);
    }
    return MonotoneMap(MonotoneMap::unchecked_t{}, tx.object, ty.object, std::move(assign));
}

/// Kock-Zöberlein inequality T(η_X) <= η_TX, checked pointwise on TX.
inline bool kz_check(const PosetPtr& X) {
    LowersetAlgebra la = lowerset(X);
    MonotoneMap Teta = lowerset_on_map(la.unit);
    detail::DownsetPoset ttx = detail::downset_poset(la.TX);
    const FinPoset& TTX = *ttx.object;
    for (std::size_t s = 0; s < la.TX->size(); ++s) {
        std::size_t etaTX = ttx.at(detail::principal_mask(*la.TX, s));
        if (!TTX.leq(Teta.apply(s), etaTX)) return false;
    }
    return true;
}

/// Monad laws for the lowerset monad at X. Unit laws are checked elementwise
/// on TX. Associativity is checked elementwise on an exhaustively enumerated
/// TTTX when that is feasible; otherwise on the union-generating family of
/// TTTX (principal downsets of TTX and their binary unions), together with a
/// computational check that both composites preserve those unions — every
/// downset of TTX is a union of principals, so equality on the family forces
/// equality everywhere.
inline bool monad_laws_check(const PosetPtr& X) {
    LowersetAlgebra la = lowerset(X);
    detail::DownsetPoset tx = detail::downset_poset(X);
    detail::DownsetPoset ttx = detail::downset_poset(la.TX);
    const std::size_t ntx = tx.masks.size();
    const std::size_t nttx = ttx.masks.size();

    // mult as mask arithmetic: TTX index -> TX index.
    auto mu = [&](std::size_t e) { return la.mult.apply(e); };

    // Unit laws: μ ∘ η_TX = id = μ ∘ Tη.
    MonotoneMap Teta = lowerset_on_map(la.unit);
    for (std::size_t s = 0; s < ntx; ++s) {
        std::size_t etaTX = ttx.at(detail::principal_mask(*la.TX, s));
        if (mu(etaTX) != s) return false;
        if (mu(Teta.apply(s)) != s) return false;
    }

    // down_tx[i]: principal downset of TX element i, as a TX mask.
    std::vector<std::uint64_t> down_tx(ntx);
    for (std::size_t i = 0; i < ntx; ++i) down_tx[i] = detail::principal_mask(*la.TX, i);

    // A TTTX element is a set of TTX indices. Both associativity sides land
    // in TX.
    auto side_muT = [&](const std::vector<std::size_t>& members) {
        std::uint64_t u = 0;  // union of the member downsets of TX
        for (std::size_t s : members) u |= ttx.masks[s];
        return mu(ttx.at(u));
    };
    auto side_Tmu = [&](const std::vector<std::size_t>& members) {
        std::uint64_t m = 0;  // down-closure in TX of {μ(S) | S in members}
        for (std::size_t s : members) m |= down_tx[mu(s)];
        return mu(ttx.at(m));
    };

    bool full = false;
    if (nttx <= 24) {
        try {
            std::vector<std::uint64_t> tttx = detail::all_downsets(*ttx.object);
            for (std::uint64_t em : tttx) {
                auto members = detail::mask_members(em);
                if (side_muT(members) != side_Tmu(members)) return false;
            }
            full = true;
        } catch (const BudgetExceededError&) {
            full = false;
        }
    }
    if (!full) {
        // Principal downsets of TTX, as member lists. TTX can exceed 64
        // elements, so read them off the order directly instead of masks.
        std::vector<std::vector<std::size_t>> principal(nttx);
        for (std::size_t s = 0; s < nttx; ++s)
            for (std::size_t r = 0; r < nttx; ++r)
                if (ttx.object->leq(r, s)) principal[s].push_back(r);
        auto tx_union = [&](std::size_t a, std::size_t b) {
            return tx.at(tx.masks[a] | tx.masks[b]);
        };
        std::vector<std::size_t> muT_val(nttx), Tmu_val(nttx);
        for (std::size_t s = 0; s < nttx; ++s) {
            muT_val[s] = side_muT(principal[s]);
            Tmu_val[s] = side_Tmu(principal[s]);
            if (muT_val[s] != Tmu_val[s]) return false;
        }
        for (std::size_t a = 0; a < nttx; ++a)
            for (std::size_t b = a + 1; b < nttx; ++b) {
                std::vector<std::size_t> both = principal[a];
                for (std::size_t s : principal[b])
                    if (!ttx.object->leq(s, a)) both.push_back(s);
                std::size_t v1 = side_muT(both), v2 = side_Tmu(both);
                if (v1 != v2) return false;
                // Union preservation of both sides on the generating family.
                if (v1 != tx_union(muT_val[a], muT_val[b])) return false;
                if (v2 != tx_union(Tmu_val[a], Tmu_val[b])) return false;
            }
    }
    return true;
}

struct AlgebraDiagnosis {
    std::optional<MonotoneMap> algebra;  // TX -> X
    /// Name of the first downset (canonical TX order) without a join.
    std::optional<std::string> missing_join;
    /// When the algebra exists: α∘η = id, id <= η∘α, α∘Tα = α∘μ.
    bool laws_ok = false;
};

/// Downset-join algebra for X, with diagnosis. X carries one exactly when
/// every downset (the empty one included) has a join.
inline AlgebraDiagnosis algebra_structure(const PosetPtr& X) {
    detail::DownsetPoset tx = detail::downset_poset(X);
    AlgebraDiagnosis out;
    std::vector<std::size_t> alpha(tx.masks.size());
    for (std::size_t s = 0; s < tx.masks.size(); ++s) {
        auto members = detail::mask_members(tx.masks[s]);
        auto j = join_of(*X, members);
        if (!j) {
            out.missing_join = detail::downset_name(*X, tx.masks[s]);
            return out;
        }
        alpha[s] = *j;
    }
    MonotoneMap a(tx.object, X, std::move(alpha));

    LowersetAlgebra la = lowerset(X);
    bool laws = true;
    for (std::size_t x = 0; x < X->size() && laws; ++x)
        laws = a.apply(la.unit.apply(x)) == x;  // α∘η = id
    for (std::size_t s = 0; s < tx.masks.size() && laws; ++s)
        laws = la.TX->leq(s, la.unit.apply(a.apply(s)));  // id <= η∘α
    if (laws) {
        MonotoneMap Ta = lowerset_on_map(a);  // TTX -> TX
        for (std::size_t e = 0; e < Ta.dom()->size() && laws; ++e)
            laws = a.apply(Ta.apply(e)) == a.apply(la.mult.apply(e));  // α∘Tα = α∘μ
    }
    out.algebra = std::move(a);
    out.laws_ok = laws;
    return out;
}

struct CoprojectionWitness {
    MonotoneMap r;
    MonotoneMap s;
};

/// Split surjection with comparison: r∘s = id on cod(r) and id <= s∘r on
/// dom(r). Kan-injectivity passes from dom(r) to cod(r) along these.
inline bool is_coprojection(const CoprojectionWitness& w) {
    if (*w.s.dom() != *w.r.cod() || *w.s.cod() != *w.r.dom()) return false;
    if (compose(w.r, w.s) != identity(w.r.cod())) return false;
    return map_leq(identity(w.r.dom()), compose(w.s, w.r));
}

/// First section (canonical order) making r a coprojection, if any.
inline std::optional<MonotoneMap> find_section(const MonotoneMap& r) {
    std::optional<MonotoneMap> out;
    for_each_monotone_map(r.cod(), r.dom(), [&](const MonotoneMap& s) {
        if (is_coprojection(CoprojectionWitness{r, s})) {
            out = s;
            return false;
        }
        return true;
    });
    return out;
}

struct ClosureReport {
    bool ok = true;
    std::string counterexample;
    std::size_t coprojections_checked = 0;
    std::size_t squares_checked = 0;
};

/// Closure of LInj(H) under coprojections over a finite universe:
/// (a) if dom(r) is a member then cod(r) is, for every coprojection r
/// between universe posets; (b) in every commuting square g∘r1 = r2∘f with
/// coprojection verticals and f a member morphism, g is one too (capped
/// enumeration).
inline ClosureReport coprojection_closure_check(std::span<const MonotoneMap> H,
                                                std::span<const PosetPtr> universe,
                                                std::size_t square_cap = 512) {
    ClosureReport rep;
    std::vector<std::optional<bool>> member(universe.size());
    auto is_member = [&](std::size_t i) {
        if (!member[i]) member[i] = membership(Subject(universe[i]), H, Side::left).ok;
        return *member[i];
    };

    struct Found {
        MonotoneMap r;
        std::size_t dom_index, cod_index;
    };
    std::vector<Found> coprojections;
    for (std::size_t ci = 0; ci < universe.size(); ++ci)
        for (std::size_t xi = 0; xi < universe.size(); ++xi)
            for_each_monotone_map(universe[ci], universe[xi], [&](const MonotoneMap& r) {
                if (!find_section(r)) return;
                ++rep.coprojections_checked;
                coprojections.push_back(Found{r, ci, xi});
                if (is_member(ci) && !is_member(xi)) {
                    rep.ok = false;
                    rep.counterexample = "membership lost along a coprojection from universe[" +
                                         std::to_string(ci) + "] to universe[" +
                                         std::to_string(xi) + "]";
                }
            });
    if (!rep.ok) return rep;

    for (const Found& a : coprojections) {
        for (const Found& b : coprojections) {
            if (rep.squares_checked >= square_cap) return rep;
            bool square_done = false;
            for_each_monotone_map(universe[a.dom_index], universe[b.dom_index],
                                  [&](const MonotoneMap& f) {
                if (!membership(Subject(f), H, Side::left).ok) return true;
                MonotoneMap rf = compose(b.r, f);
                for_each_monotone_map(universe[a.cod_index], universe[b.cod_index],
                                      [&](const MonotoneMap& g) {
                    if (compose(g, a.r) != rf) return true;
                    ++rep.squares_checked;
                    if (!membership(Subject(g), H, Side::left).ok) {
                        rep.ok = false;
                        rep.counterexample = "square condition failed between universe[" +
                                             std::to_string(a.dom_index) + "] and universe[" +
                                             std::to_string(b.dom_index) + "]";
                        return false;
                    }
                    return rep.squares_checked < square_cap;
                });
                square_done = !rep.ok || rep.squares_checked >= square_cap;
                return !square_done;
            });
            if (!rep.ok) return rep;
        }
    }
    return rep;
}

struct UnitsCrosscheckReport {
    struct Row {
        bool is_algebra = false;
        bool injective_wrt_all_units = false;
        std::optional<std::size_t> defeating_unit;
    };
    std::vector<Row> rows;
    /// Algebras are injective w.r.t. every unit of the family, and each
    /// non-algebra is defeated by at least one. The converse direction is
    /// family-relative: a defeating unit outside the family may exist even
    /// when none is found inside it.
    bool ok = true;
};

/// Crosschecks "X is a lowerset algebra" against "X is left Kan-injective
/// w.r.t. every unit η_Y with Y in the family".
inline UnitsCrosscheckReport units_injectivity_crosscheck(std::span<const PosetPtr> family) {
    std::vector<MonotoneMap> units;
    units.reserve(family.size());
    for (const PosetPtr& Y : family) {
        detail::DownsetPoset ty = detail::downset_poset(Y);
        std::vector<std::size_t> unit(Y->size());
        for (std::size_t y = 0; y < Y->size(); ++y)
            unit[y] = ty.at(detail::principal_mask(*Y, y));
        units.emplace_back(MonotoneMap::unchecked_t{}, Y, ty.object, std::move(unit));
    }

    UnitsCrosscheckReport rep;
    for (const PosetPtr& X : family) {
        UnitsCrosscheckReport::Row row;
        row.is_algebra = algebra_structure(X).algebra.has_value();
        row.injective_wrt_all_units = true;
        for (std::size_t u = 0; u < units.size(); ++u)
            if (!is_left_kan_injective_object(X, units[u]).ok) {
                row.injective_wrt_all_units = false;
                row.defeating_unit = u;
                break;
            }
        rep.ok = rep.ok && (row.is_algebra == row.injective_wrt_all_units);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace kaninj
