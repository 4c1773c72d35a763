#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poset.hpp"

namespace kaninj {

struct InserterResult {
    PosetPtr object;
    MonotoneMap arrow;  // order-embedding into dom(u)
};

namespace detail {

inline InserterResult subposet(const PosetPtr& X, const std::vector<std::size_t>& keep) {
    const std::size_t m = keep.size();
    std::vector<std::string> names;
    names.reserve(m);
    for (std::size_t i : keep) names.push_back(X->element(i));
    std::vector<std::uint8_t> leq(m * m, 0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) leq[a * m + b] = X->leq(keep[a], keep[b]) ? 1 : 0;
    PosetPtr S = make_poset(std::move(names), std::move(leq));
    MonotoneMap incl(MonotoneMap::unchecked_t{}, S, X, keep);
    return InserterResult{std::move(S), std::move(incl)};
}

}  // namespace detail

/// Inserter of a parallel pair: the subposet {x | u(x) <= v(x)} with its
/// inclusion. Universal among maps j with u∘j <= v∘j.
inline InserterResult inserter(const MonotoneMap& u, const MonotoneMap& v) {
    if (!parallel(u, v)) throw NotParallelError("inserter: maps are not parallel");
    std::vector<std::size_t> keep;
    for (std::size_t x = 0; x < u.dom()->size(); ++x)
        if (u.cod()->leq(u.apply(x), v.apply(x))) keep.push_back(x);
    return detail::subposet(u.dom(), keep);
}

/// Equalizer as the subposet {x | f(x) = g(x)}; elementwise it agrees with
/// the inserter of the swapped pairings into the square (see tests).
inline InserterResult equalizer(const MonotoneMap& f, const MonotoneMap& g) {
    if (!parallel(f, g)) throw NotParallelError("equalizer: maps are not parallel");
    std::vector<std::size_t> keep;
    for (std::size_t x = 0; x < f.dom()->size(); ++x)
        if (f.apply(x) == g.apply(x)) keep.push_back(x);
    return detail::subposet(f.dom(), keep);
}

struct ProductResult {
    PosetPtr object;
    std::vector<MonotoneMap> projections;
    std::vector<PosetPtr> factors;

    /// Row-major tuple index (first factor most significant).
    std::size_t index_of_tuple(std::span<const std::size_t> values) const {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < factors.size(); ++k)
            idx = idx * factors[k]->size() + values[k];
        return idx;
    }
};

/// Cartesian product with componentwise order. Tuple elements are named by
/// joining component names with '_' (empty product: "unit").
inline ProductResult product(std::vector<PosetPtr> factors) {
    std::size_t total = 1;
    for (const auto& f : factors) total *= f->size();

    detail::NameAllocator alloc;
    std::vector<std::string> names;
    names.reserve(total);
    std::vector<std::vector<std::size_t>> tuples;
    tuples.reserve(total);
    std::vector<std::size_t> tup(factors.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t k = factors.size(); k-- > 0;) {
            tup[k] = rem % factors[k]->size();
            rem /= factors[k]->size();
        }
        std::string name;
        for (std::size_t k = 0; k < factors.size(); ++k) {
            if (k) name += "_";
            name += factors[k]->element(tup[k]);
        }
        if (factors.empty()) name = "unit";
        names.push_back(alloc.claim(name));
        tuples.push_back(tup);
    }

    std::vector<std::uint8_t> leq(total * total, 0);
    for (std::size_t a = 0; a < total; ++a)
        for (std::size_t b = 0; b < total; ++b) {
            bool le = true;
            for (std::size_t k = 0; k < factors.size() && le; ++k)
                le = factors[k]->leq(tuples[a][k], tuples[b][k]);
            leq[a * total + b] = le ? 1 : 0;
        }
    PosetPtr P = make_poset(std::move(names), std::move(leq));

    std::vector<MonotoneMap> projections;
    for (std::size_t k = 0; k < factors.size(); ++k) {
        std::vector<std::size_t> pr(total);
        for (std::size_t a = 0; a < total; ++a) pr[a] = tuples[a][k];
        projections.emplace_back(MonotoneMap::unchecked_t{}, P, factors[k], std::move(pr));
    }
    return ProductResult{std::move(P), std::move(projections), std::move(factors)};
}

/// The unique map <legs> : Z -> product with projection_k ∘ <legs> = legs_k.
inline MonotoneMap pairing(const ProductResult& prod, const std::vector<MonotoneMap>& legs) {
    if (legs.size() != prod.factors.size())
        throw DomainMismatchError("pairing: wrong number of legs");
    for (std::size_t k = 0; k < legs.size(); ++k) {
        if (*legs[k].cod() != *prod.factors[k])
            throw DomainMismatchError("pairing: leg codomain mismatch");
        if (k && *legs[k].dom() != *legs[0].dom())
            throw DomainMismatchError("pairing: legs share no domain");
    }
    PosetPtr Z = legs.empty() ? make_antichain(0) : legs[0].dom();
    std::vector<std::size_t> assign(Z->size());
    std::vector<std::size_t> tup(legs.size());
    for (std::size_t z = 0; z < Z->size(); ++z) {
        for (std::size_t k = 0; k < legs.size(); ++k) tup[k] = legs[k].apply(z);
        assign[z] = prod.index_of_tuple(tup);
    }
    return MonotoneMap(MonotoneMap::unchecked_t{}, Z, prod.object, std::move(assign));
}

struct CoproductResult {
    PosetPtr object;
    std::vector<MonotoneMap> injections;
    std::vector<std::size_t> offsets;
};

/// Disjoint union with summand-wise order. Elements keep their names when
/// globally unique; otherwise they get a _k suffix by summand index.
inline CoproductResult coproduct(const std::vector<PosetPtr>& summands) {
    std::size_t total = 0;
    for (const auto& s : summands) total += s->size();

    std::unordered_map<std::string, int> seen;
    for (const auto& s : summands)
        for (const auto& e : s->elements()) seen[e] += 1;

    detail::NameAllocator alloc;
    std::vector<std::string> names;
    names.reserve(total);
    std::vector<std::size_t> offsets;
    for (std::size_t k = 0; k < summands.size(); ++k) {
        offsets.push_back(names.size());
        for (const auto& e : summands[k]->elements())
            names.push_back(alloc.claim(seen[e] > 1 ? e + "_" + std::to_string(k) : e));
    }

    std::vector<std::uint8_t> leq(total * total, 0);
    for (std::size_t i = 0; i < total; ++i) leq[i * total + i] = 1;
    for (std::size_t k = 0; k < summands.size(); ++k) {
        const auto& s = *summands[k];
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = 0; b < s.size(); ++b)
                if (s.leq(a, b)) leq[(offsets[k] + a) * total + (offsets[k] + b)] = 1;
    }
    PosetPtr C = make_poset(std::move(names), std::move(leq));

    std::vector<MonotoneMap> injections;
    for (std::size_t k = 0; k < summands.size(); ++k) {
        std::vector<std::size_t> in(summands[k]->size());
        for (std::size_t a = 0; a < in.size(); ++a) in[a] = offsets[k] + a;
        injections.emplace_back(MonotoneMap::unchecked_t{}, summands[k], C, std::move(in));
    }
    return CoproductResult{std::move(C), std::move(injections), std::move(offsets)};
}

/// The unique map [legs] : coproduct -> Z with [legs] ∘ injection_k = legs_k.
inline MonotoneMap copairing(const CoproductResult& cop, const std::vector<MonotoneMap>& legs) {
    if (legs.size() != cop.injections.size())
        throw DomainMismatchError("copairing: wrong number of legs");
    for (std::size_t k = 0; k < legs.size(); ++k) {
        if (*legs[k].dom() != *cop.injections[k].dom())
            throw DomainMismatchError("copairing: leg domain mismatch");
        if (k && *legs[k].cod() != *legs[0].cod())
            throw DomainMismatchError("copairing: legs share no codomain");
    }
    PosetPtr Z = legs.empty() ? make_antichain(0) : legs[0].cod();
    std::vector<std::size_t> assign(cop.object->size());
    for (std::size_t k = 0; k < legs.size(); ++k)
        for (std::size_t a = 0; a < legs[k].dom()->size(); ++a)
            assign[cop.offsets[k] + a] = legs[k].apply(a);
    // Monotonicity across summands can fail only if Z's order refutes a
    // summand edge, which the leg validation above already rules out.
    return MonotoneMap(cop.object, Z, std::move(assign));
}

/// Coinserter of a parallel pair u, v : X -> Y: the couniversal quotient of Y
/// forcing u(x) <= v(x) for every x. The projection is an order-epi.
inline QuotientResult coinserter(const MonotoneMap& u, const MonotoneMap& v) {
    if (!parallel(u, v)) throw NotParallelError("coinserter: maps are not parallel");
    std::vector<std::pair<std::size_t, std::size_t>> forced;
    for (std::size_t x = 0; x < u.dom()->size(); ++x)
        forced.emplace_back(u.apply(x), v.apply(x));
    return quotient_by_relations(u.cod(), forced);
}

enum class SquareKind { pushout, cocomma };

struct ColimitSquare {
    PosetPtr apex;
    MonotoneMap left_leg;   // from cod(f) — the base side
    MonotoneMap right_leg;  // from cod(h) — the attached side
    SquareKind kind;
};

namespace detail {

/// Renames quotient classes so base elements win: a class containing base
/// members takes its least base name, attached-only classes keep the least
/// attached name. `is_base(i)` classifies carrier indices.
template <class IsBase>
inline QuotientResult rename_base_first(const PosetPtr& carrier, QuotientResult q,
                                        IsBase&& is_base) {
    const std::size_t m = q.quotient->size();
    std::vector<std::string> names(m);
    std::vector<std::vector<std::string>> base_members(m);
    for (std::size_t i = 0; i < carrier->size(); ++i)
        if (is_base(i)) base_members[q.projection.apply(i)].push_back(carrier->element(i));
    for (std::size_t c = 0; c < m; ++c) {
        if (base_members[c].empty())
            names[c] = q.quotient->element(c);
        else
            names[c] = *std::min_element(base_members[c].begin(), base_members[c].end());
    }
    PosetPtr renamed = rename_elements(*q.quotient, std::move(names));
    MonotoneMap proj(MonotoneMap::unchecked_t{}, carrier, renamed, q.projection.assignment());
    return QuotientResult{std::move(renamed), std::move(proj), std::move(q.classes)};
}

}  // namespace detail

/// Pushout of h : A -> A' along f : A -> X. The apex glues A' onto X by
/// identifying f(a) with h(a); X's element names survive into the apex.
inline ColimitSquare pushout(const MonotoneMap& f, const MonotoneMap& h) {
    if (*f.dom() != *h.dom()) throw DomainMismatchError("pushout: maps share no domain");
    const PosetPtr& X = f.cod();
    const PosetPtr& Ap = h.cod();
    const std::size_t nx = X->size(), na = Ap->size(), total = nx + na;

    detail::NameAllocator alloc;
    std::vector<std::string> names;
    names.reserve(total);
    for (const auto& e : X->elements()) {
        alloc.reserve(e);
        names.push_back(e);
    }
    for (const auto& e : Ap->elements()) names.push_back(alloc.claim(e));

    std::vector<std::uint8_t> leq(total * total, 0);
    for (std::size_t i = 0; i < total; ++i) leq[i * total + i] = 1;
    for (std::size_t a = 0; a < nx; ++a)
        for (std::size_t b = 0; b < nx; ++b)
            if (X->leq(a, b)) leq[a * total + b] = 1;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < na; ++b)
            if (Ap->leq(a, b)) leq[(nx + a) * total + (nx + b)] = 1;
    PosetPtr carrier = make_poset(std::move(names), std::move(leq));

    std::vector<std::pair<std::size_t, std::size_t>> forced;
    for (std::size_t a = 0; a < f.dom()->size(); ++a) {
        forced.emplace_back(f.apply(a), nx + h.apply(a));
        forced.emplace_back(nx + h.apply(a), f.apply(a));
    }
    QuotientResult q = detail::rename_base_first(carrier, quotient_by_relations(carrier, forced),
                                                 [nx](std::size_t i) { return i < nx; });

    std::vector<std::size_t> left(nx), right(na);
    for (std::size_t a = 0; a < nx; ++a) left[a] = q.projection.apply(a);
    for (std::size_t a = 0; a < na; ++a) right[a] = q.projection.apply(nx + a);
    return ColimitSquare{q.quotient,
                         MonotoneMap(MonotoneMap::unchecked_t{}, X, q.quotient, std::move(left)),
                         MonotoneMap(MonotoneMap::unchecked_t{}, Ap, q.quotient, std::move(right)),
                         SquareKind::pushout};
}

/// Cocomma object of a span p : D -> A, q : D -> B: the coproduct A + B with
/// p(d) <= q(d) forced, couniversal among squares commuting up to <=.
inline ColimitSquare cocomma(const MonotoneMap& p, const MonotoneMap& q) {
    if (*p.dom() != *q.dom()) throw DomainMismatchError("cocomma: maps share no domain");
    CoproductResult cop = coproduct({p.cod(), q.cod()});
    std::vector<std::pair<std::size_t, std::size_t>> forced;
    for (std::size_t d = 0; d < p.dom()->size(); ++d)
        forced.emplace_back(cop.injections[0].apply(p.apply(d)),
                            cop.injections[1].apply(q.apply(d)));
    QuotientResult quo = quotient_by_relations(cop.object, forced);
    return ColimitSquare{quo.quotient, compose(quo.projection, cop.injections[0]),
                         compose(quo.projection, cop.injections[1]), SquareKind::cocomma};
}

struct WidePushoutResult {
    PosetPtr apex;
    MonotoneMap base_leg;
    std::vector<MonotoneMap> cocone_legs;  // one per input square, from its apex
};

/// Simultaneous wide pushout of squares sharing a base: one quotient of
/// base + Σ leg apexes, never an iterated chain of binary pushouts. Base
/// element names survive; attached elements gain a _L<k> leg suffix.
inline WidePushoutResult wide_pushout(const PosetPtr& base,
                                      std::span<const ColimitSquare> legs) {
    for (const auto& sq : legs)
        if (*sq.left_leg.dom() != *base)
            throw BaseMismatchError("wide_pushout: leg does not start at the base");

    std::size_t total = base->size();
    for (const auto& sq : legs) total += sq.apex->size();

    detail::NameAllocator alloc;
    std::vector<std::string> names;
    names.reserve(total);
    for (const auto& e : base->elements()) {
        alloc.reserve(e);
        names.push_back(e);
    }
    std::vector<std::size_t> offsets;
    for (std::size_t k = 0; k < legs.size(); ++k) {
        offsets.push_back(names.size());
        for (const auto& e : legs[k].apex->elements())
            names.push_back(alloc.claim(e + "_L" + std::to_string(k)));
    }

    std::vector<std::uint8_t> leq(total * total, 0);
    for (std::size_t i = 0; i < total; ++i) leq[i * total + i] = 1;
    for (std::size_t a = 0; a < base->size(); ++a)
        for (std::size_t b = 0; b < base->size(); ++b)
            if (base->leq(a, b)) leq[a * total + b] = 1;
    for (std::size_t k = 0; k < legs.size(); ++k) {
        const auto& C = *legs[k].apex;
        for (std::size_t a = 0; a < C.size(); ++a)
            for (std::size_t b = 0; b < C.size(); ++b)
                if (C.leq(a, b)) leq[(offsets[k] + a) * total + (offsets[k] + b)] = 1;
    }
    PosetPtr carrier = make_poset(std::move(names), std::move(leq));

    std::vector<std::pair<std::size_t, std::size_t>> forced;
    for (std::size_t k = 0; k < legs.size(); ++k)
        for (std::size_t x = 0; x < base->size(); ++x) {
            std::size_t img = offsets[k] + legs[k].left_leg.apply(x);
            forced.emplace_back(x, img);
            forced.emplace_back(img, x);
        }
    const std::size_t nb = base->size();
    QuotientResult q = detail::rename_base_first(carrier, quotient_by_relations(carrier, forced),
                                                 [nb](std::size_t i) { return i < nb; });

    std::vector<std::size_t> bleg(nb);
    for (std::size_t x = 0; x < nb; ++x) bleg[x] = q.projection.apply(x);
    WidePushoutResult out{q.quotient,
                          MonotoneMap(MonotoneMap::unchecked_t{}, base, q.quotient,
                                      std::move(bleg)),
                          {}};
    for (std::size_t k = 0; k < legs.size(); ++k) {
        std::vector<std::size_t> cl(legs[k].apex->size());
        for (std::size_t a = 0; a < cl.size(); ++a) cl[a] = q.projection.apply(offsets[k] + a);
        out.cocone_legs.emplace_back(MonotoneMap::unchecked_t{}, legs[k].apex, q.quotient,
                                     std::move(cl));
    }
    return out;
}

}  // namespace kaninj
