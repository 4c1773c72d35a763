#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "poset.hpp"

namespace kaninj {

struct ExtensionVerdict {
    enum class Status {
        found,         // least (resp. greatest) extension exists
        no_candidate,  // no monotone g with f <= g∘h at all
        no_least       // candidates exist but have no minimum
    };
    Status status = Status::no_candidate;
    std::optional<MonotoneMap> extension;
    bool strict = false;  // extension∘h = f on the nose
    bool exists() const { return status == Status::found; }
};

namespace detail {

inline bool pointwise_leq(const MonotoneMap& f, const MonotoneMap& g) {
    const FinPoset& X = *f.cod();
    for (std::size_t i = 0; i < f.dom()->size(); ++i)
        if (!X.leq(f.apply(i), g.apply(i))) return false;
    return true;
}

}  // namespace detail

/// Least monotone g : cod(h) -> cod(f) with f <= g∘h, found by search over
/// all candidates. Distinguishes an empty candidate set from a candidate set
/// without a minimum; `strict` records whether g∘h = f exactly.
inline ExtensionVerdict least_extension(const MonotoneMap& h, const MonotoneMap& f) {
    if (*h.dom() != *f.dom())
        throw DomainMismatchError("least_extension: h and f share no domain");
    const PosetPtr& Ap = h.cod();
    const PosetPtr& X = f.cod();
    const std::size_t na = h.dom()->size();

    auto candidate = [&](const MonotoneMap& g) {
        for (std::size_t a = 0; a < na; ++a)
            if (!X->leq(f.apply(a), g.apply(h.apply(a)))) return false;
        return true;
    };

    // Pass 1: keep the running minimal candidate. If a least candidate
    // exists it displaces every holder it meets, so it ends up held.
    std::optional<MonotoneMap> best;
    for_each_monotone_map(Ap, X, [&](const MonotoneMap& g) {
        if (!candidate(g)) return;
        if (!best || detail::pointwise_leq(g, *best)) best = g;
    });
    if (!best) return ExtensionVerdict{ExtensionVerdict::Status::no_candidate, std::nullopt,
                                       false};

    // Pass 2: confirm global minimality.
    bool least = true;
    for_each_monotone_map(Ap, X, [&](const MonotoneMap& g) {
        if (candidate(g) && !detail::pointwise_leq(*best, g)) {
            least = false;
            return false;
        }
        return true;
    });
    if (!least)
        return ExtensionVerdict{ExtensionVerdict::Status::no_least, std::nullopt, false};

    bool strict = compose(*best, h) == f;
    return ExtensionVerdict{ExtensionVerdict::Status::found, std::move(best), strict};
}

/// Greatest g with g∘h <= f, obtained by dualizing and reusing
/// least_extension — the only right-side code path.
inline ExtensionVerdict greatest_extension(const MonotoneMap& h, const MonotoneMap& f) {
    ExtensionVerdict dual = least_extension(dualize(h), dualize(f));
    if (dual.extension) dual.extension = dualize(*dual.extension);
    return dual;
}

/// Pointwise-join formula b |-> join{ f(a) | h(a) <= b }; defined only when
/// every required join exists, in which case it equals the least extension.
inline std::optional<MonotoneMap> pointwise_join_extension(const MonotoneMap& h,
                                                           const MonotoneMap& f) {
    if (*h.dom() != *f.dom())
        throw DomainMismatchError("pointwise_join_extension: h and f share no domain");
    const PosetPtr& Ap = h.cod();
    const PosetPtr& X = f.cod();
    std::vector<std::size_t> assign(Ap->size());
    for (std::size_t b = 0; b < Ap->size(); ++b) {
        std::vector<std::size_t> below;
        for (std::size_t a = 0; a < h.dom()->size(); ++a)
            if (Ap->leq(h.apply(a), b)) below.push_back(f.apply(a));
        auto j = join_of(*X, below);
        if (!j) return std::nullopt;
        assign[b] = *j;
    }
    return MonotoneMap(Ap, X, std::move(assign));
}

struct ObjectCheck {
    bool ok = true;
    /// First violating f : dom(h) -> subject, in canonical enumeration order.
    std::optional<MonotoneMap> counterexample;
};

/// X admits a least extension along h for every f, and each is strict.
inline ObjectCheck is_left_kan_injective_object(const PosetPtr& X, const MonotoneMap& h) {
    ObjectCheck out;
    for_each_monotone_map(h.dom(), X, [&](const MonotoneMap& f) {
        ExtensionVerdict v = least_extension(h, f);
        if (!v.exists() || !v.strict) {
            out.ok = false;
            out.counterexample = f;
            return false;
        }
        return true;
    });
    return out;
}

/// Existence half only: least extensions exist, strictness not required.
inline ObjectCheck is_weakly_left_kan_injective_object(const PosetPtr& X,
                                                       const MonotoneMap& h) {
    ObjectCheck out;
    for_each_monotone_map(h.dom(), X, [&](const MonotoneMap& f) {
        if (!least_extension(h, f).exists()) {
            out.ok = false;
            out.counterexample = f;
            return false;
        }
        return true;
    });
    return out;
}

namespace detail {

template <bool Weak>
ObjectCheck kan_injective_morphism(const MonotoneMap& p, const MonotoneMap& h) {
    auto object_ok = [&](const PosetPtr& X) {
        return Weak ? is_weakly_left_kan_injective_object(X, h)
                    : is_left_kan_injective_object(X, h);
    };
    ObjectCheck domc = object_ok(p.dom());
    if (!domc.ok) return domc;
    ObjectCheck codc = object_ok(p.cod());
    if (!codc.ok) return codc;

    // p preserves least extensions: both sides recomputed independently.
    ObjectCheck out;
    for_each_monotone_map(h.dom(), p.dom(), [&](const MonotoneMap& f) {
        ExtensionVerdict lf = least_extension(h, f);
        ExtensionVerdict lpf = least_extension(h, compose(p, f));
        if (compose(p, *lf.extension) != *lpf.extension) {
            out.ok = false;
            out.counterexample = f;
            return false;
        }
        return true;
    });
    return out;
}

}  // namespace detail

inline ObjectCheck is_left_kan_injective_morphism(const MonotoneMap& p, const MonotoneMap& h) {
    return detail::kan_injective_morphism<false>(p, h);
}

inline ObjectCheck is_weakly_left_kan_injective_morphism(const MonotoneMap& p,
                                                         const MonotoneMap& h) {
    return detail::kan_injective_morphism<true>(p, h);
}

/// Subject of a membership query: a poset or a monotone map.
using Subject = std::variant<PosetPtr, MonotoneMap>;

inline ObjectCheck is_weakly_left_kan_injective(const Subject& s, const MonotoneMap& h) {
    if (std::holds_alternative<PosetPtr>(s))
        return is_weakly_left_kan_injective_object(std::get<PosetPtr>(s), h);
    return is_weakly_left_kan_injective_morphism(std::get<MonotoneMap>(s), h);
}

/// Unique-filler orthogonality: every f : dom(h) -> X has exactly one
/// g with g∘h = f.
inline ObjectCheck is_orthogonal(const PosetPtr& X, const MonotoneMap& h) {
    ObjectCheck out;
    for_each_monotone_map(h.dom(), X, [&](const MonotoneMap& f) {
        std::size_t fillers = 0;
        for_each_monotone_map(h.cod(), X, [&](const MonotoneMap& g) {
            if (compose(g, h) == f) ++fillers;
            return fillers < 2;
        });
        if (fillers != 1) {
            out.ok = false;
            out.counterexample = f;
            return false;
        }
        return true;
    });
    return out;
}

enum class Side { left, right, weak_left };

struct HVerdict {
    std::size_t h_index = 0;
    bool ok = true;
    /// For Side::right the witness lives in the dualized world.
    std::optional<MonotoneMap> counterexample;
};

struct InjectivityReport {
    Side side = Side::left;
    bool ok = true;
    std::vector<HVerdict> per_h;
};

/// Membership of a poset or map in the (weak/right) Kan-injectivity class of
/// a finite family H. Right-side queries dualize the subject and H and reuse
/// the left-side path wholesale.
inline InjectivityReport membership(const Subject& subject, std::span<const MonotoneMap> H,
                                    Side side) {
    if (side == Side::right) {
        Subject d = std::holds_alternative<PosetPtr>(subject)
                        ? Subject(dualize(std::get<PosetPtr>(subject)))
                        : Subject(dualize(std::get<MonotoneMap>(subject)));
        std::vector<MonotoneMap> Hd;
        Hd.reserve(H.size());
        for (const auto& h : H) Hd.push_back(dualize(h));
        InjectivityReport rep = membership(d, Hd, Side::left);
        rep.side = Side::right;
        return rep;
    }

    InjectivityReport rep;
    rep.side = side;
    for (std::size_t i = 0; i < H.size(); ++i) {
        ObjectCheck c;
        if (side == Side::weak_left) {
            c = is_weakly_left_kan_injective(subject, H[i]);
        } else if (std::holds_alternative<PosetPtr>(subject)) {
            c = is_left_kan_injective_object(std::get<PosetPtr>(subject), H[i]);
        } else {
            c = is_left_kan_injective_morphism(std::get<MonotoneMap>(subject), H[i]);
        }
        rep.per_h.push_back(HVerdict{i, c.ok, std::move(c.counterexample)});
        rep.ok = rep.ok && c.ok;
    }
    return rep;
}

}  // namespace kaninj
