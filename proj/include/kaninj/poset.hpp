#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace kaninj {

class FinPoset;
using PosetPtr = std::shared_ptr<const FinPoset>;

/// Finite poset: an ordered list of named elements plus a reflexive,
/// antisymmetric, transitively closed order matrix. Immutable once built;
/// share freely via PosetPtr.
class FinPoset {
public:
    /// `leq` is a row-major n*n matrix that must already be a partial order.
    /// Throws DuplicateElementError / ValidationError / CycleError otherwise.
    FinPoset(std::vector<std::string> elements, std::vector<std::uint8_t> leq)
        : elements_(std::move(elements)), leq_(std::move(leq)) {
        const std::size_t n = elements_.size();
        if (leq_.size() != n * n)
            throw ValidationError("order matrix size does not match element count");
        for (std::size_t i = 0; i < n; ++i) {
            if (elements_[i].empty())
                throw ValidationError("empty element name");
            if (!index_.emplace(elements_[i], i).second)
                throw DuplicateElementError("duplicate element '" + elements_[i] + "'");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!leq_[i * n + i]) throw ValidationError("order not reflexive");
            for (std::size_t j = i + 1; j < n; ++j)
                if (leq_[i * n + j] && leq_[j * n + i])
                    throw CycleError("elements '" + elements_[i] + "' and '" + elements_[j] +
                                     "' are ordered both ways");
        }
        check_transitive();
        build_canonical_order();
    }

    std::size_t size() const { return elements_.size(); }
    const std::vector<std::string>& elements() const { return elements_; }
    const std::string& element(std::size_t i) const { return elements_[i]; }

    bool leq(std::size_t a, std::size_t b) const { return leq_[a * size() + b] != 0; }
    bool lt(std::size_t a, std::size_t b) const { return a != b && leq(a, b); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Index of `name`; throws ValidationError when absent.
    std::size_t at(std::string_view name) const {
        auto i = index_of(name);
        if (!i) throw ValidationError("unknown element '" + std::string(name) + "'");
        return *i;
    }

    /// Canonical linear extension: repeatedly place the lexicographically
    /// least element whose strict predecessors are all placed. Fixes the
    /// deterministic enumeration order used throughout.
    const std::vector<std::size_t>& canonical_order() const { return canonical_order_; }

    const std::vector<std::uint8_t>& matrix() const { return leq_; }

    bool is_discrete() const {
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                if (i != j && leq(i, j)) return false;
        return true;
    }

    friend bool operator==(const FinPoset& a, const FinPoset& b) {
        return a.elements_ == b.elements_ && a.leq_ == b.leq_;
    }
    friend bool operator!=(const FinPoset& a, const FinPoset& b) { return !(a == b); }

private:
    void check_transitive() const;
    void build_canonical_order() {
        const std::size_t n = size();
        std::vector<bool> placed(n, false);
        canonical_order_.reserve(n);
        for (std::size_t step = 0; step < n; ++step) {
            std::optional<std::size_t> pick;
            for (std::size_t i = 0; i < n; ++i) {
                if (placed[i]) continue;
                bool ready = true;
                for (std::size_t j = 0; j < n && ready; ++j)
                    if (!placed[j] && j != i && leq(j, i)) ready = false;
                if (!ready) continue;
                if (!pick || elements_[i] < elements_[*pick]) pick = i;
            }
            placed[*pick] = true;
            canonical_order_.push_back(*pick);
        }
    }

    std::vector<std::string> elements_;
    std::vector<std::uint8_t> leq_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> canonical_order_;
};

namespace detail {

// Bit-packed Warshall closure: O(n^2 * n/64).
inline void transitive_closure(std::vector<std::uint8_t>& rel, std::size_t n) {
    if (n == 0) return;
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> rows(n * words, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (rel[i * n + j]) rows[i * words + j / 64] |= std::uint64_t(1) << (j % 64);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if ((rows[i * words + k / 64] >> (k % 64)) & 1)
                for (std::size_t w = 0; w < words; ++w)
                    rows[i * words + w] |= rows[k * words + w];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            rel[i * n + j] = ((rows[i * words + j / 64] >> (j % 64)) & 1) ? 1 : 0;
}

inline bool legal_name_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline std::string sanitize_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) out.push_back(legal_name_char(c) ? c : '_');
    if (out.empty()) out = "e";
    return out;
}

/// Deterministic fresh-name source for constructed posets; every claimed
/// name matches [A-Za-z0-9_]+ and is unique within the allocator.
class NameAllocator {
public:
    void reserve(std::string_view name) { used_.insert(std::string(name)); }

    std::string claim(std::string_view desired) {
        std::string base = sanitize_name(desired);
        std::string candidate = base;
        for (int k = 2; !used_.insert(candidate).second; ++k)
            candidate = base + "_" + std::to_string(k);
        return candidate;
    }

private:
    std::unordered_set<std::string> used_;
};

}  // namespace detail

inline void FinPoset::check_transitive() const {
    std::vector<std::uint8_t> closed = leq_;
    detail::transitive_closure(closed, size());
    if (closed != leq_) throw ValidationError("order not transitive");
}

/// Builds a poset from element names and covering pairs a<b; the relation is
/// closed transitively. Throws DuplicateElementError on repeated names and
/// CycleError when the closure breaks antisymmetry.
inline PosetPtr validate_poset(std::vector<std::string> elements,
                               const std::vector<std::pair<std::string, std::string>>& order) {
    const std::size_t n = elements.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        if (elements[i].empty()) throw ValidationError("empty element name");
        for (char c : elements[i])
            if (!detail::legal_name_char(c))
                throw ValidationError("illegal element name '" + elements[i] + "'");
        if (!index.emplace(elements[i], i).second)
            throw DuplicateElementError("duplicate element '" + elements[i] + "'");
    }
    std::vector<std::uint8_t> rel(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) rel[i * n + i] = 1;
    for (const auto& [a, b] : order) {
        auto ia = index.find(a);
        if (ia == index.end()) throw ValidationError("unknown element '" + a + "' in order");
        auto ib = index.find(b);
        if (ib == index.end()) throw ValidationError("unknown element '" + b + "' in order");
        rel[ia->second * n + ib->second] = 1;
    }
    detail::transitive_closure(rel, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rel[i * n + j] && rel[j * n + i])
                throw CycleError("order cycle through '" + elements[i] + "' and '" + elements[j] +
                                 "'");
    return std::make_shared<FinPoset>(std::move(elements), std::move(rel));
}

inline PosetPtr make_poset(std::vector<std::string> elements, std::vector<std::uint8_t> leq) {
    return std::make_shared<FinPoset>(std::move(elements), std::move(leq));
}

inline PosetPtr make_chain(std::size_t n, const std::string& prefix = "c") {
    std::vector<std::string> names;
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(prefix + std::to_string(i));
        for (std::size_t j = i; j < n; ++j) leq[i * n + j] = 1;
    }
    return make_poset(std::move(names), std::move(leq));
}

inline PosetPtr make_antichain(std::size_t n, const std::string& prefix = "a") {
    std::vector<std::string> names;
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(prefix + std::to_string(i));
        leq[i * n + i] = 1;
    }
    return make_poset(std::move(names), std::move(leq));
}

/// Same order, new element names (position-wise).
inline PosetPtr rename_elements(const FinPoset& p, std::vector<std::string> names) {
    if (names.size() != p.size()) throw ValidationError("rename: wrong name count");
    return make_poset(std::move(names), p.matrix());
}

/// Monotone map between two shared posets; the assignment is by element
/// index. Values are immutable.
class MonotoneMap {
public:
    struct unchecked_t {};

    MonotoneMap(PosetPtr dom, PosetPtr cod, std::vector<std::size_t> assignment)
        : dom_(std::move(dom)), cod_(std::move(cod)), map_(std::move(assignment)) {
        if (!dom_ || !cod_) throw ValidationError("map endpoints must be non-null");
        if (map_.size() != dom_->size()) throw ValidationError("assignment size mismatch");
        for (std::size_t v : map_)
            if (v >= cod_->size()) throw ValidationError("assignment value out of range");
        for (std::size_t a = 0; a < dom_->size(); ++a)
            for (std::size_t b = 0; b < dom_->size(); ++b)
                if (dom_->leq(a, b) && !cod_->leq(map_[a], map_[b]))
                    throw ValidationError("assignment is not monotone: " + dom_->element(a) +
                                          " <= " + dom_->element(b) + " but images are not");
    }

    // Trusted constructor for enumeration and composition hot paths.
    MonotoneMap(unchecked_t, PosetPtr dom, PosetPtr cod, std::vector<std::size_t> assignment)
        : dom_(std::move(dom)), cod_(std::move(cod)), map_(std::move(assignment)) {}

    const PosetPtr& dom() const { return dom_; }
    const PosetPtr& cod() const { return cod_; }
    std::size_t apply(std::size_t i) const { return map_[i]; }
    const std::string& apply_name(std::string_view name) const {
        return cod_->element(map_[dom_->at(name)]);
    }
    const std::vector<std::size_t>& assignment() const { return map_; }

    friend bool operator==(const MonotoneMap& f, const MonotoneMap& g) {
        return *f.dom_ == *g.dom_ && *f.cod_ == *g.cod_ && f.map_ == g.map_;
    }
    friend bool operator!=(const MonotoneMap& f, const MonotoneMap& g) { return !(f == g); }

private:
    PosetPtr dom_;
    PosetPtr cod_;
    std::vector<std::size_t> map_;
};

inline MonotoneMap identity(PosetPtr p) {
    std::vector<std::size_t> id(p->size());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
    PosetPtr q = p;  // two handles: argument evaluation order must not matter
    return MonotoneMap(MonotoneMap::unchecked_t{}, std::move(q), std::move(p), std::move(id));
}

/// g after f. Throws DomainMismatchError unless cod(f) = dom(g).
inline MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f) {
    if (*f.cod() != *g.dom()) throw DomainMismatchError("compose: cod(f) differs from dom(g)");
    std::vector<std::size_t> h(f.dom()->size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = g.apply(f.apply(i));
    return MonotoneMap(MonotoneMap::unchecked_t{}, f.dom(), g.cod(), std::move(h));
}

inline bool parallel(const MonotoneMap& f, const MonotoneMap& g) {
    return *f.dom() == *g.dom() && *f.cod() == *g.cod();
}

/// Pointwise hom-order f <= g; requires parallel maps.
inline bool map_leq(const MonotoneMap& f, const MonotoneMap& g) {
    if (!parallel(f, g)) throw NotParallelError("map_leq: maps are not parallel");
    for (std::size_t i = 0; i < f.dom()->size(); ++i)
        if (!f.cod()->leq(f.apply(i), g.apply(i))) return false;
    return true;
}

enum class MapOrder { equal, less, greater, incomparable };

inline MapOrder compare_maps(const MonotoneMap& f, const MonotoneMap& g) {
    if (!parallel(f, g)) throw NotParallelError("compare_maps: maps are not parallel");
    bool le = true, ge = true;
    for (std::size_t i = 0; i < f.dom()->size(); ++i) {
        le = le && f.cod()->leq(f.apply(i), g.apply(i));
        ge = ge && f.cod()->leq(g.apply(i), f.apply(i));
    }
    if (le && ge) return MapOrder::equal;
    if (le) return MapOrder::less;
    if (ge) return MapOrder::greater;
    return MapOrder::incomparable;
}

struct MorphismFlags {
    bool mono = false;
    bool epi = false;
    bool order_mono = false;
    bool order_epi = false;
    bool surjective = false;
    bool embedding = false;
};

/// In Pos the six flags collapse to two independent facts: order-reflection
/// (= order-mono = strong mono = embedding) and surjectivity (= epi =
/// order-epi). classify computes those two directly.
inline MorphismFlags classify_morphism(const MonotoneMap& f) {
    const FinPoset& A = *f.dom();
    const FinPoset& X = *f.cod();
    bool injective = true;
    for (std::size_t a = 0; a < A.size() && injective; ++a)
        for (std::size_t b = a + 1; b < A.size() && injective; ++b)
            if (f.apply(a) == f.apply(b)) injective = false;
    bool reflects = true;
    for (std::size_t a = 0; a < A.size() && reflects; ++a)
        for (std::size_t b = 0; b < A.size() && reflects; ++b)
            if (X.leq(f.apply(a), f.apply(b)) && !A.leq(a, b)) reflects = false;
    std::vector<bool> hit(X.size(), false);
    for (std::size_t a = 0; a < A.size(); ++a) hit[f.apply(a)] = true;
    bool surjective = std::all_of(hit.begin(), hit.end(), [](bool h) { return h; });

    MorphismFlags flags;
    flags.mono = injective;
    flags.embedding = reflects;  // reflection forces injectivity via antisymmetry
    flags.order_mono = reflects;
    flags.surjective = surjective;
    flags.epi = surjective;
    flags.order_epi = surjective;
    return flags;
}

inline bool is_isomorphism(const MonotoneMap& f) {
    auto flags = classify_morphism(f);
    return flags.embedding && flags.surjective;
}

/// Inverse of an isomorphism. Throws ValidationError if f is not one.
inline MonotoneMap inverse(const MonotoneMap& f) {
    if (!is_isomorphism(f)) throw ValidationError("inverse: map is not an isomorphism");
    std::vector<std::size_t> inv(f.cod()->size());
    for (std::size_t i = 0; i < f.dom()->size(); ++i) inv[f.apply(i)] = i;
    return MonotoneMap(MonotoneMap::unchecked_t{}, f.cod(), f.dom(), std::move(inv));
}

inline PosetPtr dualize(const FinPoset& p) {
    const std::size_t n = p.size();
    std::vector<std::uint8_t> op(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) op[i * n + j] = p.leq(j, i) ? 1 : 0;
    return make_poset(p.elements(), std::move(op));
}

inline PosetPtr dualize(const PosetPtr& p) { return dualize(*p); }

inline MonotoneMap dualize(const MonotoneMap& f) {
    return MonotoneMap(MonotoneMap::unchecked_t{}, dualize(f.dom()), dualize(f.cod()),
                       f.assignment());
}

struct QuotientResult {
    PosetPtr quotient;
    MonotoneMap projection;
    /// Element names collapsed into each quotient element, aligned with the
    /// quotient's element order.
    std::vector<std::vector<std::string>> classes;
};

/// Smallest poset quotient of X whose order contains the forced pairs:
/// closes order ∪ forced transitively, collapses the resulting order-cycles,
/// and names each class by its lexicographically least member. The
/// projection is couniversal among maps satisfying the forced inequalities.
inline QuotientResult quotient_by_relations(
    const PosetPtr& X, const std::vector<std::pair<std::size_t, std::size_t>>& forced) {
    const std::size_t n = X->size();
    std::vector<std::uint8_t> rel = X->matrix();
    for (const auto& [a, b] : forced) {
        if (a >= n || b >= n) throw ValidationError("forced pair out of range");
        rel[a * n + b] = 1;
    }
    detail::transitive_closure(rel, n);

    std::vector<std::size_t> cls(n, SIZE_MAX);
    std::vector<std::size_t> reps;  // min-index member per class, in first-seen order
    for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] != SIZE_MAX) continue;
        cls[i] = reps.size();
        reps.push_back(i);
        for (std::size_t j = i + 1; j < n; ++j)
            if (rel[i * n + j] && rel[j * n + i]) cls[j] = cls[i];
    }

    const std::size_t m = reps.size();
    std::vector<std::vector<std::string>> classes(m);
    std::vector<std::string> names(m);
    for (std::size_t i = 0; i < n; ++i) classes[cls[i]].push_back(X->element(i));
    for (std::size_t c = 0; c < m; ++c)
        names[c] = *std::min_element(classes[c].begin(), classes[c].end());

    std::vector<std::uint8_t> qle(m * m, 0);
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t d = 0; d < m; ++d) qle[c * m + d] = rel[reps[c] * n + reps[d]];

    PosetPtr Q = make_poset(std::move(names), std::move(qle));
    MonotoneMap proj(MonotoneMap::unchecked_t{}, X, Q, std::move(cls));
    return QuotientResult{std::move(Q), std::move(proj), std::move(classes)};
}

inline QuotientResult quotient_by_relations(
    const PosetPtr& X, const std::vector<std::pair<std::string, std::string>>& forced) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(forced.size());
    for (const auto& [a, b] : forced) pairs.emplace_back(X->at(a), X->at(b));
    return quotient_by_relations(X, pairs);
}

namespace detail {

template <class F>
bool monotone_map_rec(const PosetPtr& dom, const PosetPtr& cod,
                      const std::vector<std::size_t>& order,
                      const std::vector<std::vector<std::size_t>>& below, std::size_t pos,
                      std::vector<std::size_t>& assign, F&& visit) {
    if (pos == order.size()) {
        if constexpr (std::is_void_v<decltype(visit(
                          std::declval<const MonotoneMap&>()))>) {
            visit(MonotoneMap(MonotoneMap::unchecked_t{}, dom, cod, assign));
            return true;
        } else {
            return visit(MonotoneMap(MonotoneMap::unchecked_t{}, dom, cod, assign));
        }
    }
    const std::size_t e = order[pos];
    for (std::size_t v = 0; v < cod->size(); ++v) {
        bool ok = true;
        for (std::size_t q : below[pos])
            if (!cod->leq(assign[q], v)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        assign[e] = v;
        if (!monotone_map_rec(dom, cod, order, below, pos + 1, assign, visit)) return false;
    }
    return true;
}

}  // namespace detail

/// Enumerates every monotone map dom -> cod exactly once, lexicographically
/// over the canonical linear extension of dom (codomain values in element
/// order). The visitor may return bool; returning false stops early.
template <class F>
void for_each_monotone_map(const PosetPtr& dom, const PosetPtr& cod, F&& visit) {
    const auto& order = dom->canonical_order();
    if (dom->size() == 0) {
        if constexpr (std::is_void_v<decltype(visit(std::declval<const MonotoneMap&>()))>) {
            visit(MonotoneMap(MonotoneMap::unchecked_t{}, dom, cod, {}));
        } else {
            visit(MonotoneMap(MonotoneMap::unchecked_t{}, dom, cod, {}));
        }
        return;
    }
    if (cod->size() == 0) return;
    // below[p]: earlier positions whose element sits under order[p] in dom.
    std::vector<std::vector<std::size_t>> below(order.size());
    for (std::size_t p = 0; p < order.size(); ++p)
        for (std::size_t q = 0; q < p; ++q)
            if (dom->leq(order[q], order[p])) below[p].push_back(order[q]);
    std::vector<std::size_t> assign(dom->size(), 0);
    detail::monotone_map_rec(dom, cod, order, below, 0, assign, visit);
}

inline std::vector<MonotoneMap> all_monotone_maps(const PosetPtr& dom, const PosetPtr& cod) {
    std::vector<MonotoneMap> out;
    for_each_monotone_map(dom, cod, [&](const MonotoneMap& f) { out.push_back(f); });
    return out;
}

inline std::size_t count_monotone_maps(const PosetPtr& dom, const PosetPtr& cod) {
    std::size_t n = 0;
    for_each_monotone_map(dom, cod, [&](const MonotoneMap&) { ++n; });
    return n;
}

struct HomPoset {
    PosetPtr object;
    /// The monotone maps P -> X, aligned with object's element order.
    std::vector<MonotoneMap> points;
};

/// Cotensor P -|> X: all monotone maps P -> X under the pointwise order.
/// Elements are named f0, f1, ... in enumeration order.
inline HomPoset hom_poset(const PosetPtr& P, const PosetPtr& X) {
    std::vector<MonotoneMap> maps = all_monotone_maps(P, X);
    const std::size_t n = maps.size();
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) names[i] = "f" + std::to_string(i);
    std::vector<std::uint8_t> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            bool le = true;
            for (std::size_t e = 0; e < P->size() && le; ++e)
                le = X->leq(maps[i].apply(e), maps[j].apply(e));
            leq[i * n + j] = le ? 1 : 0;
        }
    return HomPoset{make_poset(std::move(names), std::move(leq)), std::move(maps)};
}

/// Least upper bound of a subset (empty set -> bottom), if it exists.
inline std::optional<std::size_t> join_of(const FinPoset& X,
                                          std::span<const std::size_t> subset) {
    std::vector<std::size_t> ubs;
    for (std::size_t u = 0; u < X.size(); ++u) {
        bool ub = true;
        for (std::size_t s : subset)
            if (!X.leq(s, u)) {
                ub = false;
                break;
            }
        if (ub) ubs.push_back(u);
    }
    for (std::size_t u0 : ubs) {
        bool least = true;
        for (std::size_t u : ubs)
            if (!X.leq(u0, u)) {
                least = false;
                break;
            }
        if (least) return u0;
    }
    return std::nullopt;
}

inline std::optional<std::size_t> bottom_of(const FinPoset& X) {
    return join_of(X, std::span<const std::size_t>{});
}

}  // namespace kaninj
