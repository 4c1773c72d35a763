#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "constructions.hpp"
#include "kan.hpp"
#include "poset.hpp"
#include "workspace.hpp"

namespace kaninj {

enum class ChainMode { strong, weak };

struct ReflectionOptions {
    /// Highest stage index the chain may build. Even, >= 2.
    std::size_t budget = 32;
    /// Largest stage carrier tolerated before aborting.
    std::size_t stage_limit = 64;
    ChainMode mode = ChainMode::strong;
};

/// One span handled at an even stage: f : dom(h) -> X_j with its approximant
/// f//h : cod(h) -> X_{j+1}. Entries are never retired; every later odd step
/// re-scans all of them.
struct RegistryEntry {
    std::size_t h_index;
    MonotoneMap f;
    std::size_t stage;  // even stage the span was collected at
    MonotoneMap approximant;
};

struct ReflectionTrace {
    std::vector<MonotoneMap> H;
    std::vector<PosetPtr> stages;
    std::vector<MonotoneMap> steps;  // steps[i] : X_i -> X_{i+1}
    std::vector<RegistryEntry> registry;
    std::optional<std::size_t> converged_at;
    ReflectionOptions options;

    std::size_t top() const { return stages.size() - 1; }

    /// x_{i,j} by composing the recorded steps; x_{i,i} = id.
    MonotoneMap connecting(std::size_t i, std::size_t j) const {
        if (i > j || j > top()) throw ValidationError("connecting: bad stage indices");
        MonotoneMap x = identity(stages[i]);
        for (std::size_t s = i; s < j; ++s) x = compose(steps[s], x);
        return x;
    }
};

/// Even step X_i -> X_{i+1}: one pushout (cocomma in weak mode) per span
/// (h in H, f : dom(h) -> X_i), glued by a single simultaneous wide pushout.
/// Every span is recorded in the registry with its approximant.
inline void even_step(ReflectionTrace& trace) {
    const std::size_t i = trace.top();
    if (i % 2 != 0) throw ValidationError("even_step: top stage index is odd");
    if (i + 1 > trace.options.budget)
        throw BudgetExceededError("stage budget " + std::to_string(trace.options.budget) +
                                  " reached before convergence");
    const PosetPtr& Xi = trace.stages[i];

    std::vector<ColimitSquare> squares;
    std::vector<std::pair<std::size_t, MonotoneMap>> spans;
    for (std::size_t hi = 0; hi < trace.H.size(); ++hi) {
        const MonotoneMap& h = trace.H[hi];
        for_each_monotone_map(h.dom(), Xi, [&](const MonotoneMap& f) {
            squares.push_back(trace.options.mode == ChainMode::strong ? pushout(f, h)
                                                                      : cocomma(f, h));
            spans.emplace_back(hi, f);
        });
    }

    WidePushoutResult wp = wide_pushout(Xi, squares);
    if (wp.apex->size() > trace.options.stage_limit)
        throw BudgetExceededError("stage size guard: stage " + std::to_string(i + 1) +
                                  " would have " + std::to_string(wp.apex->size()) +
                                  " elements (limit " +
                                  std::to_string(trace.options.stage_limit) + ")");

    for (std::size_t k = 0; k < squares.size(); ++k) {
        MonotoneMap approx = compose(wp.cocone_legs[k], squares[k].right_leg);
        const MonotoneMap& h = trace.H[spans[k].first];
        MonotoneMap via_base = compose(wp.base_leg, spans[k].second);
        // Registry invariant: approximant∘h equals (strong) or dominates
        // (weak) the base path of the span.
        if (trace.options.mode == ChainMode::strong) {
            if (compose(approx, h) != via_base)
                throw std::logic_error("even_step: approximant square does not commute");
        } else {
            if (!map_leq(via_base, compose(approx, h)))
                throw std::logic_error("even_step: approximant square is not lax");
        }
        trace.registry.push_back(
            RegistryEntry{spans[k].first, spans[k].second, i, std::move(approx)});
    }
    trace.stages.push_back(wp.apex);
    trace.steps.push_back(wp.base_leg);
}

/// Odd step X_{i+1} -> X_{i+2}: for every registry entry and every
/// competitor g with x_{j,i+1}∘f <= g∘h, force the approximant below g; all
/// forcings land in one quotient. Quotienting can merge elements whose
/// images previously separated a competitor, so the scan repeats on each
/// quotient until no missing inequality is forced — one stage absorbs the
/// whole cascade instead of leaking it to the next round. Verifies the
/// merge equality for entries that reappear at later stages.
inline void odd_step(ReflectionTrace& trace) {
    const std::size_t t = trace.top();
    if (t % 2 != 1) throw ValidationError("odd_step: top stage index is even");
    if (t + 1 > trace.options.budget)
        throw BudgetExceededError("stage budget " + std::to_string(trace.options.budget) +
                                  " reached before convergence");

    struct Prepared {
        MonotoneMap base;   // x_{j,i+1} ∘ f        : dom(h) -> X_{i+1}
        MonotoneMap approx; // x_{j+1,i+1} ∘ (f//h) : cod(h) -> X_{i+1}
    };
    std::vector<std::vector<Prepared>> at_top(trace.H.size());
    for (const RegistryEntry& e : trace.registry)
        at_top[e.h_index].push_back(Prepared{compose(trace.connecting(e.stage, t), e.f),
                                             compose(trace.connecting(e.stage + 1, t),
                                                     e.approximant)});

    PosetPtr cur = trace.stages[t];
    MonotoneMap proj = identity(cur);
    for (;;) {
        const std::size_t n = cur->size();
        std::vector<std::uint8_t> force(n * n, 0);
        for (std::size_t hi = 0; hi < trace.H.size(); ++hi) {
            if (at_top[hi].empty()) continue;
            const MonotoneMap& h = trace.H[hi];
            const std::size_t na = h.dom()->size();
            const std::size_t nap = h.cod()->size();
            std::vector<Prepared> here;
            here.reserve(at_top[hi].size());
            for (const Prepared& pr : at_top[hi])
                here.push_back(Prepared{compose(proj, pr.base), compose(proj, pr.approx)});
            for_each_monotone_map(h.cod(), cur, [&](const MonotoneMap& g) {
                for (const Prepared& pr : here) {
                    bool admissible = true;
                    for (std::size_t a = 0; a < na && admissible; ++a)
                        admissible = cur->leq(pr.base.apply(a), g.apply(h.apply(a)));
                    if (!admissible) continue;
                    for (std::size_t b = 0; b < nap; ++b)
                        force[pr.approx.apply(b) * n + g.apply(b)] = 1;
                }
            });
        }

        std::vector<std::pair<std::size_t, std::size_t>> forced;
        bool missing = false;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (force[a * n + b]) {
                    forced.emplace_back(a, b);
                    if (!cur->leq(a, b)) missing = true;
                }
        if (!missing) break;
        QuotientResult q = quotient_by_relations(cur, forced);
        proj = compose(q.projection, proj);
        cur = q.quotient;
    }
    trace.stages.push_back(cur);
    trace.steps.push_back(proj);

    // Merge check: an earlier span (f, j) and its reappearance
    // (x_{j,i}∘f, i) have agreeing approximants once projected to X_{i+2}.
    const std::size_t i = t - 1;
    for (const RegistryEntry& e : trace.registry) {
        if (e.stage == i || e.h_index >= trace.H.size()) continue;
        MonotoneMap transported_f = compose(trace.connecting(e.stage, i), e.f);
        for (const RegistryEntry& later : trace.registry) {
            if (later.stage != i || later.h_index != e.h_index) continue;
            if (later.f != transported_f) continue;
            MonotoneMap lhs = compose(proj,
                                      compose(trace.connecting(e.stage + 1, t), e.approximant));
            MonotoneMap rhs = compose(proj, later.approximant);
            if (lhs != rhs) throw std::logic_error("odd_step: merge equality failed");
        }
    }
}

/// Builds the reflection chain X = X_0 -> X_1 -> ... until some x_{k,k+2}
/// with k even is an isomorphism, recording converged_at = k. Raises
/// BudgetExceeded when the stage budget or size guard runs out first.
inline ReflectionTrace run_reflection(const PosetPtr& X, std::span<const MonotoneMap> H,
                                      ReflectionOptions options = {}) {
    if (options.budget < 2 || options.budget % 2 != 0)
        throw ValidationError("reflection budget must be even and at least 2");
    if (X->size() > options.stage_limit)
        throw BudgetExceededError("stage size guard: input already exceeds the limit");

    ReflectionTrace trace;
    trace.H.assign(H.begin(), H.end());
    trace.stages.push_back(X);
    trace.options = options;

    for (std::size_t i = 0; i + 2 <= options.budget; i += 2) {
        even_step(trace);
        odd_step(trace);
        if (is_isomorphism(trace.connecting(i, i + 2))) {
            trace.converged_at = i;
            return trace;
        }
    }
    throw BudgetExceededError("no convergence within stage budget " +
                              std::to_string(options.budget));
}

/// Lan_h f for f : dom(h) -> X_k of a converged trace, read off the chain:
/// x_{k,k+2}^{-1} ∘ x_{k+1,k+2} ∘ (f//h).
inline MonotoneMap extract_lan(const ReflectionTrace& trace, std::size_t h_index,
                               const MonotoneMap& f) {
    if (!trace.converged_at) throw NotConvergedError("extract_lan: chain has not converged");
    if (h_index >= trace.H.size()) throw ValidationError("extract_lan: bad member index");
    const std::size_t k = *trace.converged_at;
    if (*f.cod() != *trace.stages[k])
        throw DomainMismatchError("extract_lan: f does not land in the converged stage");
    if (*f.dom() != *trace.H[h_index].dom())
        throw DomainMismatchError("extract_lan: f does not start at dom(h)");

    const RegistryEntry* entry = nullptr;
    for (const RegistryEntry& e : trace.registry)
        if (e.stage == k && e.h_index == h_index && e.f == f) {
            entry = &e;
            break;
        }
    if (!entry) throw std::logic_error("extract_lan: span missing from registry");

    MonotoneMap down = inverse(trace.connecting(k, k + 2));
    return compose(down, compose(trace.connecting(k + 1, k + 2), entry->approximant));
}

/// Extends p : X_0 -> P over the chain of a converged trace, yielding the
/// unique q : X_k -> P with q ∘ x_{0,k} = p. P must come with a passing
/// left-membership report; failures during the cocone construction mean the
/// report lied and raise TargetNotInjective.
inline MonotoneMap induce_morphism(const ReflectionTrace& trace, const MonotoneMap& p,
                                   const InjectivityReport& proof) {
    if (!trace.converged_at)
        throw NotConvergedError("induce_morphism: chain has not converged");
    if (*p.dom() != *trace.stages[0])
        throw DomainMismatchError("induce_morphism: p does not start at stage 0");
    if (!proof.ok || proof.side != Side::left || proof.per_h.size() != trace.H.size())
        throw TargetNotInjectiveError("induce_morphism: target lacks a passing report");

    const std::size_t k = *trace.converged_at;
    const PosetPtr& P = p.cod();
    MonotoneMap cur = p;
    for (std::size_t i = 0; i < k; i += 2) {
        // Even half: base part follows cur, attached parts follow the least
        // extensions of cur∘f; all assignments must agree on each apex class.
        const PosetPtr& next = trace.stages[i + 1];
        std::vector<std::size_t> val(next->size(), SIZE_MAX);
        auto put = [&](std::size_t at, std::size_t v) {
            if (val[at] == SIZE_MAX) {
                val[at] = v;
            } else if (val[at] != v) {
                throw TargetNotInjectiveError(
                    "induce_morphism: cocone values clash on the wide pushout");
            }
        };
        const MonotoneMap& step = trace.steps[i];
        for (std::size_t x = 0; x < trace.stages[i]->size(); ++x)
            put(step.apply(x), cur.apply(x));
        for (const RegistryEntry& e : trace.registry) {
            if (e.stage != i) continue;
            ExtensionVerdict lan = least_extension(trace.H[e.h_index], compose(cur, e.f));
            if (!lan.exists() || !lan.strict)
                throw TargetNotInjectiveError(
                    "induce_morphism: target misses a strict least extension");
            for (std::size_t b = 0; b < e.approximant.dom()->size(); ++b)
                put(e.approximant.apply(b), lan.extension->apply(b));
        }
        for (std::size_t c = 0; c < val.size(); ++c)
            if (val[c] == SIZE_MAX)
                throw std::logic_error("induce_morphism: wide pushout legs not jointly onto");
        MonotoneMap next_map = [&] {
            try {
                return MonotoneMap(next, P, std::move(val));
            } catch (const ValidationError&) {
                throw TargetNotInjectiveError(
                    "induce_morphism: induced assignment is not monotone");
            }
        }();

        // Odd half: factor through the quotient; class members must agree.
        const MonotoneMap& proj = trace.steps[i + 1];
        const PosetPtr& after = trace.stages[i + 2];
        std::vector<std::size_t> qval(after->size(), SIZE_MAX);
        for (std::size_t y = 0; y < next->size(); ++y) {
            std::size_t c = proj.apply(y);
            if (qval[c] == SIZE_MAX) {
                qval[c] = next_map.apply(y);
            } else if (qval[c] != next_map.apply(y)) {
                throw TargetNotInjectiveError(
                    "induce_morphism: quotient classes map to different values");
            }
        }
        cur = [&] {
            try {
                return MonotoneMap(after, P, std::move(qval));
            } catch (const ValidationError&) {
                throw TargetNotInjectiveError(
                    "induce_morphism: quotient factorization is not monotone");
            }
        }();
    }
    if (compose(cur, trace.connecting(0, k)) != p)
        throw std::logic_error("induce_morphism: cocone does not restrict to p");
    return cur;
}

/// Text dump of a trace: each stage in the core text format, then one
/// `connect i j : a->b ...` line per recorded step.
inline std::string trace_dump(const ReflectionTrace& trace) {
    std::string out;
    for (std::size_t i = 0; i < trace.stages.size(); ++i)
        out += serialize_poset("X" + std::to_string(i), *trace.stages[i]) + "\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        out += "connect " + std::to_string(i) + " " + std::to_string(i + 1) + " :";
        const MonotoneMap& s = trace.steps[i];
        for (std::size_t x = 0; x < s.dom()->size(); ++x)
            out += " " + s.dom()->element(x) + "->" + s.cod()->element(s.apply(x));
        out += "\n";
    }
    if (trace.converged_at)
        out += "converged_at " + std::to_string(*trace.converged_at) + "\n";
    return out;
}

}  // namespace kaninj
