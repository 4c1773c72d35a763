#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "constructions.hpp"
#include "kan.hpp"
#include "monads.hpp"
#include "oracles.hpp"
#include "poset.hpp"
#include "reflection.hpp"
#include "workspace.hpp"

namespace kaninj {

/// Exit contract: 0 = verdict true / success, 1 = verdict false, 2 = error.
struct CommandResult {
    int exit_code = 0;
    std::string output;
};

namespace detail {

inline std::string render_assignment(const MonotoneMap& f) {
    std::string out;
    for (std::size_t i = 0; i < f.dom()->size(); ++i) {
        if (!out.empty()) out += " ";
        out += f.dom()->element(i) + "->" + f.cod()->element(f.apply(i));
    }
    return out;
}

inline nlohmann::json poset_json(const FinPoset& p) {
    nlohmann::json covers = nlohmann::json::array();
    for (const auto& [a, b] : cover_pairs(p))
        covers.push_back({p.element(a), p.element(b)});
    return {{"elements", p.elements()}, {"order", covers}};
}

inline nlohmann::json map_json(const MonotoneMap& f) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t i = 0; i < f.dom()->size(); ++i)
        out[f.dom()->element(i)] = f.cod()->element(f.apply(i));
    return out;
}

inline std::string serialize_named_map(const std::string& name, const std::string& dom,
                                       const std::string& cod, const MonotoneMap& f) {
    return serialize_map(name, Workspace::MapEntry{dom, cod, f});
}

inline std::vector<MonotoneMap> lookup_maps(const Workspace& ws,
                                            const std::vector<std::string>& names) {
    std::vector<MonotoneMap> out;
    out.reserve(names.size());
    for (const std::string& n : names) out.push_back(ws.map(n));
    return out;
}

/// Hasse diagram of every stage plus dashed step edges, in DOT syntax.
inline std::string trace_dot(const ReflectionTrace& trace) {
    std::string out = "digraph trace {\n  rankdir=BT;\n";
    auto node = [](std::size_t stage, const std::string& name) {
        return "\"s" + std::to_string(stage) + "_" + name + "\"";
    };
    for (std::size_t s = 0; s < trace.stages.size(); ++s) {
        const FinPoset& X = *trace.stages[s];
        out += "  subgraph cluster_" + std::to_string(s) + " {\n    label=\"X" +
               std::to_string(s) + "\";\n";
        for (const auto& e : X.elements())
            out += "    " + node(s, e) + " [label=\"" + e + "\"];\n";
        for (const auto& [a, b] : cover_pairs(X))
            out += "    " + node(s, X.element(a)) + " -> " + node(s, X.element(b)) + ";\n";
        out += "  }\n";
    }
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const MonotoneMap& x = trace.steps[s];
        for (std::size_t i = 0; i < x.dom()->size(); ++i)
            out += "  " + node(s, x.dom()->element(i)) + " -> " +
                   node(s + 1, x.cod()->element(x.apply(i))) +
                   " [style=dashed, constraint=false];\n";
    }
    out += "}\n";
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace detail

/// Parses and runs one subcommand against a read-only workspace.
inline CommandResult run_command(const Workspace& ws, const std::vector<std::string>& args) {
    static const std::vector<std::string> known = {"lan",     "check", "reflect",
                                                   "colimit", "monad", "verify"};
    CLI::App app{"finite posets: Kan extensions, injectivity classes, reflections"};
    app.name("kaninj");
    app.require_subcommand(1);

    // lan
    std::string lan_h, lan_f;
    bool lan_right = false, lan_weak = false, lan_json = false;
    CLI::App* lan = app.add_subcommand("lan", "least (or greatest) extension along an arrow");
    lan->set_help_flag("--help", "print help");
    lan->add_option("-h", lan_h, "arrow to extend along (map name)")->required();
    lan->add_option("-f", lan_f, "map to extend (map name)")->required();
    lan->add_flag("--right", lan_right, "greatest extension instead of least");
    lan->add_flag("--weak", lan_weak, "verdict requires existence only, not strictness");
    lan->add_flag("--json", lan_json);

    // check
    std::string check_subject, check_side = "left";
    std::vector<std::string> check_H;
    bool check_json = false;
    CLI::App* check = app.add_subcommand("check", "injectivity-class membership of a poset or map");
    check->add_option("subject", check_subject, "poset or map name")->required();
    check->add_option("-H", check_H, "arrows (map names, comma separated)")
        ->required()
        ->delimiter(',');
    check->add_option("--side", check_side, "left | right | weak-left")
        ->check(CLI::IsMember({"left", "right", "weak-left"}));
    check->add_flag("--json", check_json);

    // reflect
    std::string reflect_x, reflect_dump;
    std::vector<std::string> reflect_H;
    bool reflect_weak = false, reflect_json = false;
    std::size_t reflect_budget = ReflectionOptions{}.budget;
    CLI::App* reflect = app.add_subcommand("reflect", "reflection chain into the injectivity class");
    reflect->add_option("object", reflect_x, "poset name")->required();
    reflect->add_option("-H", reflect_H, "arrows (map names, comma separated)")
        ->required()
        ->delimiter(',');
    reflect->add_flag("--weak", reflect_weak, "weak chain (lax squares)");
    reflect->add_option("--budget", reflect_budget, "largest stage index allowed");
    reflect->add_option("--dump-trace", reflect_dump, "directory for trace.txt and trace.dot");
    reflect->add_flag("--json", reflect_json);

    // colimit
    std::string col_kind, col_u, col_v;
    std::vector<std::string> col_factors;
    bool col_json = false;
    CLI::App* colimit = app.add_subcommand("colimit", "weighted and conical (co)limits");
    colimit->add_option("kind", col_kind, "inserter | coinserter | pushout | cocomma | product | coproduct")
        ->required()
        ->check(CLI::IsMember({"inserter", "coinserter", "pushout", "cocomma", "product",
                               "coproduct"}));
    colimit->add_option("-u,-f", col_u, "first map name");
    colimit->add_option("-v,-g", col_v, "second map name");
    colimit->add_option("factors", col_factors, "poset names (product/coproduct)");
    colimit->add_flag("--json", col_json);

    // monad
    std::string monad_action, monad_x;
    bool monad_json = false;
    CLI::App* monad = app.add_subcommand("monad", "lowerset monad diagnostics");
    monad->add_option("action", monad_action, "laws | kz | algebra")
        ->required()
        ->check(CLI::IsMember({"laws", "kz", "algebra"}));
    monad->add_option("object", monad_x, "poset name")->required();
    monad->add_flag("--json", monad_json);

    // verify
    std::string verify_x;
    std::vector<std::string> verify_H, verify_targets;
    bool verify_json = false;
    std::size_t verify_budget = ReflectionOptions{}.budget;
    CLI::App* verify = app.add_subcommand("verify", "couniversal property of a computed reflection");
    verify->add_option("object", verify_x, "poset name")->required();
    verify->add_option("-H", verify_H, "arrows (map names, comma separated)")
        ->required()
        ->delimiter(',');
    verify->add_option("--targets", verify_targets, "member posets (comma separated)")
        ->required()
        ->delimiter(',');
    verify->add_option("--budget", verify_budget, "largest stage index allowed");
    verify->add_flag("--json", verify_json);

    try {
        if (!args.empty() && args[0][0] != '-' &&
            std::find(known.begin(), known.end(), args[0]) == known.end())
            throw UnknownCommandError("unknown command '" + args[0] + "'");
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        return {0, app.help()};
    } catch (const CLI::ParseError& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    } catch (const Error& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    }

    try {
        if (lan->parsed()) {
            const MonotoneMap& h = ws.map(lan_h);
            const MonotoneMap& f = ws.map(lan_f);
            ExtensionVerdict v = lan_right ? greatest_extension(h, f) : least_extension(h, f);
            bool verdict = v.exists() && (lan_weak || v.strict);
            std::string status = v.status == ExtensionVerdict::Status::found ? "found"
                                 : v.status == ExtensionVerdict::Status::no_candidate
                                     ? "no_candidate"
                                     : "no_least";
            if (lan_json) {
                nlohmann::json js{{"verdict", verdict},
                                  {"status", status},
                                  {"strict", v.exists() && v.strict},
                                  {"extension", nullptr},
                                  {"counterexample", nullptr}};
                if (v.exists()) js["extension"] = detail::map_json(*v.extension);
                if (!verdict) js["counterexample"] = status;
                return {verdict ? 0 : 1, js.dump(2) + "\n"};
            }
            std::string out;
            if (v.exists()) {
                out += detail::serialize_named_map(lan_right ? "ran" : "lan",
                                                   ws.maps.at(lan_h).cod_name,
                                                   ws.maps.at(lan_f).cod_name, *v.extension) +
                       "\n";
                out += std::string("strict: ") + (v.strict ? "true" : "false") + "\n";
            } else {
                out += status == "no_candidate" ? "no extension exists\n"
                                                : "extensions exist but none is least\n";
            }
            return {verdict ? 0 : 1, out};
        }

        if (check->parsed()) {
            Subject subject = ws.posets.count(check_subject)
                                  ? Subject(ws.poset(check_subject))
                                  : Subject(ws.map(check_subject));
            std::vector<MonotoneMap> H = detail::lookup_maps(ws, check_H);
            Side side = check_side == "left"    ? Side::left
                        : check_side == "right" ? Side::right
                                                : Side::weak_left;
            InjectivityReport rep = membership(subject, H, side);
            std::string first_counter;
            for (const HVerdict& hv : rep.per_h)
                if (!hv.ok && hv.counterexample && first_counter.empty())
                    first_counter = detail::render_assignment(*hv.counterexample);
            if (check_json) {
                nlohmann::json per = nlohmann::json::array();
                for (const HVerdict& hv : rep.per_h)
                    per.push_back({{"h", check_H[hv.h_index]},
                                   {"ok", hv.ok},
                                   {"counterexample",
                                    hv.counterexample
                                        ? nlohmann::json(detail::render_assignment(
                                              *hv.counterexample))
                                        : nlohmann::json(nullptr)}});
                nlohmann::json js{{"verdict", rep.ok},
                                  {"side", check_side},
                                  {"per_h", per},
                                  {"counterexample", rep.ok ? nlohmann::json(nullptr)
                                                            : nlohmann::json(first_counter)}};
                return {rep.ok ? 0 : 1, js.dump(2) + "\n"};
            }
            std::string out = std::string("member: ") + (rep.ok ? "true" : "false") + "\n";
            for (const HVerdict& hv : rep.per_h) {
                out += "  " + check_H[hv.h_index] + ": " + (hv.ok ? "ok" : "fail");
                if (hv.counterexample)
                    out += "  counterexample: " + detail::render_assignment(*hv.counterexample);
                out += "\n";
            }
            return {rep.ok ? 0 : 1, out};
        }

        if (reflect->parsed()) {
            const PosetPtr& X = ws.poset(reflect_x);
            std::vector<MonotoneMap> H = detail::lookup_maps(ws, reflect_H);
            ReflectionOptions opts;
            opts.budget = reflect_budget;
            opts.mode = reflect_weak ? ChainMode::weak : ChainMode::strong;
            ReflectionTrace trace = run_reflection(X, H, opts);
            const std::size_t k = *trace.converged_at;
            if (!reflect_dump.empty()) {
                std::filesystem::create_directories(reflect_dump);
                detail::write_file(std::filesystem::path(reflect_dump) / "trace.txt",
                                   trace_dump(trace));
                detail::write_file(std::filesystem::path(reflect_dump) / "trace.dot",
                                   detail::trace_dot(trace));
            }
            MonotoneMap unit = trace.connecting(0, k);
            std::string refl_name = reflect_x + "_refl";
            if (reflect_json) {
                nlohmann::json js{{"verdict", true},
                                  {"counterexample", nullptr},
                                  {"stages", trace.stages.size()},
                                  {"converged_at", k},
                                  {"object", detail::poset_json(*trace.stages[k])},
                                  {"unit", detail::map_json(unit)}};
                return {0, js.dump(2) + "\n"};
            }
            std::string out = serialize_poset(refl_name, *trace.stages[k]) + "\n" +
                              detail::serialize_named_map("unit", reflect_x, refl_name, unit) +
                              "\n" + "converged_at: " + std::to_string(k) + "\n" +
                              "stages: " + std::to_string(trace.stages.size()) + "\n";
            return {0, out};
        }

        if (colimit->parsed()) {
            nlohmann::json js{{"verdict", true}, {"counterexample", nullptr}};
            std::string out;
            auto emit_object = [&](const FinPoset& p) {
                js["object"] = detail::poset_json(p);
                out += serialize_poset("result", p) + "\n";
            };
            auto emit_map = [&](const std::string& name, const std::string& dom,
                                const std::string& cod, const MonotoneMap& f) {
                js["maps"][name] = detail::map_json(f);
                out += detail::serialize_named_map(name, dom, cod, f) + "\n";
            };
            if (col_kind == "inserter" || col_kind == "coinserter") {
                if (col_u.empty() || col_v.empty())
                    throw ValidationError(col_kind + " needs -u and -v");
                const MonotoneMap& u = ws.map(col_u);
                const MonotoneMap& v = ws.map(col_v);
                if (col_kind == "inserter") {
                    InserterResult r = inserter(u, v);
                    emit_object(*r.object);
                    emit_map("incl", "result", ws.maps.at(col_u).dom_name, r.arrow);
                } else {
                    QuotientResult r = coinserter(u, v);
                    emit_object(*r.quotient);
                    emit_map("proj", ws.maps.at(col_u).cod_name, "result", r.projection);
                }
            } else if (col_kind == "pushout" || col_kind == "cocomma") {
                if (col_u.empty() || col_v.empty())
                    throw ValidationError(col_kind + " needs -f and -g");
                const MonotoneMap& f = ws.map(col_u);
                const MonotoneMap& g = ws.map(col_v);
                ColimitSquare sq = col_kind == "pushout" ? pushout(f, g) : cocomma(f, g);
                emit_object(*sq.apex);
                emit_map("left", ws.maps.at(col_u).cod_name, "result", sq.left_leg);
                emit_map("right", ws.maps.at(col_v).cod_name, "result", sq.right_leg);
            } else {
                std::vector<PosetPtr> factors;
                for (const std::string& n : col_factors) factors.push_back(ws.poset(n));
                if (col_kind == "product") {
                    ProductResult r = product(factors);
                    emit_object(*r.object);
                    for (std::size_t i = 0; i < r.projections.size(); ++i)
                        emit_map("pr" + std::to_string(i), "result", col_factors[i],
                                 r.projections[i]);
                } else {
                    CoproductResult r = coproduct(factors);
                    emit_object(*r.object);
                    for (std::size_t i = 0; i < r.injections.size(); ++i)
                        emit_map("in" + std::to_string(i), col_factors[i], "result",
                                 r.injections[i]);
                }
            }
            if (col_json) return {0, js.dump(2) + "\n"};
            return {0, out};
        }

        if (monad->parsed()) {
            const PosetPtr& X = ws.poset(monad_x);
            if (monad_action == "laws" || monad_action == "kz") {
                bool verdict = monad_action == "laws" ? monad_laws_check(X) : kz_check(X);
                if (monad_json) {
                    nlohmann::json js{{"verdict", verdict}, {"counterexample", nullptr}};
                    return {verdict ? 0 : 1, js.dump(2) + "\n"};
                }
                return {verdict ? 0 : 1,
                        std::string(monad_action) + ": " + (verdict ? "true" : "false") + "\n"};
            }
            AlgebraDiagnosis d = algebra_structure(X);
            bool verdict = d.algebra.has_value() && d.laws_ok;
            if (monad_json) {
                nlohmann::json js{{"verdict", verdict}, {"counterexample", nullptr}};
                if (d.missing_join) js["counterexample"] = *d.missing_join;
                if (d.algebra) js["algebra"] = detail::map_json(*d.algebra);
                return {verdict ? 0 : 1, js.dump(2) + "\n"};
            }
            std::string out;
            if (d.algebra) {
                std::string tx_name = "T_" + monad_x;
                out += serialize_poset(tx_name, *d.algebra->dom()) + "\n";
                out += detail::serialize_named_map("alpha", tx_name, monad_x, *d.algebra) + "\n";
                out += std::string("laws: ") + (d.laws_ok ? "true" : "false") + "\n";
            } else {
                out += "no algebra: downset '" + *d.missing_join + "' has no join\n";
            }
            return {verdict ? 0 : 1, out};
        }

        if (verify->parsed()) {
            const PosetPtr& X = ws.poset(verify_x);
            std::vector<MonotoneMap> H = detail::lookup_maps(ws, verify_H);
            std::vector<PosetPtr> targets;
            for (const std::string& n : verify_targets) targets.push_back(ws.poset(n));
            ReflectionOptions opts;
            opts.budget = verify_budget;
            ReflectionTrace trace = run_reflection(X, H, opts);
            const std::size_t k = *trace.converged_at;
            FreeConstruction candidate{trace.stages[k], trace.connecting(0, k)};
            ReflectionVerification rep = verify_reflection(candidate, H, targets);
            if (verify_json) {
                nlohmann::json js{{"verdict", rep.ok},
                                  {"counterexample",
                                   rep.ok ? nlohmann::json(nullptr) : nlohmann::json(rep.detail)}};
                return {rep.ok ? 0 : 1, js.dump(2) + "\n"};
            }
            return {rep.ok ? 0 : 1, rep.detail + "\n"};
        }
    } catch (const Error& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    }
    return {2, "error: no command\n"};
}

}  // namespace kaninj
