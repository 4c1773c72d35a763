// Command-layer tests: every subcommand is driven through run_command against
// a workspace assembled from the shipped demo files plus a few extra
// declarations, asserting exit codes, text output, and JSON payloads.
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kaninj/commands.hpp"
#include "kaninj/workspace.hpp"

namespace {

using kaninj::CommandResult;
using kaninj::Workspace;

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// The demo corpus plus: an identity on the antichain (admits no extension
// along the V embedding), point-pickers for coinserter/cocomma calls, and an
// empty poset with its unique maps so the "extensions exist but none is
// least" branch is reachable.
const Workspace& demo_workspace() {
    static const Workspace ws = [] {
        Workspace w = kaninj::parse_workspace({"demo/semilattice.poset",
                                               "demo/lattices.poset",
                                               "demo/extensions.poset"});
        kaninj::parse_workspace_text(
            "map ida : antichain2 -> antichain2 { a->a b->b }\n"
            "map pick_a : one -> antichain2 { p->a }\n"
            "map pick_b : one -> antichain2 { p->b }\n"
            "poset nil { elements: ; order: }\n"
            "map emb01 : nil -> one { }\n"
            "map into_a2 : nil -> antichain2 { }\n",
            w);
        return w;
    }();
    return ws;
}

CommandResult run(std::vector<std::string> args) {
    return kaninj::run_command(demo_workspace(), args);
}

}  // namespace

TEST_CASE("check reports membership verdicts with per-arrow detail") {
    SECTION("a complete lattice is a member") {
        CommandResult r = run({"check", "diamond", "-H", "emb_2_V"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "member: true"));
        CHECK(contains(r.output, "emb_2_V: ok"));
    }
    SECTION("the antichain fails with the incomparable-pair counterexample") {
        CommandResult r = run({"check", "antichain2", "-H", "emb_2_V"});
        CHECK(r.exit_code == 1);
        CHECK(contains(r.output, "member: false"));
        CHECK(contains(r.output, "emb_2_V: fail"));
        CHECK(contains(r.output, "counterexample: a->a b->b"));
    }
    SECTION("right side hinges on a greatest element") {
        CHECK(run({"check", "V", "-H", "emb_2_V", "--side", "right"}).exit_code == 0);
        CHECK(run({"check", "antichain2", "-H", "emb_2_V", "--side", "right"}).exit_code == 1);
    }
    SECTION("weak side accepts what the strong side rejects") {
        CHECK(run({"check", "V", "-H", "collapse2", "--side", "weak-left"}).exit_code == 0);
        CHECK(run({"check", "V", "-H", "collapse2"}).exit_code == 1);
    }
    SECTION("several arrows produce one line each") {
        CommandResult r = run({"check", "diamond", "-H", "emb_2_V,emb01"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "emb_2_V: ok"));
        CHECK(contains(r.output, "emb01: ok"));
    }
    SECTION("a map subject is judged as a structure-preserving morphism") {
        // Monotone maps between chains preserve all existing joins.
        CHECK(run({"check", "ceil", "-H", "emb_2_V"}).exit_code == 0);
        // A map out of a non-member fails immediately.
        CHECK(run({"check", "emb_2_V", "-H", "emb_2_V"}).exit_code == 1);
    }
    SECTION("json payload") {
        CommandResult r = run({"check", "antichain2", "-H", "emb_2_V", "--json"});
        CHECK(r.exit_code == 1);
        nlohmann::json js = nlohmann::json::parse(r.output);
        CHECK(js["verdict"] == false);
        CHECK(js["side"] == "left");
        REQUIRE(js["per_h"].size() == 1);
        CHECK(js["per_h"][0]["h"] == "emb_2_V");
        CHECK(js["per_h"][0]["ok"] == false);
        CHECK(js["per_h"][0]["counterexample"] == "a->a b->b");
        CHECK(js["counterexample"] == "a->a b->b");
    }
}

TEST_CASE("reflect prints the limit object, unit, and convergence data") {
    SECTION("text output") {
        CommandResult r = run({"reflect", "antichain2", "-H", "emb_2_V"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "poset antichain2_refl"));
        CHECK(contains(r.output, "map unit : antichain2 -> antichain2_refl"));
        CHECK(contains(r.output, "converged_at: 2"));
        CHECK(contains(r.output, "stages: 5"));
    }
    SECTION("json output") {
        CommandResult r = run({"reflect", "antichain2", "-H", "emb_2_V", "--json"});
        CHECK(r.exit_code == 0);
        nlohmann::json js = nlohmann::json::parse(r.output);
        CHECK(js["verdict"] == true);
        CHECK(js["counterexample"].is_null());
        CHECK(js["converged_at"] == 2);
        CHECK(js["stages"] == 5);
        CHECK(js["object"]["elements"].size() == 3);
    }
    SECTION("weak chain mode") {
        CommandResult r = run({"reflect", "antichain2", "-H", "collapse2", "--weak"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "converged_at: 2"));
    }
    SECTION("an exhausted stage budget is a hard error") {
        CommandResult r = run({"reflect", "antichain2", "-H", "emb_2_V", "--budget", "2"});
        CHECK(r.exit_code == 2);
        CHECK(contains(r.output, "error:"));
        CHECK(contains(r.output, "stage budget 2"));
    }
    SECTION("trace dump writes a text log and a dot graph") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "kaninj_cli_trace";
        fs::remove_all(dir);
        CommandResult r = run({"reflect", "antichain2", "-H", "emb_2_V",
                               "--dump-trace", dir.string()});
        CHECK(r.exit_code == 0);
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p);
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        };
        const std::string txt = slurp(dir / "trace.txt");
        CHECK(contains(txt, "poset X0"));
        CHECK(contains(txt, "connect 0 1"));
        CHECK(contains(txt, "converged_at 2"));
        CHECK(contains(slurp(dir / "trace.dot"), "digraph"));
        fs::remove_all(dir);
    }
}

TEST_CASE("lan computes least and greatest extensions") {
    SECTION("least extension fills the V top with the join") {
        CommandResult r = run({"lan", "-h", "emb_2_V", "-f", "mid_pair"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "map lan : V -> diamond"));
        CHECK(contains(r.output, "t->top"));
        CHECK(contains(r.output, "strict: true"));
    }
    SECTION("greatest extension of the same data") {
        CommandResult r = run({"lan", "-h", "emb_2_V", "-f", "mid_pair", "--right"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "map ran : V -> diamond"));
        CHECK(contains(r.output, "strict: true"));
    }
    SECTION("no candidate extension at all") {
        CommandResult r = run({"lan", "-h", "emb_2_V", "-f", "ida"});
        CHECK(r.exit_code == 1);
        CHECK(contains(r.output, "no extension exists"));
    }
    SECTION("candidates exist but no least one") {
        CommandResult r = run({"lan", "-h", "emb01", "-f", "into_a2"});
        CHECK(r.exit_code == 1);
        CHECK(contains(r.output, "extensions exist but none is least"));
    }
    SECTION("a lax extension fails strictly but passes weakly") {
        CommandResult strict = run({"lan", "-h", "collapse2", "-f", "mid_pair"});
        CHECK(strict.exit_code == 1);
        CHECK(contains(strict.output, "p->top"));
        CHECK(contains(strict.output, "strict: false"));
        CHECK(run({"lan", "-h", "collapse2", "-f", "mid_pair", "--weak"}).exit_code == 0);
    }
    SECTION("json payload") {
        CommandResult r = run({"lan", "-h", "emb_2_V", "-f", "ida", "--json"});
        CHECK(r.exit_code == 1);
        nlohmann::json js = nlohmann::json::parse(r.output);
        CHECK(js["verdict"] == false);
        CHECK(js["status"] == "no_candidate");
        CHECK(js["extension"].is_null());
        CHECK(js["counterexample"] == "no_candidate");

        CommandResult ok = run({"lan", "-h", "emb_2_V", "-f", "mid_pair", "--json"});
        CHECK(ok.exit_code == 0);
        nlohmann::json oj = nlohmann::json::parse(ok.output);
        CHECK(oj["verdict"] == true);
        CHECK(oj["strict"] == true);
        CHECK_FALSE(oj["extension"].is_null());
    }
}

TEST_CASE("colimit builds the requested construction with named legs") {
    SECTION("product of two chains") {
        CommandResult r = run({"colimit", "product", "chain2", "chain2"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "poset result"));
        CHECK(contains(r.output, "c0_c1"));
        CHECK(contains(r.output, "map pr0 : result -> chain2"));
        CHECK(contains(r.output, "map pr1 : result -> chain2"));
    }
    SECTION("coproduct freshens clashing names") {
        CommandResult r = run({"colimit", "coproduct", "one", "one"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "p_0"));
        CHECK(contains(r.output, "p_1"));
        CHECK(contains(r.output, "map in0 : one -> result"));
        CHECK(contains(r.output, "map in1 : one -> result"));
    }
    SECTION("pushout along the V embedding") {
        CommandResult r = run({"colimit", "pushout", "-f", "ida", "-g", "emb_2_V"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "poset result"));
        CHECK(contains(r.output, "map left : antichain2 -> result"));
        CHECK(contains(r.output, "map right : V -> result"));
    }
    SECTION("inserter and coinserter") {
        CommandResult ins = run({"colimit", "inserter", "-u", "ida", "-v", "ida"});
        CHECK(ins.exit_code == 0);
        CHECK(contains(ins.output, "map incl : result -> antichain2"));

        CommandResult coins = run({"colimit", "coinserter", "-u", "pick_a", "-v", "pick_b"});
        CHECK(coins.exit_code == 0);
        CHECK(contains(coins.output, "map proj : antichain2 -> result"));
    }
    SECTION("cocomma of a span of points") {
        CommandResult r = run({"colimit", "cocomma", "-f", "pick_a", "-g", "pick_b"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "map left : antichain2 -> result"));
        CHECK(contains(r.output, "map right : antichain2 -> result"));
    }
    SECTION("json payload") {
        CommandResult r = run({"colimit", "product", "chain2", "chain2", "--json"});
        CHECK(r.exit_code == 0);
        nlohmann::json js = nlohmann::json::parse(r.output);
        CHECK(js["verdict"] == true);
        CHECK(js["object"]["elements"].size() == 4);
        CHECK(js["maps"].contains("pr0"));
        CHECK(js["maps"].contains("pr1"));
    }
    SECTION("missing legs and unknown kinds are errors") {
        CommandResult r = run({"colimit", "pushout", "-f", "ida"});
        CHECK(r.exit_code == 2);
        CHECK(contains(r.output, "needs -f and -g"));
        CHECK(run({"colimit", "frobnicate", "one"}).exit_code == 2);
    }
}

TEST_CASE("monad checks laws and diagnoses algebra structures") {
    SECTION("laws and kz hold on small objects") {
        CommandResult laws = run({"monad", "laws", "antichain2"});
        CHECK(laws.exit_code == 0);
        CHECK(contains(laws.output, "laws: true"));

        CommandResult kz = run({"monad", "kz", "V"});
        CHECK(kz.exit_code == 0);
        CHECK(contains(kz.output, "kz: true"));
    }
    SECTION("the antichain has no algebra because the empty downset lacks a join") {
        CommandResult r = run({"monad", "algebra", "antichain2"});
        CHECK(r.exit_code == 1);
        CHECK(contains(r.output, "no algebra: downset 'empty' has no join"));

        CommandResult js_r = run({"monad", "algebra", "antichain2", "--json"});
        CHECK(js_r.exit_code == 1);
        nlohmann::json js = nlohmann::json::parse(js_r.output);
        CHECK(js["verdict"] == false);
        CHECK(js["counterexample"] == "empty");
    }
    SECTION("the diamond carries a lawful algebra") {
        CommandResult r = run({"monad", "algebra", "diamond"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "poset T_diamond"));
        CHECK(contains(r.output, "map alpha : T_diamond -> diamond"));
        CHECK(contains(r.output, "laws: true"));
    }
}

TEST_CASE("verify certifies a computed reflection against targets") {
    SECTION("the antichain reflection verifies against member targets") {
        CommandResult r = run({"verify", "antichain2", "-H", "emb_2_V",
                               "--targets", "V,diamond,chain2"});
        CHECK(r.exit_code == 0);
        CHECK(contains(r.output, "verified"));

        CommandResult js_r = run({"verify", "antichain2", "-H", "emb_2_V",
                                  "--targets", "V", "--json"});
        CHECK(js_r.exit_code == 0);
        nlohmann::json js = nlohmann::json::parse(js_r.output);
        CHECK(js["verdict"] == true);
        CHECK(js["counterexample"].is_null());
    }
    SECTION("a non-member target is rejected with a diagnostic") {
        CommandResult r = run({"verify", "antichain2", "-H", "emb_2_V",
                               "--targets", "antichain2"});
        CHECK(r.exit_code == 1);
        CHECK(contains(r.output, "not a member"));
    }
}

TEST_CASE("argument errors exit with code 2") {
    SECTION("unknown command") {
        CommandResult r = run({"frobnicate"});
        CHECK(r.exit_code == 2);
        CHECK(contains(r.output, "unknown command 'frobnicate'"));
    }
    SECTION("unknown workspace names") {
        CHECK(run({"check", "nosuch", "-H", "emb_2_V"}).exit_code == 2);
        CHECK(run({"check", "diamond", "-H", "nosuch"}).exit_code == 2);
        CHECK(run({"reflect", "nosuch", "-H", "emb_2_V"}).exit_code == 2);
    }
    SECTION("missing required options") {
        CommandResult r = run({"check", "diamond"});
        CHECK(r.exit_code == 2);
        CHECK(contains(r.output, "error:"));
    }
    SECTION("help exits cleanly") {
        CommandResult top = run({"--help"});
        CHECK(top.exit_code == 0);
        CHECK(contains(top.output, "lan"));
        CHECK(contains(top.output, "check"));
        CHECK(run({"lan", "--help"}).exit_code == 0);
    }
}
