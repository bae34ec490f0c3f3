// byzcone: scenario-driven front end for the causal-cone toolkit.
//
// Exit codes: 0 pass, 1 assertion failure, 2 usage or parse error, 3 budget.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "byzcone/runner.hpp"
#include "byzcone/trace.hpp"

namespace fs = std::filesystem;
using namespace byzcone;

namespace {

constexpr int kUsage = 2;
constexpr int kBudget = 3;

struct Common {
    std::string scenario;
    std::string out = "out";
    std::optional<Timestamp> horizon;
    std::optional<std::uint64_t> budget;
    std::optional<std::uint64_t> seed;

    ScenarioOverrides overrides() const { return {horizon, budget, seed}; }
};

void addCommon(CLI::App* sub, Common& c) {
    sub->add_option("scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "Output directory (traces/, reports/, graphs/)");
    sub->add_option("--horizon", c.horizon, "Override the scenario horizon");
    sub->add_option("--budget", c.budget, "Override the enumeration budget");
    sub->add_option("--seed", c.seed, "Drive the scripted run from this seed");
}

int report(const std::string& name, const fs::path& out, const std::vector<QueryOutcome>& outcomes) {
    writeOutcomes(out, name, outcomes);
    for (const auto& o : outcomes) {
        std::cout << toString(o.verdict) << "  " << o.query.text << "  -- " << o.summary << "\n";
        for (const auto& a : o.artifacts) std::cout << "  wrote " << (out / a.first).string() << "\n";
    }
    return exitCodeFor(outcomes);
}

/// Runs the scenario's augment queries so that ad hoc queries see the same universe.
void augmentFromScenario(ScenarioRunner& runner) {
    for (const auto& q : runner.scenario().queries) {
        using K = Query::Kind;
        if (q.kind == K::AugmentVat || q.kind == K::AugmentCone || q.kind == K::AugmentSeeded)
            runner.execute(q);
    }
}

int single(const Common& c, const std::string& queryText, bool augment) {
    ScenarioRunner runner(loadScenario(c.scenario, c.overrides()));
    const Query q = parseQuery(queryText, 0);
    if (augment) augmentFromScenario(runner);
    return report(runner.scenario().name, c.out, {runner.execute(q)});
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"byzcone: causal cones, surgery and hope in byzantine runs"};
    app.require_subcommand(1);

    Common c;
    std::string theta;
    std::string formula;
    std::string expect;
    std::string hap;
    std::string dump;
    std::uint64_t atLeast = 0;
    int agent = 1;
    std::string time = "all";
    bool bounded = false;

    auto* run = app.add_subcommand("run", "Execute every query of the scenario");
    addCommon(run, c);
    auto* simulate = app.add_subcommand("simulate", "Dump the scripted run");
    addCommon(simulate, c);
    auto* enumerate = app.add_subcommand("enumerate", "Count the admissible runs");
    addCommon(enumerate, c);
    enumerate->add_option("--at-least", atLeast, "Fail unless at least this many runs exist");
    auto* lemma5 = app.add_subcommand("verify-lemma5", "Check (A)-(F) for the cone-equivalent adjustment");
    addCommon(lemma5, c);
    lemma5->add_option("--theta", theta, "Node a@t (default: every correct node)");
    auto* eval = app.add_subcommand("eval", "Evaluate a formula over the run universe");
    addCommon(eval, c);
    eval->add_option("--formula", formula, "Formula in prefix syntax")->required();
    eval->add_option("--expect", expect, "all-true | all-false | R@T true|false");
    auto* dot = app.add_subcommand("dot", "Write the causal graph with cone/buffer/masses coloring");
    addCommon(dot, c);
    dot->add_option("--theta", theta, "Node a@t")->required();
    auto* part = app.add_subcommand("partition", "Print the cone, buffer and masses of a node");
    addCommon(part, c);
    part->add_option("--theta", theta, "Node a@t")->required();
    auto* vat = app.add_subcommand("vat", "Build and check brain-in-a-vat runs");
    addCommon(vat, c);
    vat->add_option("--agent", agent, "Victim agent");
    vat->add_option("--time", time, "Time of the mirrored point, or 'all'");
    auto* multipede = app.add_subcommand("multipede", "Multipede conditions for an occurrence");
    addCommon(multipede, c);
    multipede->add_option("--theta", theta, "Node a@t")->required();
    multipede->add_option("--hap", hap, "Local hap, e.g. ext(o) or send(2, m, 0)")->required();
    multipede->add_flag("--bounded", bounded, "Check the bounded structure over the universe");
    multipede->add_option("--expect", expect, "true | false | satisfied | violated");
    auto* replay = app.add_subcommand("replay", "Replay a dumped run against the scenario");
    addCommon(replay, c);
    replay->add_option("dump", dump, "Run dump written by simulate")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (run->parsed()) {
            ScenarioRunner runner(loadScenario(c.scenario, c.overrides()));
            return report(runner.scenario().name, c.out, runner.executeAll());
        }
        if (simulate->parsed()) return single(c, "simulate", false);
        if (enumerate->parsed())
            return single(c, "enumerate" + (atLeast ? " at-least " + std::to_string(atLeast) : ""), false);
        if (lemma5->parsed()) return single(c, "verify-lemma5 " + (theta.empty() ? "all" : theta), false);
        if (eval->parsed()) {
            std::string text = "eval " + formula;
            if (!expect.empty()) {
                text += " expect " + expect;
            } else {
                // Fall back on the scenario's own assertion for the same formula.
                const Scenario sc = loadScenario(c.scenario, c.overrides());
                const auto wanted = render(parseFormula(formula));
                for (const auto& q : sc.queries)
                    if (q.kind == Query::Kind::Eval && render(q.formula) == wanted) {
                        text = q.text;
                        break;
                    }
            }
            return single(c, text, true);
        }
        if (dot->parsed() || part->parsed()) return single(c, "partition " + theta, false);
        if (vat->parsed()) return single(c, "vat " + std::to_string(agent) + " " + time, false);
        if (multipede->parsed()) {
            std::string text = std::string(bounded ? "multipede-bounded " : "multipede-necessary ") + theta +
                               " " + hap;
            if (!expect.empty()) text += " expect " + expect;
            return single(c, text, bounded);
        }
        if (replay->parsed()) {
            const Scenario sc = loadScenario(c.scenario, c.overrides());
            const Run r = parseRunDump(slurp(dump), sc.ctx.alphabet);
            const auto rep = replayRun(sc.ctx, r);
            std::cout << (rep.pass() ? "PASS" : "FAIL") << "  replay " << dump << "  -- filters "
                      << (rep.filtersReproduce ? "reproduce" : "differ") << ", choices "
                      << (rep.choicesReproduce ? "reproduce" : "differ") << "\n"
                      << rep.detail;
            return rep.pass() ? 0 : 1;
        }
    } catch (const ParseError& e) {
        std::cerr << c.scenario << ":" << e.what() << "\n";
        return kUsage;
    } catch (const ValidationError& e) {
        std::cerr << c.scenario << ": " << e.what() << "\n";
        return kUsage;
    } catch (const AlphabetError& e) {
        std::cerr << c.scenario << ": " << e.what() << "\n";
        return kUsage;
    } catch (const ResourceError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kUsage;
}
