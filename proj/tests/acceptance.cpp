// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "byzcone/epistemic.hpp"
#include "byzcone/surgery.hpp"
#include "byzcone/trace.hpp"
#include "byzcone/transition.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace byzcone;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void fail(const std::string& what) {
        pass = false;
        if (failures.size() < 5) failures.push_back(what);
    }
};

std::string name(const fs::path& p) { return p.stem().string(); }

std::vector<LocalHap> eventHaps(const Alphabet& ab) {
    std::vector<LocalHap> out;
    for (const auto& e : ab.extEvents()) out.push_back(LocalExtEvent{e});
    for (AgentId j : ab.allAgents())
        for (const auto& m : ab.messages()) out.push_back(LocalRecv{j, m});
    return out;
}

InterpretedSystem systemOf(const fs::path& path) {
    ScenarioRunner runner(loadScenario(path));
    runner.executeAll();
    return runner.system();
}

bool allFalse(const TruthTable& t) {
    for (const auto& row : t)
        for (bool v : row)
            if (v) return false;
    return true;
}

bool allTrue(const TruthTable& t) {
    for (const auto& row : t)
        for (bool v : row)
            if (!v) return false;
    return true;
}

// 1. Every round of every base run is the oracle's filtered image of its proposals.
Outcome filterOracle() {
    Outcome v;
    std::size_t rounds = 0, mismatches = 0;
    for (const auto& path : support::corpusPaths()) {
        const auto sc = loadScenario(path);
        for (const auto& run : support::baseRuns(sc))
            for (Timestamp m = 0; m < run.time(); ++m) {
                const auto& tr = run.round(m);
                const auto expected = oracle::filterEnv(run.state(m).envRecords, tr.alphaEnv, tr.alphaAgents,
                                                        sc.ctx.faultBound, run.agents());
                bool ok = tr.betaEnv == expected;
                for (AgentId i : sc.ctx.alphabet.allAgents()) {
                    const bool go = expected.count(GlobalHap{Go{i}}) > 0;
                    ok = ok && tr.betaAgents[i.index()] == (go ? tr.alphaAgents[i.index()] : HapSet{});
                }
                if (!ok) {
                    ++mismatches;
                    v.fail(name(path) + " round " + std::to_string(m));
                }
                ++rounds;
            }
    }
    if (rounds < 1000) v.fail("only " + std::to_string(rounds) + " rounds");
    v.detail = std::to_string(rounds) + " rounds, " + std::to_string(mismatches) + " mismatches";
    return v;
}

// 2. (A)-(F) for the cone-equivalent adjustment of every correct node of every base run.
Outcome lemma5() {
    Outcome v;
    std::size_t nodes = 0, failures = 0;
    for (const auto& path : support::corpusPaths()) {
        const auto sc = loadScenario(path);
        const auto& ab = sc.ctx.alphabet;
        for (const auto& base : support::baseRuns(sc))
            for (AgentId i : ab.allAgents())
                for (Timestamp t = 0; t <= base.time(); ++t) {
                    if (!base.nodeCorrect(i, t)) continue;
                    const Node theta{i, t};
                    const auto run = applyAdjustment(sc.ctx, base, coneAdjustment(ab, base, theta));
                    const auto witnesses = constructWitnessAlphas(sc.ctx, base, theta, run);
                    const auto report = verifyConeEquivalence(sc.ctx, base, theta, run, witnesses);
                    ++nodes;
                    if (!report.pass()) {
                        ++failures;
                        v.fail(name(path) + " " + toString(theta));
                    }
                }
    }
    v.detail = std::to_string(nodes) + " nodes, " + std::to_string(failures) + " failures";
    return v;
}

// 3. Ghost receive on the cone boundary: Chatter certifies (F), an exact copy does not.
Outcome ghost() {
    Outcome v;
    const auto sc = support::corpus("ghost");
    ScenarioRunner runner(sc);
    const auto& base = runner.scripted();
    const Node theta{AgentId(3), 3};
    const auto& ab = sc.ctx.alphabet;
    const auto chatter = applyAdjustment(sc.ctx, base, coneAdjustment(ab, base, theta));
    const auto copy = applyAdjustment(sc.ctx, base, coneAdjustment(ab, base, theta, ConeCopy::ExactCopy));
    const bool withChatter = verifyConeEquivalence(sc.ctx, base, theta, chatter).get('F').pass;
    const bool withCopy = verifyConeEquivalence(sc.ctx, base, theta, copy).get('F').pass;
    if (!withChatter) v.fail("Chatter fails (F)");
    if (withCopy) v.fail("exact copy passes (F)");
    v.detail = std::string("Chatter (F) ") + (withChatter ? "pass" : "fail") + ", exact copy (F) " +
               (withCopy ? "pass" : "fail");
    return v;
}

// 4. With vat runs in the universe a gullible victim never knows a correct
// occurrence nor its own correctness.
Outcome vat() {
    Outcome v;
    std::size_t points = 0;
    std::vector<std::string> victims;
    for (const auto& path : support::corpusPaths()) {
        const auto sc = loadScenario(path);
        const auto& ab = sc.ctx.alphabet;
        if (sc.ctx.faultBound < 1) continue;
        const auto base = support::baseRuns(sc);
        for (AgentId victim : ab.allAgents()) {
            if (!checkAgentType(ab, sc.ctx.env, victim, AgentType::Gullible, sc.ctx.horizon)) continue;
            bool othersDelayable = true;
            for (AgentId j : ab.allAgents())
                if (j != victim)
                    othersDelayable =
                        othersDelayable && checkAgentType(ab, sc.ctx.env, j, AgentType::Delayable, sc.ctx.horizon);
            if (!othersDelayable) continue;
            victims.push_back(name(path) + ":" + std::to_string(victim.value));
            InterpretedSystem sys(ab, base);
            for (const auto& b : base)
                for (Timestamp t = 0; t <= b.time(); ++t) sys.addRun(brainInVat(sc.ctx, b, victim, t).run);
            points += sys.pointCount();
            std::vector<FormulaPtr> goals{f::knows(victim, f::correct(victim))};
            for (const auto& o : eventHaps(ab)) goals.push_back(f::knows(victim, f::occurredCorrectly(o)));
            for (const auto& g : goals)
                if (!allFalse(sys.evaluate(g))) v.fail(name(path) + " " + render(g));
        }
    }
    if (victims.empty()) v.fail("no qualifying victim");
    std::string list;
    for (const auto& x : victims) list += (list.empty() ? "" : " ") + x;
    v.detail = "victims " + list + ", " + std::to_string(points) + " points";
    return v;
}

// 5. Occurrences all outside the cone defeat hope once the cone-adjusted run is
// present; over a universe holding every seeded run and its cone adjustment,
// hope never outruns the necessary condition.
Outcome hope() {
    Outcome v;
    std::size_t premises = 0, hopeful = 0;
    for (const auto& path : support::corpusPaths()) {
        const auto sc = loadScenario(path);
        const auto& ab = sc.ctx.alphabet;
        for (const auto& base : support::baseRuns(sc))
            for (AgentId i : ab.allAgents())
                for (Timestamp t = 0; t <= base.time(); ++t) {
                    if (!base.nodeCorrect(i, t)) continue;
                    const Node theta{i, t};
                    std::optional<InterpretedSystem> sys;
                    for (const auto& o : eventHaps(ab)) {
                        if (!checkTheorem2Premise(ab, base, theta, o)) continue;
                        if (!sys) {
                            sys.emplace(ab, RunUniverse{base});
                            sys->addRun(applyAdjustment(sc.ctx, base, coneAdjustment(ab, base, theta)));
                        }
                        ++premises;
                        if (evalHope(*sys, 0, t, i, f::occurredCorrectly(o)))
                            v.fail(name(path) + " " + toString(theta) + " " + render(o));
                    }
                }
    }

    for (const std::string scn : {"chain", "relay3", "investigators", "ping"}) {
        const auto sc = support::corpus(scn);
        const auto& ab = sc.ctx.alphabet;
        const int f = sc.ctx.faultBound;
        ScenarioRunner runner(sc);
        const auto base = runner.scripted();
        for (AgentId i : ab.allAgents())
            for (Timestamp t = 1; t <= base.time(); ++t) {
                const Node theta{i, t};
                if (!base.nodeCorrect(i, t)) continue;
                InterpretedSystem sys(ab, {base});
                std::set<AgentId> byz;
                for (const auto& n : oracle::partitionOf(base, theta).buffer) byz.insert(n.agent);
                std::vector<AgentId> pool;
                for (AgentId j : ab.allAgents())
                    if (j != i && !byz.count(j)) pool.push_back(j);
                const int need = f - static_cast<int>(byz.size());
                for (unsigned mask = 0; mask < (1u << pool.size()); ++mask) {
                    if (__builtin_popcount(mask) != need) continue;
                    std::set<AgentId> seeded = byz;
                    for (std::size_t k = 0; k < pool.size(); ++k)
                        if (mask & (1u << k)) seeded.insert(pool[k]);
                    const auto rs = seedFaults(sc.ctx, base, theta, seeded).run;
                    sys.addRun(rs);
                    if (rs.nodeCorrect(i, t)) sys.addRun(applyAdjustment(sc.ctx, rs, coneAdjustment(ab, rs, theta)));
                }
                for (const auto& o : eventHaps(ab)) {
                    if (!evalHope(sys, 0, t, i, f::occurredCorrectly(o))) continue;
                    ++hopeful;
                    if (!oracle::theorem3Satisfied(base, theta, o, f))
                        v.fail("converse " + scn + " " + toString(theta) + " " + render(o));
                }
            }
    }
    if (premises == 0 || hopeful == 0) v.fail("vacuous");
    v.detail = std::to_string(premises) + " premises defeated, " + std::to_string(hopeful) +
               " hopeful verdicts within the condition";
    return v;
}

// 6. Investigators: condition satisfied. Chain with o only at agent 1: violated.
Outcome theorem3() {
    Outcome v;
    const LocalHap o = LocalExtEvent{"o"};
    const auto inv = support::corpus("investigators");
    ScenarioRunner invRunner(inv);
    const Node invTheta{AgentId(5), 4};
    const auto invRep = checkTheorem3Necessary(inv.ctx.alphabet, invRunner.scripted(), invTheta, o, inv.ctx.faultBound);
    const bool invOracle = oracle::theorem3Satisfied(invRunner.scripted(), invTheta, o, inv.ctx.faultBound);
    if (!invRep.satisfied() || !invOracle) v.fail("investigators not satisfied");

    const auto chain = support::corpus("chain");
    ScenarioRunner chainRunner(chain);
    const Node chainTheta{AgentId(3), 4};
    const auto chainRep =
        checkTheorem3Necessary(chain.ctx.alphabet, chainRunner.scripted(), chainTheta, o, chain.ctx.faultBound);
    const bool chainOracle = oracle::theorem3Satisfied(chainRunner.scripted(), chainTheta, o, chain.ctx.faultBound);
    if (chainRep.satisfied() || chainOracle) v.fail("chain not violated");
    v.detail = std::string("investigators ") + (invRep.satisfied() ? "satisfied" : "violated") + ", chain " +
               (chainRep.satisfied() ? "satisfied" : "violated") + ", oracle agrees";
    return v;
}

// 7. Hope axioms, K with T/4/5, and the localized Occurred_i(o) validities on
// every corpus universe, with K checked against a scan of the points.
Outcome axioms() {
    Outcome v;
    std::size_t checks = 0;
    for (const auto& path : support::corpusPaths()) {
        const auto sys = systemOf(path);
        const auto& ab = sys.alphabet();
        std::vector<FormulaPtr> stock{f::truth(), f::falsity()};
        for (AgentId i : ab.allAgents()) {
            stock.push_back(f::correct(i));
            for (const auto& o : eventHaps(ab)) stock.push_back(f::occurred(i, o));
        }
        for (const auto& o : eventHaps(ab)) stock.push_back(f::occurredCorrectly(o));
        const std::size_t n = stock.size();
        for (std::size_t k = 0; k < n; ++k) stock.push_back(f::lnot(stock[k]));

        const bool scan = ab.agents() <= 4;
        for (const auto& phi : stock)
            for (AgentId i : ab.allAgents()) {
                const auto c = f::correct(i);
                const FormulaPtr valid[] = {
                    f::implies(c, f::implies(f::hope(i, phi), phi)),
                    f::implies(f::lnot(c), f::hope(i, phi)),
                    f::hope(i, c),
                    f::implies(f::knows(i, phi), phi),
                    f::implies(f::knows(i, phi), f::knows(i, f::knows(i, phi))),
                    f::implies(f::lnot(f::knows(i, phi)), f::knows(i, f::lnot(f::knows(i, phi)))),
                };
                for (const auto& g : valid) {
                    ++checks;
                    if (!allTrue(sys.evaluate(g))) v.fail(name(path) + " " + render(g));
                }
                if (scan) {
                    ++checks;
                    if (sys.evaluate(f::knows(i, phi)) != oracle::knowsTable(sys, sys.evaluate(phi), i))
                        v.fail(name(path) + " K scan " + render(phi));
                }
            }
        for (AgentId i : ab.allAgents())
            for (const auto& o : eventHaps(ab)) {
                const auto occ = f::occurred(i, o);
                checks += 2;
                if (!checkLocalized(sys, occ, i)) v.fail(name(path) + " not localized " + render(occ));
                if (sys.evaluate(f::knows(i, occ)) != sys.evaluate(occ))
                    v.fail(name(path) + " K differs " + render(occ));
            }
    }
    v.detail = std::to_string(checks) + " validities checked";
    return v;
}

std::map<std::string, std::string> readTree(const fs::path& root) {
    std::map<std::string, std::string> out;
    if (!fs::exists(root)) return out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), root).string()] = s.str();
    }
    return out;
}

int cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + BYZCONE_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

// 8. Two CLI executions of the corpus write identical files, and dumped runs
// replay to the same β-sets.
Outcome determinism() {
    Outcome v;
    const auto root = fs::temp_directory_path() / "byzcone-acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    std::size_t files = 0, replays = 0;
    for (const auto& path : support::corpusPaths()) {
        const std::string scn = name(path);
        std::map<std::string, std::string> trees[2];
        for (int k = 0; k < 2; ++k) {
            const auto out = root / (scn + "-" + std::to_string(k));
            const int rc = cli("run " + quoted(path) + " --out " + quoted(out), root / "log.txt");
            if (rc != 0) v.fail(scn + " run exit " + std::to_string(rc));
            trees[k] = readTree(out);
        }
        if (trees[0].empty() || trees[0] != trees[1]) v.fail(scn + " outputs differ");
        files += trees[0].size();

        const auto sc = loadScenario(path);
        for (const auto& [rel, text] : trees[0]) {
            if (rel.rfind("traces/", 0) != 0) continue;
            const auto back = parseRunDump(text, sc.ctx.alphabet);
            if (dumpRun(back) != text) v.fail(scn + " " + rel + " does not round-trip");
            ++replays;
        }

        const auto simOut = root / (scn + "-sim");
        if (cli("simulate " + quoted(path) + " --out " + quoted(simOut), root / "log.txt") != 0)
            v.fail(scn + " simulate");
        const auto dump = simOut / "traces" / (sc.name + ".run");
        if (cli("replay " + quoted(path) + " " + quoted(dump), root / "log.txt") != 0) v.fail(scn + " replay");
        std::ifstream in(dump, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        ScenarioRunner runner(sc);
        if (!sameBetaSets(parseRunDump(s.str(), sc.ctx.alphabet), runner.scripted()))
            v.fail(scn + " replayed β-sets differ");
        ++replays;
    }
    fs::remove_all(root);
    v.detail = std::to_string(files) + " files identical, " + std::to_string(replays) + " dumps replayed";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"filter-oracle equivalence", filterOracle},
        {"cone equivalence (A)-(F) on every correct node", lemma5},
        {"ghost messages removed by Chatter", ghost},
        {"brain in a vat defeats knowledge", vat},
        {"occurrences outside the cone defeat hope", hope},
        {"multipede necessary condition verdicts", theorem3},
        {"hope axioms and introspection", axioms},
        {"determinism and replay", determinism},
    };
    bool all = true;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        const auto secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "AC" << k + 1 << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[k].first << "  -- "
                  << v.detail << " (" << std::fixed << std::setprecision(1) << secs << "s)\n";
        for (const auto& f : v.failures) std::cout << "    " << f << "\n";
        std::cout.flush();
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
