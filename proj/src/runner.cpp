#include "byzcone/runner.hpp"

#include <fstream>
#include <sstream>

#include "byzcone/trace.hpp"

namespace byzcone {

std::string toString(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Info: return "INFO";
    }
    return "?";
}

namespace {

std::string nodeSet(const std::set<Node>& nodes) {
    std::string out = "{";
    bool first = true;
    for (const auto& n : nodes) {
        out += (first ? "" : ", ") + toString(n);
        first = false;
    }
    return out + "}";
}

std::string agentList(const std::set<AgentId>& agents) {
    std::string out;
    for (auto a : agents) out += (out.empty() ? "" : " ") + std::to_string(a.value);
    return out.empty() ? "-" : out;
}

std::string histories(const Run& run, Timestamp t) {
    std::ostringstream out;
    for (int k = 1; k <= run.agents(); ++k) {
        const auto& h = run.localHistory(AgentId(k), t);
        out << "  r_" << k << "(" << t << ") = " << h.initial;
        for (const auto& rec : h.records) out << " | " << render(rec);
        out << "\n";
    }
    return out.str();
}

std::vector<std::set<AgentId>> subsetsOfSize(const std::vector<AgentId>& pool, std::size_t k) {
    std::vector<std::set<AgentId>> out;
    const std::size_t n = pool.size();
    if (k > n) return out;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
        std::set<AgentId> s;
        for (std::size_t i = 0; i < n; ++i)
            if (pick[i]) s.insert(pool[i]);
        out.push_back(std::move(s));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
}

}  // namespace

ScenarioRunner::ScenarioRunner(Scenario scenario) : scenario_(std::move(scenario)) {}

const Run& ScenarioRunner::scripted() {
    if (!scripted_) {
        const auto& ctx = scenario_.ctx;
        AdversaryScript script = scenario_.script;
        if (scenario_.seed && script.rounds.empty())
            script = randomScript(ctx, *scenario_.seed, ctx.horizon);
        scripted_ = runScript(ctx, script, ctx.horizon);
    }
    return *scripted_;
}

InterpretedSystem& ScenarioRunner::system() {
    if (!system_) {
        RunUniverse universe{scripted()};
        if (scenario_.enumerateUniverse) {
            for (auto& r : enumerateRuns(scenario_.ctx, scenario_.budget))
                if (!sameBetaSets(r, universe.front())) universe.push_back(std::move(r));
        }
        baseRuns_ = universe.size();
        system_.emplace(scenario_.ctx.alphabet, std::move(universe));
    }
    return *system_;
}

std::size_t ScenarioRunner::baseRuns() {
    system();
    return baseRuns_;
}

QueryOutcome ScenarioRunner::verifyLemma5(const Query& q) {
    const auto& ctx = scenario_.ctx;
    const Run& base = scripted();
    QueryOutcome out{q, Verdict::Pass, "", "", {}};
    std::vector<Node> thetas;
    if (q.all) {
        for (int k = 1; k <= ctx.agents(); ++k)
            for (Timestamp t = 0; t <= base.time(); ++t)
                if (base.nodeCorrect(AgentId(k), t)) thetas.push_back(Node{AgentId(k), t});
    } else {
        thetas.push_back(*q.theta);
    }
    int passed = 0;
    std::ostringstream rep;
    for (const auto& theta : thetas) {
        if (!nodeCorrect(base, theta)) {
            out.verdict = Verdict::Fail;
            rep << "theta " << toString(theta) << " is not correct in the scripted run\n";
            continue;
        }
        const Run adjusted = applyAdjustment(ctx, base, coneAdjustment(ctx.alphabet, base, theta));
        const auto report = verifyConeEquivalence(ctx, base, theta, adjusted);
        rep << renderReport(report) << "\n";
        if (report.pass()) ++passed;
        else out.verdict = Verdict::Fail;
    }
    out.summary = std::to_string(passed) + "/" + std::to_string(thetas.size()) + " thetas pass (A)-(F)";
    out.report = rep.str();
    return out;
}

QueryOutcome ScenarioRunner::vat(const Query& q) {
    const auto& ctx = scenario_.ctx;
    const Run& base = scripted();
    QueryOutcome out{q, Verdict::Pass, "", "", {}};
    if (ctx.faultBound < 1) {
        out.verdict = Verdict::Fail;
        out.summary = "precondition: f = 0 leaves no byzantine budget";
        return out;
    }
    std::vector<Timestamp> times;
    if (q.all)
        for (Timestamp t = 0; t <= base.time(); ++t) times.push_back(t);
    else
        times.push_back(q.time);
    std::ostringstream rep;
    int good = 0;
    for (Timestamp t : times) {
        const auto res = brainInVat(ctx, base, q.agent, t);
        const bool same = localStateEqual(base, t, res.run, res.witnessTime, q.agent);
        bool silent = true;
        bool othersInitial = true;
        for (Timestamp m = 0; m < res.witnessTime; ++m) {
            for (const auto& h : res.run.betaEnv(m))
                if (isCorrectEvent(h)) silent = false;
            for (int k = 1; k <= ctx.agents(); ++k) {
                if (!res.run.betaAgent(AgentId(k), m).empty()) silent = false;
                if (AgentId(k) != q.agent && !res.run.localHistory(AgentId(k), m + 1).records.empty())
                    othersInitial = false;
            }
        }
        const bool ok = res.transitional && same && silent && othersInitial;
        rep << "t=" << t << " witness point " << res.witnessTime << ": transitional "
            << (res.transitional ? "yes" : "no") << ", victim state equal " << (same ? "yes" : "no")
            << ", no correct haps " << (silent ? "yes" : "no") << ", others initial "
            << (othersInitial ? "yes" : "no") << "\n";
        if (ok) ++good;
        else out.verdict = Verdict::Fail;
        if (!q.all)
            out.artifacts.emplace_back("traces/vat-" + std::to_string(q.agent.value) + "-" +
                                           std::to_string(t) + ".run",
                                       dumpRun(res.run));
    }
    out.summary = std::to_string(good) + "/" + std::to_string(times.size()) + " vat runs certified";
    out.report = rep.str();
    return out;
}

QueryOutcome ScenarioRunner::augment(const Query& q) {
    const auto& ctx = scenario_.ctx;
    auto& sys = system();
    const std::size_t base = baseRuns();
    QueryOutcome out{q, Verdict::Info, "", "", {}};
    std::size_t added = 0;
    std::size_t rejected = 0;
    if (q.kind == Query::Kind::AugmentVat) {
        if (ctx.faultBound < 1) {
            out.verdict = Verdict::Fail;
            out.summary = "precondition: f = 0 leaves no byzantine budget";
            return out;
        }
        for (std::size_t r = 0; r < base; ++r) {
            const Run src = sys.run(r);
            for (Timestamp t = 0; t <= src.time(); ++t) {
                auto res = brainInVat(ctx, src, q.agent, t);
                if (res.transitional) {
                    sys.addRun(std::move(res.run));
                    ++added;
                } else {
                    ++rejected;
                }
            }
        }
    } else {
        const Node theta = *q.theta;
        auto addCone = [&](const Run& src) {
            Run adjusted = applyAdjustment(ctx, src, coneAdjustment(ctx.alphabet, src, theta));
            const auto w = constructWitnessAlphas(ctx, src, theta, adjusted);
            if (checkWitness(ctx, adjusted, w)) {
                ++rejected;
            } else {
                certifyRun(adjusted, w);
                sys.addRun(std::move(adjusted));
                ++added;
            }
        };
        for (std::size_t r = 0; r < base; ++r) {
            const Run src = sys.run(r);
            if (!nodeCorrect(src, theta)) continue;
            addCone(src);
            if (q.kind != Query::Kind::AugmentSeeded) continue;
            const auto part = partition(ctx.alphabet, src, theta);
            std::set<AgentId> byz;
            for (const auto& n : part.buffer) byz.insert(n.agent);
            if (static_cast<int>(byz.size()) > ctx.faultBound) continue;
            std::vector<AgentId> pool;
            for (AgentId a : ctx.alphabet.allAgents())
                if (a != theta.agent && !byz.count(a)) pool.push_back(a);
            const std::size_t k = static_cast<std::size_t>(ctx.faultBound) - byz.size();
            for (auto s : subsetsOfSize(pool, k)) {
                s.insert(byz.begin(), byz.end());
                auto seeded = seedFaults(ctx, src, theta, s);
                if (seeded.transitional) {
                    if (nodeCorrect(seeded.run, theta)) addCone(seeded.run);
                    sys.addRun(std::move(seeded.run));
                    ++added;
                } else {
                    ++rejected;
                }
            }
        }
    }
    out.summary = std::to_string(added) + " runs added, " + std::to_string(rejected) +
                  " uncertified constructions skipped";
    out.report = out.summary + "\nuniverse size " + std::to_string(sys.universe().size()) + "\n";
    return out;
}

QueryOutcome ScenarioRunner::execute(const Query& q) {
    const auto& ctx = scenario_.ctx;
    const auto& ab = ctx.alphabet;
    using K = Query::Kind;
    QueryOutcome out{q, Verdict::Info, "", "", {}};
    switch (q.kind) {
        case K::Simulate: {
            const Run& r = scripted();
            out.summary = "scripted run of " + std::to_string(r.time()) + " rounds, faulty agents " +
                          agentList(r.faultyBy(r.time()));
            out.report = histories(r, r.time());
            out.artifacts.emplace_back("traces/" + scenario_.name + ".run", dumpRun(r));
            return out;
        }
        case K::Enumerate: {
            const auto n = enumerateRuns(ctx, scenario_.budget).size();
            out.summary = std::to_string(n) + " admissible runs of length " + std::to_string(ctx.horizon);
            out.report = out.summary + "\n";
            if (q.atLeast > 0) out.verdict = n >= q.atLeast ? Verdict::Pass : Verdict::Fail;
            return out;
        }
        case K::Partition: {
            const Run& r = scripted();
            const auto g = buildCausalGraph(ab, r);
            const auto p = partition(r, g, *q.theta);
            std::set<AgentId> bufferAgents;
            for (const auto& n : p.buffer) bufferAgents.insert(n.agent);
            std::ostringstream rep;
            rep << "theta " << toString(p.theta) << "\ncone " << nodeSet(p.cone) << "\nbuffer "
                << nodeSet(p.buffer) << "\nmasses " << nodeSet(p.masses) << "\nbuffer agents "
                << agentList(bufferAgents) << "\n";
            out.report = rep.str();
            out.summary = std::to_string(p.cone.size()) + " cone, " + std::to_string(p.buffer.size()) +
                          " buffer, " + std::to_string(p.masses.size()) + " masses nodes";
            out.artifacts.emplace_back("graphs/" + scenario_.name + "-" + toString(p.theta) + ".dot",
                                       toDot(g, p));
            if (q.checkBuffer)
                out.verdict = bufferAgents == std::set<AgentId>(q.bufferAgents.begin(), q.bufferAgents.end())
                                  ? Verdict::Pass
                                  : Verdict::Fail;
            return out;
        }
        case K::Adjust: {
            const Run& r = scripted();
            const auto adj = coneAdjustment(ab, r, *q.theta);
            const Run adjusted = applyAdjustment(ctx, r, adj);
            out.summary = "adjustment of " + std::to_string(adj.size()) + " rounds";
            out.report = renderAdjustment(adj);
            out.artifacts.emplace_back("traces/" + scenario_.name + "-adjusted-" + toString(*q.theta) + ".run",
                                       dumpRun(adjusted));
            return out;
        }
        case K::VerifyLemma5: return verifyLemma5(q);
        case K::Vat: return vat(q);
        case K::AugmentVat:
        case K::AugmentCone:
        case K::AugmentSeeded: return augment(q);
        case K::Eval: {
            auto& sys = system();
            const auto table = sys.evaluate(q.formula);
            std::size_t trues = 0, total = 0;
            for (const auto& row : table)
                for (bool b : row) {
                    trues += b ? 1 : 0;
                    ++total;
                }
            out.summary = render(q.formula) + ": true at " + std::to_string(trues) + "/" +
                          std::to_string(total) + " points";
            out.report = render(q.formula) + "\n" + renderTruthTable(sys, table);
            switch (q.expect.kind) {
                case Expectation::Kind::Everywhere:
                    out.verdict = trues == total ? Verdict::Pass : Verdict::Fail;
                    break;
                case Expectation::Kind::Nowhere:
                    out.verdict = trues == 0 ? Verdict::Pass : Verdict::Fail;
                    break;
                case Expectation::Kind::At: {
                    const auto& a = q.expect.at;
                    const bool inRange = a.run < table.size() && a.time >= 0 &&
                                         static_cast<std::size_t>(a.time) < table[a.run].size();
                    out.verdict = inRange && table[a.run][static_cast<std::size_t>(a.time)] == q.expect.value
                                      ? Verdict::Pass
                                      : Verdict::Fail;
                    break;
                }
                default: break;
            }
            return out;
        }
        case K::ConeHope: {
            const Run& r = scripted();
            auto& sys = system();
            const bool premise = checkTheorem2Premise(ab, r, *q.theta, q.hap);
            const bool hope = evalHope(sys, 0, q.theta->time, q.theta->agent, f::occurredCorrectly(q.hap));
            out.summary = std::string("premise ") + (premise ? "holds" : "fails") + ", hope " +
                          (hope ? "true" : "false");
            out.report = out.summary + "\n";
            out.verdict = (!premise || !hope) ? Verdict::Pass : Verdict::Fail;
            return out;
        }
        case K::MultipedeNecessary: {
            const auto rep = checkTheorem3Necessary(ab, scripted(), *q.theta, q.hap, ctx.faultBound);
            out.report = renderTheorem3(rep);
            out.summary = std::string("necessary condition ") + (rep.satisfied() ? "satisfied" : "violated");
            if (q.expect.kind == Expectation::Kind::Bool)
                out.verdict = rep.satisfied() == q.expect.value ? Verdict::Pass : Verdict::Fail;
            return out;
        }
        case K::MultipedeBounded: {
            const bool holds = checkMultipedeBounded(system(), 0, *q.theta, q.hap);
            out.summary = std::string("bounded multipede ") + (holds ? "present" : "absent");
            out.report = out.summary + " over " + std::to_string(system().universe().size()) + " runs\n";
            if (q.expect.kind == Expectation::Kind::Bool)
                out.verdict = holds == q.expect.value ? Verdict::Pass : Verdict::Fail;
            return out;
        }
        case K::Ghost: {
            const Run& r = scripted();
            const Node theta = *q.theta;
            const Run chatter = applyAdjustment(ctx, r, coneAdjustment(ab, r, theta, ConeCopy::Chatter));
            const Run copy = applyAdjustment(ctx, r, coneAdjustment(ab, r, theta, ConeCopy::ExactCopy));
            const auto repChatter = verifyConeEquivalence(ctx, r, theta, chatter);
            const auto repCopy = verifyConeEquivalence(ctx, r, theta, copy);
            const bool okChatter = repChatter.get('F').pass;
            const bool okCopy = repCopy.get('F').pass;
            out.summary = std::string("(F) with chatter ") + (okChatter ? "pass" : "FAIL") +
                          ", with exact copy " + (okCopy ? "pass" : "FAIL");
            out.report = "chatter:\n" + renderReport(repChatter) + "\nexact copy:\n" + renderReport(repCopy);
            out.verdict = okChatter && !okCopy ? Verdict::Pass : Verdict::Fail;
            return out;
        }
    }
    return out;
}

std::vector<QueryOutcome> ScenarioRunner::executeAll() {
    std::vector<QueryOutcome> out;
    for (const auto& q : scenario_.queries) out.push_back(execute(q));
    return out;
}

std::string renderSummary(const std::string& scenarioName, const std::vector<QueryOutcome>& outcomes) {
    std::ostringstream out;
    out << "scenario " << scenarioName << "\n";
    for (const auto& o : outcomes)
        out << toString(o.verdict) << "  line " << o.query.line << "  " << o.query.text << "  -- "
            << o.summary << "\n";
    return out.str();
}

void writeOutcomes(const std::filesystem::path& out, const std::string& scenarioName,
                   const std::vector<QueryOutcome>& outcomes) {
    namespace fs = std::filesystem;
    for (const char* d : {"reports", "traces", "graphs"}) fs::create_directories(out / d);
    auto write = [](const fs::path& p, const std::string& content) {
        fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary);
        f << content;
    };
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto& o = outcomes[k];
        std::ostringstream name;
        name << scenarioName << "-" << (k + 1 < 10 ? "0" : "") << k + 1 << "-" << toString(o.query.kind)
             << ".txt";
        write(out / "reports" / name.str(),
              o.query.text + "\n" + toString(o.verdict) + ": " + o.summary + "\n\n" + o.report);
        for (const auto& [rel, content] : o.artifacts) write(out / rel, content);
    }
    write(out / "reports" / (scenarioName + "-summary.txt"), renderSummary(scenarioName, outcomes));
}

int exitCodeFor(const std::vector<QueryOutcome>& outcomes) {
    for (const auto& o : outcomes)
        if (o.verdict == Verdict::Fail) return 1;
    return 0;
}

}  // namespace byzcone
