#include "byzcone/trace.hpp"

#include <algorithm>
#include <sstream>

#include "byzcone/hap_text.hpp"

namespace byzcone {

std::string dumpRun(const Run& run) {
    std::ostringstream out;
    out << "run " << run.agents() << " " << run.time() << "\n";
    out << "initial";
    for (const auto& s : run.initial()) out << " " << s;
    out << "\n";
    for (Timestamp m = 0; m < run.time(); ++m) {
        const auto& r = run.round(m);
        out << "round " << m << " " << (r.surgical ? "surgical" : "transitional") << " choice "
            << r.choice.env;
        for (auto k : r.choice.agents) out << " " << k;
        out << "\n";
        out << "  alpha-env " << render(r.alphaEnv) << "\n";
        for (std::size_t k = 0; k < r.alphaAgents.size(); ++k)
            out << "  alpha " << k + 1 << " " << render(r.alphaAgents[k]) << "\n";
        out << "  beta-env " << render(r.betaEnv) << "\n";
        for (std::size_t k = 0; k < r.betaAgents.size(); ++k)
            out << "  beta " << k + 1 << " " << render(r.betaAgents[k]) << "\n";
    }
    out << "end\n";
    return out.str();
}

Run parseRunDump(std::string_view text, const Alphabet& ab) {
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    auto next = [&]() -> Cursor {
        while (std::getline(in, line)) {
            ++number;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return Cursor(line, number);
        }
        throw ParseError("unexpected end of run dump", number, 1);
    };

    Cursor head = next();
    if (head.word() != "run") head.fail("expected 'run'");
    const int agents = head.integer();
    const int rounds = head.integer();
    if (agents != ab.agents()) head.fail("run dump agent count differs from the scenario");

    Cursor init = next();
    if (init.word() != "initial") init.fail("expected 'initial'");
    GlobalInitialState initial;
    while (!init.atEnd()) initial.push_back(init.label());
    if (static_cast<int>(initial.size()) != agents) init.fail("one initial state per agent expected");

    Run run(initial, agents);
    for (int m = 0; m < rounds; ++m) {
        Cursor c = next();
        if (c.word() != "round" || c.integer() != m) c.fail("expected 'round " + std::to_string(m) + "'");
        RoundTrace trace;
        const std::string kind = c.word();
        if (kind != "surgical" && kind != "transitional") c.fail("expected surgical or transitional");
        trace.surgical = kind == "surgical";
        c.expect("choice");
        trace.choice.env = static_cast<std::size_t>(c.integer());
        while (!c.atEnd()) trace.choice.agents.push_back(static_cast<std::size_t>(c.integer()));

        auto field = [&](const std::string& expected, int agent) {
            Cursor f = next();
            if (f.word() != expected) f.fail("expected '" + expected + "'");
            if (agent > 0 && f.integer() != agent) f.fail("agents out of order");
            HapSet s = parseHapSet(f, ab);
            if (!f.atEnd()) f.fail("trailing input");
            return s;
        };
        trace.alphaEnv = field("alpha-env", 0);
        for (int k = 1; k <= agents; ++k) trace.alphaAgents.push_back(field("alpha", k));
        trace.betaEnv = field("beta-env", 0);
        for (int k = 1; k <= agents; ++k) trace.betaAgents.push_back(field("beta", k));
        run.appendRound(ab, std::move(trace));
    }
    Cursor tail = next();
    if (tail.word() != "end") tail.fail("expected 'end'");
    return run;
}

ReplayReport replayRun(const AgentContext& ctx, const Run& dumped) {
    ReplayReport rep;
    for (Timestamp m = 0; m < dumped.time(); ++m) {
        const auto& r = dumped.round(m);
        if (r.surgical) continue;
        const HapSet env = filterEnv(dumped.state(m), r.alphaEnv, r.alphaAgents, ctx.faultBound);
        bool same = env == r.betaEnv;
        for (int k = 1; k <= ctx.agents() && same; ++k)
            same = filterAgent(AgentId(k), r.alphaAgents, env) == r.betaAgents.at(static_cast<std::size_t>(k - 1));
        if (!same && rep.filtersReproduce) {
            rep.filtersReproduce = false;
            rep.detail += "round " + std::to_string(m) + ": filters do not reproduce the beta-sets\n";
        }
    }
    if (dumped.hasSurgicalPrefix()) {
        rep.choicesReproduce = false;
        rep.detail += "run has uncertified surgical rounds; choices not replayable\n";
        return rep;
    }
    auto it = std::find(ctx.initialStates.begin(), ctx.initialStates.end(), dumped.initial());
    if (it == ctx.initialStates.end()) {
        rep.choicesReproduce = false;
        rep.detail += "initial state not declared by the scenario\n";
        return rep;
    }
    AdversaryScript script;
    script.initial = static_cast<std::size_t>(it - ctx.initialStates.begin());
    for (const auto& r : dumped.rounds()) script.rounds.push_back(r.choice);
    try {
        const Run again = runScript(ctx, script, dumped.time());
        if (!sameBetaSets(again, dumped)) {
            rep.choicesReproduce = false;
            rep.detail += "replayed choices produce different beta-sets\n";
        }
    } catch (const ChoiceError& e) {
        rep.choicesReproduce = false;
        rep.detail += std::string("replay choice rejected: ") + e.what() + "\n";
    }
    return rep;
}

}  // namespace byzcone
