#include "byzcone/transition.hpp"

#include <algorithm>
#include <random>

namespace byzcone {

HapSet filterEnvLeqF(const GlobalState& state, const HapSet& xEnv,
                     const std::vector<HapSet>& /*xAgents*/, int f) {
    std::set<AgentId> faulty = state.failedAgents();
    for (const auto& h : xEnv)
        if (inFEvents(h, ownerOf(h))) faulty.insert(ownerOf(h));
    if (static_cast<int>(faulty.size()) <= f) return xEnv;
    HapSet out;
    for (const auto& h : xEnv)
        if (!inFEvents(h, ownerOf(h))) out.insert(h);
    return out;
}

namespace {

bool hasFakeSend(const HapSet& xs, const GSend& send) {
    return std::any_of(xs.begin(), xs.end(), [&](const GlobalHap& h) {
        auto s = fakeSendOf(h);
        return s && *s == send && ownerOf(h) == send.sender;
    });
}

}  // namespace

HapSet filterEnvB(const GlobalState& state, const HapSet& xEnv, const std::vector<HapSet>& xAgents) {
    HapSet out;
    for (const auto& h : xEnv) {
        const auto* recv = std::get_if<GRecv>(&h);
        if (recv == nullptr) {
            out.insert(h);
            continue;
        }
        const GSend send{recv->sender, recv->recipient, recv->payload, recv->gmi};
        const GlobalHap sendHap = send;
        const bool sentBefore = state.envContains(sendHap);
        const bool fakedBefore = std::any_of(state.envRecords.begin(), state.envRecords.end(),
                                             [&](const HapSet& r) { return hasFakeSend(r, send); });
        const std::size_t s = send.sender.index();
        const bool sentNow = s < xAgents.size() && xAgents[s].count(sendHap) > 0 &&
                             xEnv.count(GlobalHap{Go{send.sender}}) > 0;
        const bool fakedNow = hasFakeSend(xEnv, send);
        if (sentBefore || fakedBefore || sentNow || fakedNow) out.insert(h);
    }
    return out;
}

HapSet filterEnv(const GlobalState& state, const HapSet& xEnv, const std::vector<HapSet>& xAgents,
                 int f) {
    return filterEnvB(state, filterEnvLeqF(state, xEnv, xAgents, f), xAgents);
}

HapSet filterAgent(AgentId agent, const std::vector<HapSet>& xAgents, const HapSet& betaEnv) {
    if (betaEnv.count(GlobalHap{Go{agent}}) == 0) return {};
    return xAgents.at(agent.index());
}

bool updateTriggers(const Alphabet& ab, AgentId agent, const HapSet& betaEnv) {
    for (const auto& h : betaEnv) {
        if (!inGEvents(h, agent)) continue;
        if (std::holds_alternative<Go>(h) || std::holds_alternative<Sleep>(h)) return true;
        if (localRecordOf(ab, h)) return true;
    }
    return false;
}

LocalHistory updateAgent(const Alphabet& ab, AgentId agent, const LocalHistory& history,
                         const HapSet& actions, const HapSet& betaEnv) {
    if (!updateTriggers(ab, agent, betaEnv)) return history;
    HapSet mine = eventsOf(betaEnv, agent);
    mine.insert(actions.begin(), actions.end());
    LocalHistory next = history;
    next.records.push_back(localizeSet(ab, mine));
    return next;
}

std::vector<HapSet> updateEnv(std::vector<HapSet> envRecords, const HapSet& betaEnv,
                              const std::vector<HapSet>& betaAgents) {
    HapSet record = betaEnv;
    for (const auto& a : betaAgents) record.insert(a.begin(), a.end());
    envRecords.push_back(std::move(record));
    return envRecords;
}

HapSet labelActions(const Alphabet& ab, AgentId agent, Timestamp t, const LocalSet& chosen) {
    HapSet out;
    for (const auto& a : chosen) out.insert(globalize(ab, agent, t, a));
    return out;
}

Run initialRun(const AgentContext& ctx, std::size_t initialIndex) {
    if (initialIndex >= ctx.initialStates.size())
        throw ChoiceError("initial state index " + std::to_string(initialIndex) + " out of range");
    return Run(ctx.initialStates[initialIndex], ctx.agents());
}

Run stepRound(const AgentContext& ctx, const Run& run, const AdversaryChoice& choice) {
    const Timestamp t = run.time();
    const auto& ab = ctx.alphabet;
    const auto& envRange = ctx.env.range(t);
    if (choice.env >= envRange.size())
        throw ChoiceError("t=" + std::to_string(t) + ": environment choice " +
                          std::to_string(choice.env) + " outside range of size " +
                          std::to_string(envRange.size()));
    if (choice.agents.size() != static_cast<std::size_t>(ctx.agents()))
        throw ChoiceError("one agent choice per agent is required");

    RoundTrace trace;
    trace.choice = choice;
    trace.alphaEnv = envRange[choice.env];
    for (AgentId i : ab.allAgents()) {
        const auto& range = ctx.protocol(i).range(run.localHistory(i, t));
        const std::size_t k = choice.agents[i.index()];
        if (k >= range.size())
            throw ChoiceError("t=" + std::to_string(t) + ": agent " + std::to_string(i.value) +
                              " choice " + std::to_string(k) + " outside range of size " +
                              std::to_string(range.size()));
        trace.alphaAgents.push_back(labelActions(ab, i, t, range[k]));
    }
    const GlobalState state = run.state(t);
    trace.betaEnv = filterEnv(state, trace.alphaEnv, trace.alphaAgents, ctx.faultBound);
    for (AgentId i : ab.allAgents())
        trace.betaAgents.push_back(filterAgent(i, trace.alphaAgents, trace.betaEnv));

    Run next = run;
    next.appendRound(ab, std::move(trace));
    return next;
}

AdversaryChoice minimalChoice(const AgentContext& ctx) {
    return AdversaryChoice{0, std::vector<std::size_t>(static_cast<std::size_t>(ctx.agents()), 0)};
}

Run runScript(const AgentContext& ctx, const AdversaryScript& script, Timestamp horizon) {
    Run run = initialRun(ctx, script.initial);
    for (Timestamp t = 0; t < horizon; ++t) {
        const auto idx = static_cast<std::size_t>(t);
        run = stepRound(ctx, run, idx < script.rounds.size() ? script.rounds[idx] : minimalChoice(ctx));
    }
    return run;
}

AdversaryScript randomScript(const AgentContext& ctx, std::uint64_t seed, Timestamp horizon) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    };
    AdversaryScript script;
    script.initial = pick(ctx.initialStates.size());
    Run run = initialRun(ctx, script.initial);
    for (Timestamp t = 0; t < horizon; ++t) {
        AdversaryChoice c;
        c.env = pick(ctx.env.range(t).size());
        for (AgentId i : ctx.alphabet.allAgents())
            c.agents.push_back(pick(ctx.protocol(i).range(run.localHistory(i, t)).size()));
        run = stepRound(ctx, run, c);
        script.rounds.push_back(std::move(c));
    }
    return script;
}

namespace {

struct Enumerator {
    const AgentContext& ctx;
    std::uint64_t budget;
    RunUniverse out;
    std::uint64_t leaves = 0;

    void descend(const Run& run, std::uint64_t pathProduct) {
        const Timestamp t = run.time();
        if (t == ctx.horizon) {
            if (++leaves > budget)
                throw ResourceError("run enumeration exceeded budget of " +
                                        std::to_string(budget) + " runs",
                                    pathProduct * ctx.initialStates.size());
            if (admissible(ctx, run)) out.push_back(run);
            return;
        }
        const std::size_t envCount = ctx.env.range(t).size();
        std::vector<std::size_t> sizes;
        for (AgentId i : ctx.alphabet.allAgents())
            sizes.push_back(ctx.protocol(i).range(run.localHistory(i, t)).size());
        std::uint64_t combos = envCount;
        for (auto s : sizes) combos *= s;

        AdversaryChoice c{0, std::vector<std::size_t>(sizes.size(), 0)};
        for (c.env = 0; c.env < envCount; ++c.env) {
            std::fill(c.agents.begin(), c.agents.end(), 0);
            while (true) {
                descend(stepRound(ctx, run, c), pathProduct * combos);
                std::size_t k = 0;
                while (k < sizes.size() && ++c.agents[k] == sizes[k]) c.agents[k++] = 0;
                if (k == sizes.size()) break;
            }
        }
    }
};

}  // namespace

RunUniverse enumerateRuns(const AgentContext& ctx, std::uint64_t budget) {
    Enumerator e{ctx, budget, {}, 0};
    for (std::size_t s = 0; s < ctx.initialStates.size(); ++s) e.descend(initialRun(ctx, s), 1);
    return std::move(e.out);
}

bool checkFairSchedulePrefix(const Run& run, int window) {
    const Timestamp total = run.time();
    if (window <= 0) return false;
    for (int k = 1; k <= run.agents(); ++k) {
        const AgentId i(k);
        for (Timestamp start = 0; start + window <= total; ++start) {
            bool scheduled = false;
            for (Timestamp m = start; m < start + window && !scheduled; ++m)
                for (const auto& h : run.betaEnv(m))
                    if (isSystemEvent(h) && ownerOf(h) == i) {
                        scheduled = true;
                        break;
                    }
            if (!scheduled) return false;
        }
    }
    return true;
}

bool admissible(const AgentContext& ctx, const Run& run) {
    if (ctx.admissibility.kind == Admissibility::Kind::FairSchedule)
        return checkFairSchedulePrefix(run, ctx.admissibility.window);
    return true;
}

}  // namespace byzcone
