#include "byzcone/run.hpp"

#include <algorithm>

#include "byzcone/transition.hpp"

namespace byzcone {

bool GlobalState::envContains(const GlobalHap& h) const {
    return std::any_of(envRecords.begin(), envRecords.end(),
                       [&](const HapSet& r) { return r.count(h) > 0; });
}

std::set<AgentId> GlobalState::failedAgents() const {
    std::set<AgentId> out;
    for (const auto& record : envRecords)
        for (const auto& h : record)
            if (inFEvents(h, ownerOf(h))) out.insert(ownerOf(h));
    return out;
}

Run::Run(GlobalInitialState initial, int agents) : initial_(std::move(initial)), agents_(agents) {
    std::vector<LocalHistory> start;
    for (int i = 0; i < agents_; ++i)
        start.push_back(LocalHistory{initial_.at(static_cast<std::size_t>(i)), {}});
    histories_.push_back(std::move(start));
    faulty_.emplace_back();
}

void Run::appendRound(const Alphabet& ab, RoundTrace trace) {
    if (trace.betaAgents.size() != static_cast<std::size_t>(agents_))
        trace.betaAgents.resize(static_cast<std::size_t>(agents_));
    if (trace.alphaAgents.size() != static_cast<std::size_t>(agents_))
        trace.alphaAgents.resize(static_cast<std::size_t>(agents_));
    const auto& current = histories_.back();
    std::vector<LocalHistory> next;
    std::vector<bool> trig;
    for (int k = 0; k < agents_; ++k) {
        const AgentId i(k + 1);
        next.push_back(updateAgent(ab, i, current[i.index()], trace.betaAgents[i.index()],
                                   trace.betaEnv));
        trig.push_back(updateTriggers(ab, i, trace.betaEnv));
    }
    std::set<AgentId> faulty = faulty_.back();
    for (const auto& h : trace.betaEnv)
        if (inFEvents(h, ownerOf(h))) faulty.insert(ownerOf(h));
    histories_.push_back(std::move(next));
    triggered_.push_back(std::move(trig));
    faulty_.push_back(std::move(faulty));
    rounds_.push_back(std::move(trace));
}

const LocalHistory& Run::localHistory(AgentId i, Timestamp t) const {
    return histories_.at(static_cast<std::size_t>(t)).at(i.index());
}

bool Run::triggered(AgentId i, Timestamp m) const {
    return triggered_.at(static_cast<std::size_t>(m)).at(i.index());
}

GlobalState Run::state(Timestamp t) const {
    GlobalState s;
    for (Timestamp m = 0; m < t; ++m) {
        const auto& r = round(m);
        HapSet record = r.betaEnv;
        for (const auto& a : r.betaAgents) record.insert(a.begin(), a.end());
        s.envRecords.push_back(std::move(record));
    }
    s.locals = histories_.at(static_cast<std::size_t>(t));
    return s;
}

bool Run::hasSurgicalPrefix() const {
    return std::any_of(rounds_.begin(), rounds_.end(), [](const RoundTrace& r) { return r.surgical; });
}

void Run::certifyRound(Timestamp m, HapSet alphaEnv, std::vector<HapSet> alphaAgents) {
    auto& r = rounds_.at(static_cast<std::size_t>(m));
    r.alphaEnv = std::move(alphaEnv);
    r.alphaAgents = std::move(alphaAgents);
    r.surgical = false;
}

bool sameBetaSets(const Run& a, const Run& b) {
    if (a.initial() != b.initial() || a.time() != b.time()) return false;
    for (Timestamp m = 0; m < a.time(); ++m) {
        if (a.betaEnv(m) != b.betaEnv(m)) return false;
        if (a.round(m).betaAgents != b.round(m).betaAgents) return false;
    }
    return true;
}

}  // namespace byzcone
