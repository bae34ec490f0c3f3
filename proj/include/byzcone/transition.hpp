#pragma once

// The five-phase round transition (protocol, adversary, labeling, filtering,
// updating) and bounded run generation.

#include <cstdint>
#include <optional>

#include "byzcone/run.hpp"

namespace byzcone {

class ChoiceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::uint64_t estimate)
        : std::runtime_error(what), estimate_(estimate) {}
    std::uint64_t estimate() const { return estimate_; }

private:
    std::uint64_t estimate_;
};

/// filter_ε^{≤f}: drops every byzantine event if keeping them would exceed f faulty agents.
HapSet filterEnvLeqF(const GlobalState& state, const HapSet& xEnv,
                     const std::vector<HapSet>& xAgents, int f);
/// filter_ε^B: drops correct receives without a matching correct or byzantine send.
HapSet filterEnvB(const GlobalState& state, const HapSet& xEnv, const std::vector<HapSet>& xAgents);
/// filter_ε = filter_ε^B ∘ filter_ε^{≤f}.
HapSet filterEnv(const GlobalState& state, const HapSet& xEnv, const std::vector<HapSet>& xAgents,
                 int f);
/// filter_i: keeps the agent's actions iff go(i) survived.
HapSet filterAgent(AgentId agent, const std::vector<HapSet>& xAgents, const HapSet& betaEnv);

LocalHistory updateAgent(const Alphabet& ab, AgentId agent, const LocalHistory& history,
                         const HapSet& actions, const HapSet& betaEnv);
bool updateTriggers(const Alphabet& ab, AgentId agent, const HapSet& betaEnv);
std::vector<HapSet> updateEnv(std::vector<HapSet> envRecords, const HapSet& betaEnv,
                              const std::vector<HapSet>& betaAgents);

/// α_i(t) = {global(i, t)(a) | a ∈ X_i}.
HapSet labelActions(const Alphabet& ab, AgentId agent, Timestamp t, const LocalSet& chosen);

Run initialRun(const AgentContext& ctx, std::size_t initialIndex);
/// One transitional round driven by an explicit adversary choice.
Run stepRound(const AgentContext& ctx, const Run& run, const AdversaryChoice& choice);

/// The default adversary: first offered option everywhere.
AdversaryChoice minimalChoice(const AgentContext& ctx);

struct AdversaryScript {
    std::size_t initial = 0;
    std::vector<AdversaryChoice> rounds;
};

/// Runs the script, padding with the minimal choice up to `horizon`.
Run runScript(const AgentContext& ctx, const AdversaryScript& script, Timestamp horizon);
/// Seeded pseudorandom adversary; returns the script it played.
AdversaryScript randomScript(const AgentContext& ctx, std::uint64_t seed, Timestamp horizon);

/// Every weakly consistent prefix of length ctx.horizon that passes the
/// admissibility approximation. Throws ResourceError above `budget` runs.
RunUniverse enumerateRuns(const AgentContext& ctx, std::uint64_t budget = 200000);

/// Every agent has a system event in β_ε within every window-length span of rounds.
bool checkFairSchedulePrefix(const Run& run, int window);
bool admissible(const AgentContext& ctx, const Run& run);

}  // namespace byzcone
