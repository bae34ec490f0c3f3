#pragma once

// Runs: per-round α/β traces as ground truth, with the environment history,
// local histories and faulty sets derived on append.

#include <set>
#include <vector>

#include "byzcone/protocol.hpp"

namespace byzcone {

/// Indices picked in the adversary phase: one into P_ε(t), one per agent into P_i(r_i(t)).
struct AdversaryChoice {
    std::size_t env = 0;
    std::vector<std::size_t> agents;
    auto operator<=>(const AdversaryChoice&) const = default;
};

struct RoundTrace {
    HapSet alphaEnv;
    std::vector<HapSet> alphaAgents;
    HapSet betaEnv;
    std::vector<HapSet> betaAgents;
    AdversaryChoice choice;
    /// Set for rounds produced by interventions rather than the transition
    /// relation; α-sets are then absent until certified.
    bool surgical = false;
};

/// Global state (r_ε(t), r_1(t), ..., r_n(t)). Environment records are oldest first.
struct GlobalState {
    std::vector<HapSet> envRecords;
    std::vector<LocalHistory> locals;

    bool envContains(const GlobalHap& h) const;
    /// A(Failed(h)): agents with an FEvents hap anywhere in the environment record.
    std::set<AgentId> failedAgents() const;
};

class Run {
public:
    Run(GlobalInitialState initial, int agents);

    const GlobalInitialState& initial() const { return initial_; }
    int agents() const { return agents_; }
    /// Number of completed rounds; valid timestamps are 0..time().
    Timestamp time() const { return static_cast<Timestamp>(rounds_.size()); }

    const RoundTrace& round(Timestamp m) const { return rounds_.at(static_cast<std::size_t>(m)); }
    const std::vector<RoundTrace>& rounds() const { return rounds_; }
    const HapSet& betaEnv(Timestamp m) const { return round(m).betaEnv; }
    const HapSet& betaAgent(AgentId i, Timestamp m) const { return round(m).betaAgents.at(i.index()); }

    /// Applies update_ε and every update_i to the round's β-sets.
    void appendRound(const Alphabet& ab, RoundTrace trace);

    const LocalHistory& localHistory(AgentId i, Timestamp t) const;
    /// Whether round m appended a record to r_i.
    bool triggered(AgentId i, Timestamp m) const;
    GlobalState state(Timestamp t) const;

    /// Agents with an FEvents hap in β_ε before t.
    const std::set<AgentId>& faultyBy(Timestamp t) const { return faulty_.at(static_cast<std::size_t>(t)); }
    bool nodeCorrect(AgentId i, Timestamp t) const { return faultyBy(t).count(i) == 0; }

    bool hasSurgicalPrefix() const;
    /// Installs certified α-sets for a surgical round and clears its flag.
    void certifyRound(Timestamp m, HapSet alphaEnv, std::vector<HapSet> alphaAgents);

private:
    GlobalInitialState initial_;
    int agents_;
    std::vector<RoundTrace> rounds_;
    std::vector<std::vector<LocalHistory>> histories_;  // [t][agent]
    std::vector<std::vector<bool>> triggered_;          // [m][agent]
    std::vector<std::set<AgentId>> faulty_;             // [t]
};

using RunUniverse = std::vector<Run>;

/// Whether two runs carry identical β-sets (and initial state) up to their common length.
bool sameBetaSets(const Run& a, const Run& b);

}  // namespace byzcone
