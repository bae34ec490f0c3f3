#pragma once

// Interventions, adjustments and the runs obtained from them: the
// cone-equivalent construction with its witness α-sets and verifier, and the
// brain-in-a-vat construction.

#include <optional>
#include <string>
#include <vector>

#include "byzcone/causal.hpp"
#include "byzcone/transition.hpp"

namespace byzcone {

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class HorizonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Intervention {
    enum class Kind { Freeze, Echo, Chatter, Vat, Custom };

    Kind kind = Kind::Freeze;
    AgentId agent;
    Timestamp time = 0;
    std::set<Node> focus;  // Chatter only
    HapSet actions;        // Custom only
    HapSet events;         // Custom only

    static Intervention freeze(AgentId i) { return {Kind::Freeze, i, 0, {}, {}, {}}; }
    static Intervention echo(AgentId i, Timestamp t) { return {Kind::Echo, i, t, {}, {}, {}}; }
    static Intervention chatter(AgentId i, Timestamp t, std::set<Node> focus) {
        return {Kind::Chatter, i, t, std::move(focus), {}, {}};
    }
    static Intervention vat(AgentId i, Timestamp t) { return {Kind::Vat, i, t, {}, {}, {}}; }
    static Intervention custom(AgentId i, HapSet actions, HapSet events) {
        return {Kind::Custom, i, 0, {}, std::move(actions), std::move(events)};
    }
};

std::string toString(Intervention::Kind k);

/// One intervention per agent, indexed by AgentId::index().
using JointIntervention = std::vector<Intervention>;
/// B_0, ..., B_{t-1} in round order.
using Adjustment = std::vector<JointIntervention>;

struct InterventionResult {
    HapSet actions;
    HapSet events;
    auto operator<=>(const InterventionResult&) const = default;
};

InterventionResult evalIntervention(const Alphabet& ab, const Intervention& iv, const Run& base);

/// Replays a round's β-sets as Custom interventions.
JointIntervention exactCopy(const Run& base, Timestamp m);

/// Builds r' per the obtained-from construction: surgical rounds for the
/// adjustment, then transitional rounds up to ctx.horizon. Without an
/// explicit continuation the minimal choice is used; an explicit one that is
/// too short throws HorizonError.
Run applyAdjustment(const AgentContext& ctx, const Run& base, const Adjustment& adj,
                    const std::optional<std::vector<AdversaryChoice>>& continuation = std::nullopt);

enum class ConeCopy { Chatter, ExactCopy };

/// Chatter on the cone (focus = cone ∪ buffer), Echo on the buffer, Freeze on
/// the masses. ExactCopy replaces Chatter by a replay of the base round.
/// Throws PreconditionError if θ is not correct.
Adjustment coneAdjustment(const Alphabet& ab, const Run& base, const Node& theta,
                          ConeCopy mode = ConeCopy::Chatter);

struct WitnessRound {
    HapSet alphaEnv;
    std::vector<HapSet> alphaAgents;
};

/// α-sets for rounds 0..θ.time-1 of the adjusted run: base choices inside the
/// cone, the first offered option elsewhere, and the purged base environment
/// set with fail/echo sends for buffer nodes.
std::vector<WitnessRound> constructWitnessAlphas(const AgentContext& ctx, const Run& base,
                                                 const Node& theta, const Run& adjusted);

/// First round m < witnesses.size() at which the witness fails to certify
/// transitionality (α_ε not offered, some α_j not protocol-conformant, or the
/// filters do not reproduce the β-sets). Empty if all rounds certify.
struct WitnessFailure {
    Timestamp round = 0;
    std::string reason;
};
std::optional<WitnessFailure> checkWitness(const AgentContext& ctx, const Run& run,
                                           const std::vector<WitnessRound>& witnesses);
/// Installs the witness α-sets as the run's certified α-sets.
void certifyRun(Run& run, const std::vector<WitnessRound>& witnesses);

struct PropertyResult {
    char label = '?';
    bool pass = true;
    std::optional<Timestamp> firstRound;
    std::string detail;
};

struct ConeReport {
    Node theta;
    std::vector<PropertyResult> properties;  // A..F
    bool pass() const;
    const PropertyResult& get(char label) const;
};

ConeReport verifyConeEquivalence(const AgentContext& ctx, const Run& base, const Node& theta,
                                 const Run& adjusted);
/// As above but (F) uses caller-supplied witnesses.
ConeReport verifyConeEquivalence(const AgentContext& ctx, const Run& base, const Node& theta,
                                 const Run& adjusted, const std::vector<WitnessRound>& witnesses);

std::string renderAdjustment(const Adjustment& adj);
std::string renderReport(const ConeReport& report);

/// Witness α-sets for a run whose surgical rounds consist solely of agent-free
/// environment sets: α_ε = β_ε and α_j = the first offered option.
std::vector<WitnessRound> silentWitness(const AgentContext& ctx, const Run& run, Timestamp rounds);

struct VatResult {
    Run run;
    /// The point of r' whose local state for the victim equals base's at t.
    Timestamp witnessTime = 0;
    bool transitional = false;
};

/// Vat for the victim and Freeze for everyone else over rounds 0..t-1. For
/// t = 0 a single round carrying only fail(victim) is used instead, so that the
/// witness point (r', 1) is faulty yet indistinguishable for the victim.
/// Throws PreconditionError when f = 0.
VatResult brainInVat(const AgentContext& ctx, const Run& base, AgentId victim, Timestamp t);

/// r^S: the cone-equivalent run with fail(j) added to round 0 for every j in
/// `seeded`. Returned together with its (F) certificate.
struct SeededResult {
    Run run;
    bool transitional = false;
};
SeededResult seedFaults(const AgentContext& ctx, const Run& base, const Node& theta,
                        const std::set<AgentId>& seeded);

}  // namespace byzcone
