#pragma once

// Agent and environment protocols, agent-contexts, t-coherency, and the
// bounded fault-type predicates (correctable, delayable, error-prone,
// gullible, fully byzantine).

#include <map>
#include <string>
#include <vector>

#include "byzcone/hap.hpp"

namespace byzcone {

/// r_i(t): the initial local state plus the records appended in active rounds,
/// oldest first. Never contains timestamps.
struct LocalHistory {
    std::string initial;
    std::vector<LocalSet> records;
    auto operator<=>(const LocalHistory&) const = default;
};

using ActionRange = std::vector<LocalSet>;
using EventRange = std::vector<HapSet>;
using GlobalInitialState = std::vector<std::string>;

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One conjunct of a protocol rule guard.
struct HistoryCondition {
    enum class Kind { Empty, NonEmpty, Has, Lacks, LastHas, InitialIs };
    Kind kind = Kind::Empty;
    LocalHap hap;
    std::string initial;

    bool holds(const LocalHistory& h) const;
};

struct ProtocolRule {
    std::vector<HistoryCondition> guard;
    ActionRange range;
};

/// P_i as an extensional table, guarded rules (first match wins), and a
/// default range for every other history.
class AgentProtocol {
public:
    AgentProtocol() : defaultRange_{LocalSet{}} {}

    void setDefault(ActionRange range);
    void addEntry(LocalHistory history, ActionRange range);
    void addRule(ProtocolRule rule);

    const ActionRange& range(const LocalHistory& h) const;

    /// Throws ProtocolError on an empty range or a non-action member.
    void validate(const Alphabet& ab, AgentId owner) const;

private:
    std::map<LocalHistory, ActionRange> table_;
    std::vector<ProtocolRule> rules_;
    ActionRange defaultRange_;
};

/// Closure properties the environment protocol is declared to have for one agent.
struct ClosureFlags {
    bool correctable = false;
    bool delayable = false;
    bool errorProne = false;
    bool gullible = false;
    auto operator<=>(const ClosureFlags&) const = default;
};

/// P_ε: explicit per-timestamp ranges (the options the adversary enumerates)
/// closed under the declared per-agent fault-type operations. `offers` decides
/// membership in the closed range.
class EnvProtocol {
public:
    EnvProtocol() : defaultRange_{HapSet{}} {}

    void setDefault(EventRange range);
    void setRange(Timestamp t, EventRange range);
    void setClosure(AgentId agent, ClosureFlags flags);

    const EventRange& range(Timestamp t) const;
    ClosureFlags closure(AgentId agent) const;

    bool offers(const Alphabet& ab, Timestamp t, const HapSet& events) const;

    /// Ranges nonempty, events only, each option t-coherent.
    void validate(const Alphabet& ab, Timestamp horizon) const;

    const std::map<Timestamp, EventRange>& explicitRanges() const { return ranges_; }
    const EventRange& defaultRange() const { return defaultRange_; }

private:
    std::map<Timestamp, EventRange> ranges_;
    EventRange defaultRange_;
    std::map<AgentId, ClosureFlags> closures_;
};

struct Admissibility {
    enum class Kind { None, FairSchedule };
    Kind kind = Kind::None;
    int window = 0;
};

struct AgentContext {
    Alphabet alphabet;
    EnvProtocol env;
    std::vector<AgentProtocol> protocols;  // indexed by AgentId::index()
    std::vector<GlobalInitialState> initialStates;
    int faultBound = 0;
    Timestamp horizon = 3;
    Admissibility admissibility;

    int agents() const { return alphabet.agents(); }
    const AgentProtocol& protocol(AgentId i) const { return protocols.at(i.index()); }
    /// Throws ProtocolError naming the violated invariant.
    void validate() const;
};

// ---------------------------------------------------------------------------

struct CoherenceViolation {
    char clause = 'a';  // 'a', 'b' or 'c'
    std::string detail;
};

struct CoherenceReport {
    std::vector<CoherenceViolation> violations;
    bool coherent() const { return violations.empty(); }
    bool violates(char clause) const;
};

/// Throws FormatError when `events` contains a correct action.
CoherenceReport checkTCoherent(const Alphabet& ab, const HapSet& events, Timestamp time);

enum class AgentType { Correctable, Delayable, ErrorProne, Gullible, FullyByzantine };

/// How far the Y ⊆ FEvents_i quantifier is explored.
struct BoundedDomain {
    std::size_t exhaustiveLimit = 12;  // enumerate all subsets up to this many candidates
    std::size_t maxSubsetSize = 2;     // otherwise only subsets of at most this size
};

struct AgentTypeVerdict {
    bool holds = true;
    bool exhaustive = true;  // false when the Y quantifier was truncated
    std::string counterexample;
};

/// FEvents_i restricted to the alphabet at time t (fake receives of messages
/// sent no later than t).
std::vector<GlobalHap> boundedFEvents(const Alphabet& ab, AgentId agent, Timestamp t);

AgentTypeVerdict checkAgentTypeDetailed(const Alphabet& ab, const EnvProtocol& env, AgentId agent,
                                        AgentType type, Timestamp horizon,
                                        const BoundedDomain& domain = {});
bool checkAgentType(const Alphabet& ab, const EnvProtocol& env, AgentId agent, AgentType type,
                    Timestamp horizon, const BoundedDomain& domain = {});

std::string toString(AgentType type);

}  // namespace byzcone
