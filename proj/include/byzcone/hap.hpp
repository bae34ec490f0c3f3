#pragma once

// Haps (actions and events) in their local and global formats, global message
// identifiers, and the conversions between the two formats.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace byzcone {

struct AgentId {
    int value = 0;

    constexpr AgentId() = default;
    constexpr explicit AgentId(int v) : value(v) {}

    /// Zero-based position, for indexing per-agent vectors.
    constexpr std::size_t index() const { return static_cast<std::size_t>(value - 1); }

    auto operator<=>(const AgentId&) const = default;
};

using Timestamp = int;

class AlphabetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Local format: what an agent records. No timestamps, no GMIs.

struct LocalSend {
    AgentId recipient;
    std::string payload;
    int copy = 0;
    auto operator<=>(const LocalSend&) const = default;
};

struct LocalRecv {
    AgentId sender;
    std::string payload;
    auto operator<=>(const LocalRecv&) const = default;
};

struct LocalExtEvent {
    std::string label;
    auto operator<=>(const LocalExtEvent&) const = default;
};

struct LocalIntAction {
    std::string label;
    auto operator<=>(const LocalIntAction&) const = default;
};

using LocalHap = std::variant<LocalSend, LocalRecv, LocalExtEvent, LocalIntAction>;
using LocalSet = std::set<LocalHap>;

inline bool isAction(const LocalHap& h) {
    return std::holds_alternative<LocalSend>(h) || std::holds_alternative<LocalIntAction>(h);
}

// ---------------------------------------------------------------------------
// Global message identifiers.

struct Gmi {
    std::uint64_t code = 0;
    auto operator<=>(const Gmi&) const = default;
};

struct GmiFields {
    AgentId sender;
    AgentId recipient;
    std::string payload;
    int copy = 0;
    Timestamp time = 0;
    auto operator<=>(const GmiFields&) const = default;
};

// ---------------------------------------------------------------------------
// Global format: what the environment records.

struct GSend {
    AgentId sender;
    AgentId recipient;
    std::string payload;
    Gmi gmi;
    auto operator<=>(const GSend&) const = default;
};

struct GRecv {
    AgentId recipient;
    AgentId sender;
    std::string payload;
    Gmi gmi;
    auto operator<=>(const GRecv&) const = default;
};

struct GExtEvent {
    AgentId agent;
    std::string label;
    auto operator<=>(const GExtEvent&) const = default;
};

struct GIntAction {
    AgentId agent;
    Timestamp time = 0;
    std::string label;
    auto operator<=>(const GIntAction&) const = default;
};

struct Noop {
    auto operator<=>(const Noop&) const = default;
};

using CorrectEvent = std::variant<GRecv, GExtEvent>;
using CorrectAction = std::variant<GSend, GIntAction>;
using ActionOrNoop = std::variant<Noop, GSend, GIntAction>;

/// Byzantine event: agent perceives `inner` although it did not happen.
struct Fake {
    AgentId agent;
    CorrectEvent inner;
    auto operator<=>(const Fake&) const = default;
};

/// Byzantine action: `performed` happened, the agent perceives `perceived`.
struct FakeAction {
    AgentId agent;
    ActionOrNoop performed;
    ActionOrNoop perceived;
    auto operator<=>(const FakeAction&) const = default;
};

struct Go {
    AgentId agent;
    auto operator<=>(const Go&) const = default;
};

struct Sleep {
    AgentId agent;
    auto operator<=>(const Sleep&) const = default;
};

struct Hibernate {
    AgentId agent;
    auto operator<=>(const Hibernate&) const = default;
};

using GlobalHap =
    std::variant<GSend, GRecv, GExtEvent, GIntAction, Fake, FakeAction, Go, Sleep, Hibernate>;
using HapSet = std::set<GlobalHap>;

inline GlobalHap fail(AgentId i) { return FakeAction{i, Noop{}, Noop{}}; }

GlobalHap toGlobal(const CorrectEvent& e);
GlobalHap toGlobal(const CorrectAction& a);
std::optional<CorrectAction> asCorrectAction(const ActionOrNoop& a);

/// The agent a global hap belongs to.
AgentId ownerOf(const GlobalHap& h);

bool isCorrectAction(const GlobalHap& h);
bool isCorrectEvent(const GlobalHap& h);
bool isByzantine(const GlobalHap& h);
bool isSystemEvent(const GlobalHap& h);
inline bool isEvent(const GlobalHap& h) { return !isCorrectAction(h); }

/// Membership in GEvents_i (correct, byzantine, and system events of i).
bool inGEvents(const GlobalHap& h, AgentId i);
/// Membership in FEvents_i = BEvents_i plus sleep(i) and hibernate(i).
bool inFEvents(const GlobalHap& h, AgentId i);
bool isGo(const GlobalHap& h, AgentId i);

/// X ∩ GEvents_i
HapSet eventsOf(const HapSet& xs, AgentId i);
/// X ∖ GEvents_i
HapSet withoutEventsOf(const HapSet& xs, AgentId i);
/// X ∖ FEvents_i
HapSet withoutFaultsOf(const HapSet& xs, AgentId i);

/// The send a byzantine event claims was performed, if any.
std::optional<GSend> fakeSendOf(const GlobalHap& h);

// ---------------------------------------------------------------------------

/// Declared finite alphabets. Owns the GMI mixed-radix codec.
class Alphabet {
public:
    Alphabet() = default;
    Alphabet(int agents, std::vector<std::string> messages, std::vector<std::string> events,
             std::vector<std::string> actions, int maxCopies, Timestamp horizon);

    int agents() const { return agents_; }
    const std::vector<std::string>& messages() const { return messages_; }
    const std::vector<std::string>& extEvents() const { return events_; }
    const std::vector<std::string>& intActions() const { return actions_; }
    int maxCopies() const { return maxCopies_; }
    Timestamp horizon() const { return horizon_; }

    std::vector<AgentId> allAgents() const;
    bool validAgent(AgentId a) const { return a.value >= 1 && a.value <= agents_; }
    bool hasMessage(const std::string& m) const;
    bool hasEvent(const std::string& e) const;
    bool hasAction(const std::string& a) const;

    Gmi encodeGmi(AgentId sender, AgentId recipient, const std::string& payload, int copy,
                  Timestamp time) const;
    /// Throws AlphabetError for codes outside the declared domain.
    GmiFields decodeGmi(Gmi gmi) const;
    std::optional<GmiFields> tryDecodeGmi(Gmi gmi) const;
    std::uint64_t gmiDomainSize() const;

    /// Actions_i and Events_i over the declared alphabet. Self-sends are excluded.
    std::vector<LocalHap> localActions(AgentId i) const;
    std::vector<LocalHap> localEvents(AgentId i) const;

    /// Throws AlphabetError if a hap mentions undeclared agents or labels.
    void validate(const GlobalHap& h) const;
    void validate(const LocalHap& h, AgentId owner) const;

private:
    int messageIndex(const std::string& m) const;

    int agents_ = 1;
    std::vector<std::string> messages_;
    std::vector<std::string> events_;
    std::vector<std::string> actions_;
    int maxCopies_ = 0;
    Timestamp horizon_ = 3;
};

/// global(i, t)(a); sends receive their GMI here.
GlobalHap globalize(const Alphabet& ab, AgentId agent, Timestamp time, const LocalHap& action);

/// local(O) for a correct hap O. Throws FormatError for byzantine and system haps.
LocalHap localize(const Alphabet& ab, const GlobalHap& correct);
LocalHap localize(const Alphabet& ab, const CorrectEvent& e);
LocalHap localize(const Alphabet& ab, const CorrectAction& a);

/// The localization function σ on a set of global haps.
LocalSet localizeSet(const Alphabet& ab, const HapSet& haps);

/// σ({h}) without building a set; empty for system events and noop perceptions.
std::optional<LocalHap> localRecordOf(const Alphabet& ab, const GlobalHap& h);

}  // namespace byzcone
