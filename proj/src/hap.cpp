#include "byzcone/hap.hpp"

#include <algorithm>

namespace byzcone {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

GlobalHap toGlobal(const CorrectEvent& e) {
    return std::visit([](const auto& x) -> GlobalHap { return x; }, e);
}

GlobalHap toGlobal(const CorrectAction& a) {
    return std::visit([](const auto& x) -> GlobalHap { return x; }, a);
}

std::optional<CorrectAction> asCorrectAction(const ActionOrNoop& a) {
    return std::visit(Overloaded{
                          [](const Noop&) -> std::optional<CorrectAction> { return std::nullopt; },
                          [](const GSend& s) -> std::optional<CorrectAction> { return s; },
                          [](const GIntAction& x) -> std::optional<CorrectAction> { return x; },
                      },
                      a);
}

AgentId ownerOf(const GlobalHap& h) {
    return std::visit(Overloaded{
                          [](const GSend& x) { return x.sender; },
                          [](const GRecv& x) { return x.recipient; },
                          [](const auto& x) { return x.agent; },
                      },
                      h);
}

bool isCorrectAction(const GlobalHap& h) {
    return std::holds_alternative<GSend>(h) || std::holds_alternative<GIntAction>(h);
}

bool isCorrectEvent(const GlobalHap& h) {
    return std::holds_alternative<GRecv>(h) || std::holds_alternative<GExtEvent>(h);
}

bool isByzantine(const GlobalHap& h) {
    return std::holds_alternative<Fake>(h) || std::holds_alternative<FakeAction>(h);
}

bool isSystemEvent(const GlobalHap& h) {
    return std::holds_alternative<Go>(h) || std::holds_alternative<Sleep>(h) ||
           std::holds_alternative<Hibernate>(h);
}

bool inGEvents(const GlobalHap& h, AgentId i) { return isEvent(h) && ownerOf(h) == i; }

bool inFEvents(const GlobalHap& h, AgentId i) {
    if (ownerOf(h) != i) return false;
    return isByzantine(h) || std::holds_alternative<Sleep>(h) ||
           std::holds_alternative<Hibernate>(h);
}

bool isGo(const GlobalHap& h, AgentId i) {
    const auto* g = std::get_if<Go>(&h);
    return g != nullptr && g->agent == i;
}

HapSet eventsOf(const HapSet& xs, AgentId i) {
    HapSet out;
    for (const auto& h : xs)
        if (inGEvents(h, i)) out.insert(h);
    return out;
}

HapSet withoutEventsOf(const HapSet& xs, AgentId i) {
    HapSet out;
    for (const auto& h : xs)
        if (!inGEvents(h, i)) out.insert(h);
    return out;
}

HapSet withoutFaultsOf(const HapSet& xs, AgentId i) {
    HapSet out;
    for (const auto& h : xs)
        if (!inFEvents(h, i)) out.insert(h);
    return out;
}

std::optional<GSend> fakeSendOf(const GlobalHap& h) {
    const auto* fa = std::get_if<FakeAction>(&h);
    if (fa == nullptr) return std::nullopt;
    if (const auto* s = std::get_if<GSend>(&fa->performed)) return *s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

Alphabet::Alphabet(int agents, std::vector<std::string> messages, std::vector<std::string> events,
                   std::vector<std::string> actions, int maxCopies, Timestamp horizon)
    : agents_(agents),
      messages_(std::move(messages)),
      events_(std::move(events)),
      actions_(std::move(actions)),
      maxCopies_(maxCopies),
      horizon_(horizon) {
    if (agents_ < 1) throw AlphabetError("at least one agent is required");
    if (maxCopies_ < 0) throw AlphabetError("max-copies must be non-negative");
    if (horizon_ < 1) throw AlphabetError("horizon must be at least 1");
    auto dupes = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) != v.end();
    };
    if (dupes(messages_) || dupes(events_) || dupes(actions_))
        throw AlphabetError("duplicate label in alphabet");
}

std::vector<AgentId> Alphabet::allAgents() const {
    std::vector<AgentId> out;
    for (int i = 1; i <= agents_; ++i) out.emplace_back(i);
    return out;
}

bool Alphabet::hasMessage(const std::string& m) const { return messageIndex(m) >= 0; }

bool Alphabet::hasEvent(const std::string& e) const {
    return std::find(events_.begin(), events_.end(), e) != events_.end();
}

bool Alphabet::hasAction(const std::string& a) const {
    return std::find(actions_.begin(), actions_.end(), a) != actions_.end();
}

int Alphabet::messageIndex(const std::string& m) const {
    auto it = std::find(messages_.begin(), messages_.end(), m);
    return it == messages_.end() ? -1 : static_cast<int>(it - messages_.begin());
}

std::uint64_t Alphabet::gmiDomainSize() const {
    const std::uint64_t n = static_cast<std::uint64_t>(agents_);
    return n * n * messages_.size() * static_cast<std::uint64_t>(maxCopies_ + 1) *
           static_cast<std::uint64_t>(horizon_ + 1);
}

Gmi Alphabet::encodeGmi(AgentId sender, AgentId recipient, const std::string& payload, int copy,
                        Timestamp time) const {
    if (!validAgent(sender) || !validAgent(recipient))
        throw AlphabetError("gmi: agent outside 1.." + std::to_string(agents_));
    const int msg = messageIndex(payload);
    if (msg < 0) throw AlphabetError("gmi: undeclared message '" + payload + "'");
    if (copy < 0 || copy > maxCopies_)
        throw AlphabetError("gmi: copy " + std::to_string(copy) + " outside 0.." +
                            std::to_string(maxCopies_));
    if (time < 0 || time > horizon_)
        throw AlphabetError("gmi: time " + std::to_string(time) + " outside 0.." +
                            std::to_string(horizon_));
    std::uint64_t code = static_cast<std::uint64_t>(sender.index());
    code = code * agents_ + recipient.index();
    code = code * messages_.size() + static_cast<std::uint64_t>(msg);
    code = code * static_cast<std::uint64_t>(maxCopies_ + 1) + static_cast<std::uint64_t>(copy);
    code = code * static_cast<std::uint64_t>(horizon_ + 1) + static_cast<std::uint64_t>(time);
    return Gmi{code};
}

std::optional<GmiFields> Alphabet::tryDecodeGmi(Gmi gmi) const {
    if (messages_.empty() || gmi.code >= gmiDomainSize()) return std::nullopt;
    std::uint64_t code = gmi.code;
    GmiFields f;
    f.time = static_cast<Timestamp>(code % static_cast<std::uint64_t>(horizon_ + 1));
    code /= static_cast<std::uint64_t>(horizon_ + 1);
    f.copy = static_cast<int>(code % static_cast<std::uint64_t>(maxCopies_ + 1));
    code /= static_cast<std::uint64_t>(maxCopies_ + 1);
    f.payload = messages_[code % messages_.size()];
    code /= messages_.size();
    f.recipient = AgentId(static_cast<int>(code % static_cast<std::uint64_t>(agents_)) + 1);
    code /= static_cast<std::uint64_t>(agents_);
    f.sender = AgentId(static_cast<int>(code) + 1);
    return f;
}

GmiFields Alphabet::decodeGmi(Gmi gmi) const {
    auto f = tryDecodeGmi(gmi);
    if (!f) throw AlphabetError("gmi #" + std::to_string(gmi.code) + " is not decodable");
    return *f;
}

std::vector<LocalHap> Alphabet::localActions(AgentId i) const {
    std::vector<LocalHap> out;
    for (int j = 1; j <= agents_; ++j) {
        if (j == i.value) continue;
        for (const auto& m : messages_)
            for (int k = 0; k <= maxCopies_; ++k) out.emplace_back(LocalSend{AgentId(j), m, k});
    }
    for (const auto& a : actions_) out.emplace_back(LocalIntAction{a});
    return out;
}

std::vector<LocalHap> Alphabet::localEvents(AgentId i) const {
    std::vector<LocalHap> out;
    for (int j = 1; j <= agents_; ++j) {
        if (j == i.value) continue;
        for (const auto& m : messages_) out.emplace_back(LocalRecv{AgentId(j), m});
    }
    for (const auto& e : events_) out.emplace_back(LocalExtEvent{e});
    return out;
}

void Alphabet::validate(const LocalHap& h, AgentId owner) const {
    if (!validAgent(owner)) throw AlphabetError("undeclared agent " + std::to_string(owner.value));
    std::visit(Overloaded{
                   [&](const LocalSend& s) {
                       if (!validAgent(s.recipient) || s.recipient == owner)
                           throw AlphabetError("send to invalid recipient " +
                                               std::to_string(s.recipient.value));
                       if (!hasMessage(s.payload))
                           throw AlphabetError("undeclared message '" + s.payload + "'");
                       if (s.copy < 0 || s.copy > maxCopies_)
                           throw AlphabetError("copy number outside declared bound");
                   },
                   [&](const LocalRecv& r) {
                       if (!validAgent(r.sender) || r.sender == owner)
                           throw AlphabetError("receive from invalid sender " +
                                               std::to_string(r.sender.value));
                       if (!hasMessage(r.payload))
                           throw AlphabetError("undeclared message '" + r.payload + "'");
                   },
                   [&](const LocalExtEvent& e) {
                       if (!hasEvent(e.label))
                           throw AlphabetError("undeclared event '" + e.label + "'");
                   },
                   [&](const LocalIntAction& a) {
                       if (!hasAction(a.label))
                           throw AlphabetError("undeclared action '" + a.label + "'");
                   },
               },
               h);
}

namespace {

void validateSend(const Alphabet& ab, const GSend& s) {
    auto f = ab.tryDecodeGmi(s.gmi);
    if (!f || f->sender != s.sender || f->recipient != s.recipient || f->payload != s.payload)
        throw AlphabetError("gsend carries a gmi that does not match its message");
}

void validateAction(const Alphabet& ab, const ActionOrNoop& a, AgentId owner) {
    std::visit(Overloaded{
                   [](const Noop&) {},
                   [&](const GSend& s) {
                       if (s.sender != owner)
                           throw AlphabetError("byzantine send attributed to another agent");
                       validateSend(ab, s);
                   },
                   [&](const GIntAction& x) {
                       if (x.agent != owner)
                           throw AlphabetError("byzantine action attributed to another agent");
                       ab.validate(LocalHap{LocalIntAction{x.label}}, owner);
                   },
               },
               a);
}

}  // namespace

void Alphabet::validate(const GlobalHap& h) const {
    const AgentId owner = ownerOf(h);
    if (!validAgent(owner)) throw AlphabetError("undeclared agent " + std::to_string(owner.value));
    std::visit(Overloaded{
                   [&](const GSend& s) { validateSend(*this, s); },
                   [&](const GRecv& r) {
                       validate(LocalHap{LocalRecv{r.sender, r.payload}}, r.recipient);
                   },
                   [&](const GExtEvent& e) { validate(LocalHap{LocalExtEvent{e.label}}, e.agent); },
                   [&](const GIntAction& a) {
                       validate(LocalHap{LocalIntAction{a.label}}, a.agent);
                   },
                   [&](const Fake& f) {
                       const GlobalHap inner = toGlobal(f.inner);
                       if (ownerOf(inner) != f.agent)
                           throw AlphabetError("fake event attributed to another agent");
                       validate(inner);
                   },
                   [&](const FakeAction& f) {
                       validateAction(*this, f.performed, f.agent);
                       validateAction(*this, f.perceived, f.agent);
                   },
                   [](const auto&) {},
               },
               h);
}

// ---------------------------------------------------------------------------

GlobalHap globalize(const Alphabet& ab, AgentId agent, Timestamp time, const LocalHap& action) {
    return std::visit(
        Overloaded{
            [&](const LocalSend& s) -> GlobalHap {
                return GSend{agent, s.recipient, s.payload,
                             ab.encodeGmi(agent, s.recipient, s.payload, s.copy, time)};
            },
            [&](const LocalIntAction& a) -> GlobalHap { return GIntAction{agent, time, a.label}; },
            [](const auto&) -> GlobalHap {
                throw FormatError("globalize: events are produced by the environment");
            },
        },
        action);
}

LocalHap localize(const Alphabet& ab, const GlobalHap& correct) {
    return std::visit(
        Overloaded{
            [&](const GSend& s) -> LocalHap {
                const auto f = ab.decodeGmi(s.gmi);
                return LocalSend{s.recipient, s.payload, f.copy};
            },
            [](const GRecv& r) -> LocalHap { return LocalRecv{r.sender, r.payload}; },
            [](const GExtEvent& e) -> LocalHap { return LocalExtEvent{e.label}; },
            [](const GIntAction& a) -> LocalHap { return LocalIntAction{a.label}; },
            [](const auto&) -> LocalHap {
                throw FormatError("local() is defined on correct haps only");
            },
        },
        correct);
}

LocalHap localize(const Alphabet& ab, const CorrectEvent& e) { return localize(ab, toGlobal(e)); }

LocalHap localize(const Alphabet& ab, const CorrectAction& a) { return localize(ab, toGlobal(a)); }

std::optional<LocalHap> localRecordOf(const Alphabet& ab, const GlobalHap& h) {
    if (isCorrectAction(h) || isCorrectEvent(h)) return localize(ab, h);
    if (const auto* f = std::get_if<Fake>(&h)) return localize(ab, f->inner);
    if (const auto* fa = std::get_if<FakeAction>(&h)) {
        if (auto a = asCorrectAction(fa->perceived)) return localize(ab, *a);
    }
    return std::nullopt;
}

LocalSet localizeSet(const Alphabet& ab, const HapSet& haps) {
    LocalSet out;
    for (const auto& h : haps)
        if (auto l = localRecordOf(ab, h)) out.insert(std::move(*l));
    return out;
}

}  // namespace byzcone
