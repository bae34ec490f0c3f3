#include "byzcone/protocol.hpp"

#include <algorithm>

#include "byzcone/hap_text.hpp"

namespace byzcone {

bool HistoryCondition::holds(const LocalHistory& h) const {
    auto anyRecordHas = [&] {
        return std::any_of(h.records.begin(), h.records.end(),
                           [&](const LocalSet& r) { return r.count(hap) > 0; });
    };
    switch (kind) {
        case Kind::Empty: return h.records.empty();
        case Kind::NonEmpty: return !h.records.empty();
        case Kind::Has: return anyRecordHas();
        case Kind::Lacks: return !anyRecordHas();
        case Kind::LastHas: return !h.records.empty() && h.records.back().count(hap) > 0;
        case Kind::InitialIs: return h.initial == initial;
    }
    return false;
}

void AgentProtocol::setDefault(ActionRange range) {
    if (range.empty()) throw ProtocolError("protocol default range is empty");
    defaultRange_ = std::move(range);
}

void AgentProtocol::addEntry(LocalHistory history, ActionRange range) {
    if (range.empty()) throw ProtocolError("protocol table entry with empty range");
    table_[std::move(history)] = std::move(range);
}

void AgentProtocol::addRule(ProtocolRule rule) {
    if (rule.range.empty()) throw ProtocolError("protocol rule with empty range");
    rules_.push_back(std::move(rule));
}

const ActionRange& AgentProtocol::range(const LocalHistory& h) const {
    if (auto it = table_.find(h); it != table_.end()) return it->second;
    for (const auto& rule : rules_) {
        if (std::all_of(rule.guard.begin(), rule.guard.end(),
                        [&](const HistoryCondition& c) { return c.holds(h); }))
            return rule.range;
    }
    return defaultRange_;
}

void AgentProtocol::validate(const Alphabet& ab, AgentId owner) const {
    auto check = [&](const ActionRange& range) {
        if (range.empty()) throw ProtocolError("agent " + std::to_string(owner.value) +
                                               ": protocol offers an empty range");
        for (const auto& option : range)
            for (const auto& hap : option) {
                if (!isAction(hap))
                    throw ProtocolError("agent " + std::to_string(owner.value) +
                                        ": protocol offers event " + render(hap));
                ab.validate(hap, owner);
            }
    };
    check(defaultRange_);
    for (const auto& [history, range] : table_) check(range);
    for (const auto& rule : rules_) check(rule.range);
}

// ---------------------------------------------------------------------------

void EnvProtocol::setDefault(EventRange range) {
    if (range.empty()) throw ProtocolError("environment default range is empty");
    defaultRange_ = std::move(range);
}

void EnvProtocol::setRange(Timestamp t, EventRange range) {
    if (range.empty())
        throw ProtocolError("environment range at t=" + std::to_string(t) + " is empty");
    ranges_[t] = std::move(range);
}

void EnvProtocol::setClosure(AgentId agent, ClosureFlags flags) { closures_[agent] = flags; }

const EventRange& EnvProtocol::range(Timestamp t) const {
    if (auto it = ranges_.find(t); it != ranges_.end()) return it->second;
    return defaultRange_;
}

ClosureFlags EnvProtocol::closure(AgentId agent) const {
    auto it = closures_.find(agent);
    return it == closures_.end() ? ClosureFlags{} : it->second;
}

namespace {

bool subsetOfFaults(const HapSet& xs, AgentId i) {
    return std::all_of(xs.begin(), xs.end(), [&](const GlobalHap& h) { return inFEvents(h, i); });
}

// Whether `part` (events of agent i) is reachable from `base` (events of i in
// some offered set) by the declared closure operations.
bool reachable(const Alphabet& ab, Timestamp t, AgentId i, const ClosureFlags& fl,
               const HapSet& part, const HapSet& base) {
    if (part == base) return true;
    const HapSet correctPart = withoutFaultsOf(base, i);
    if ((fl.correctable || fl.errorProne) && part == correctPart) return true;
    if ((fl.delayable || fl.gullible) && part.empty()) return true;
    const bool coherent = checkTCoherent(ab, part, t).coherent();
    if (fl.errorProne && withoutFaultsOf(part, i) == correctPart && coherent) return true;
    if ((fl.gullible || (fl.delayable && fl.errorProne)) && subsetOfFaults(part, i) && coherent)
        return true;
    return false;
}

}  // namespace

bool EnvProtocol::offers(const Alphabet& ab, Timestamp t, const HapSet& events) const {
    if (std::any_of(events.begin(), events.end(), isCorrectAction)) return false;
    const auto agents = ab.allAgents();
    std::vector<HapSet> parts;
    for (AgentId i : agents) parts.push_back(eventsOf(events, i));
    for (const auto& option : range(t)) {
        bool all = true;
        for (AgentId i : agents) {
            if (!reachable(ab, t, i, closure(i), parts[i.index()], eventsOf(option, i))) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

void EnvProtocol::validate(const Alphabet& ab, Timestamp horizon) const {
    for (Timestamp t = 0; t < horizon; ++t) {
        const auto& r = range(t);
        if (r.empty()) throw ProtocolError("environment range at t=" + std::to_string(t) + " is empty");
        for (const auto& option : r) {
            for (const auto& h : option) ab.validate(h);
            const auto report = checkTCoherent(ab, option, t);
            if (!report.coherent()) {
                const auto& v = report.violations.front();
                throw ProtocolError("environment option " + render(option) + " at t=" +
                                    std::to_string(t) + " violates t-coherency (" +
                                    std::string(1, v.clause) + "): " + v.detail);
            }
        }
    }
}

void AgentContext::validate() const {
    if (faultBound < 0 || faultBound > agents())
        throw ProtocolError("fault bound must satisfy 0 <= f <= n");
    if (horizon < 1) throw ProtocolError("horizon must be at least 1");
    if (horizon > alphabet.horizon())
        throw ProtocolError("horizon exceeds the GMI time radix of the alphabet");
    if (protocols.size() != static_cast<std::size_t>(agents()))
        throw ProtocolError("one protocol per agent is required");
    if (initialStates.empty()) throw ProtocolError("at least one initial state is required");
    for (const auto& g : initialStates)
        if (g.size() != static_cast<std::size_t>(agents()))
            throw ProtocolError("initial state must list one local state per agent");
    for (AgentId i : alphabet.allAgents()) protocol(i).validate(alphabet, i);
    env.validate(alphabet, horizon);
    if (admissibility.kind == Admissibility::Kind::FairSchedule && admissibility.window < 1)
        throw ProtocolError("fair schedule window must be positive");
}

// ---------------------------------------------------------------------------

bool CoherenceReport::violates(char clause) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const CoherenceViolation& v) { return v.clause == clause; });
}

namespace {

void checkByzantineSend(const Alphabet& ab, const ActionOrNoop& a, Timestamp time,
                        const GlobalHap& whole, CoherenceReport& report) {
    const auto* s = std::get_if<GSend>(&a);
    if (s == nullptr) return;
    const auto f = ab.tryDecodeGmi(s->gmi);
    if (!f || f->sender != s->sender || f->recipient != s->recipient ||
        f->payload != s->payload || f->time != time) {
        report.violations.push_back(
            {'c', render(whole) + " carries a gmi not issued at t=" + std::to_string(time)});
    }
}

}  // namespace

CoherenceReport checkTCoherent(const Alphabet& ab, const HapSet& events, Timestamp time) {
    CoherenceReport report;
    std::map<AgentId, int> systemEvents;
    for (const auto& h : events) {
        if (isCorrectAction(h))
            throw FormatError("t-coherency is defined on events; got action " + render(h));
        if (isSystemEvent(h) && ++systemEvents[ownerOf(h)] == 2)
            report.violations.push_back(
                {'a', "agent " + std::to_string(ownerOf(h).value) + " has several system events"});
        if (const auto* fake = std::get_if<Fake>(&h)) {
            const LocalHap perceived = localize(ab, fake->inner);
            for (const auto& other : events) {
                if (isCorrectEvent(other) && ownerOf(other) == fake->agent &&
                    localize(ab, other) == perceived) {
                    report.violations.push_back(
                        {'b', render(h) + " accompanies correct " + render(other)});
                }
            }
        }
        if (const auto* fa = std::get_if<FakeAction>(&h)) {
            checkByzantineSend(ab, fa->performed, time, h, report);
            checkByzantineSend(ab, fa->perceived, time, h, report);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

std::string toString(AgentType type) {
    switch (type) {
        case AgentType::Correctable: return "correctable";
        case AgentType::Delayable: return "delayable";
        case AgentType::ErrorProne: return "error-prone";
        case AgentType::Gullible: return "gullible";
        case AgentType::FullyByzantine: return "fully-byzantine";
    }
    return "?";
}

std::vector<GlobalHap> boundedFEvents(const Alphabet& ab, AgentId i, Timestamp t) {
    std::vector<GlobalHap> out{Sleep{i}, Hibernate{i}};
    for (AgentId j : ab.allAgents()) {
        if (j == i) continue;
        for (const auto& m : ab.messages())
            for (int k = 0; k <= ab.maxCopies(); ++k)
                for (Timestamp s = 0; s <= t; ++s)
                    out.push_back(Fake{i, GRecv{i, j, m, ab.encodeGmi(j, i, m, k, s)}});
    }
    for (const auto& e : ab.extEvents()) out.push_back(Fake{i, GExtEvent{i, e}});
    std::vector<ActionOrNoop> acts{Noop{}};
    for (const auto& a : ab.localActions(i)) {
        const GlobalHap g = globalize(ab, i, t, a);
        if (const auto* s = std::get_if<GSend>(&g)) acts.emplace_back(*s);
        if (const auto* x = std::get_if<GIntAction>(&g)) acts.emplace_back(*x);
    }
    for (const auto& performed : acts)
        for (const auto& perceived : acts) out.push_back(FakeAction{i, performed, perceived});
    return out;
}

namespace {

// Calls fn on every Y ⊆ candidates allowed by the domain; stops when fn returns false.
template <class Fn>
bool forEachSubset(const std::vector<GlobalHap>& candidates, const BoundedDomain& domain,
                   bool& exhaustive, Fn fn) {
    const std::size_t n = candidates.size();
    if (n <= domain.exhaustiveLimit) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            HapSet y;
            for (std::size_t b = 0; b < n; ++b)
                if (mask & (std::uint64_t{1} << b)) y.insert(candidates[b]);
            if (!fn(y)) return false;
        }
        return true;
    }
    exhaustive = false;
    std::vector<std::size_t> pick;
    // Depth-first over index combinations of size <= maxSubsetSize.
    auto rec = [&](auto&& self, std::size_t from) -> bool {
        HapSet y;
        for (auto idx : pick) y.insert(candidates[idx]);
        if (!fn(y)) return false;
        if (pick.size() == domain.maxSubsetSize) return true;
        for (std::size_t k = from; k < n; ++k) {
            pick.push_back(k);
            if (!self(self, k + 1)) return false;
            pick.pop_back();
        }
        return true;
    };
    return rec(rec, 0);
}

HapSet unite(HapSet a, const HapSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}

}  // namespace

AgentTypeVerdict checkAgentTypeDetailed(const Alphabet& ab, const EnvProtocol& env, AgentId i,
                                        AgentType type, Timestamp horizon,
                                        const BoundedDomain& domain) {
    if (type == AgentType::FullyByzantine) {
        auto a = checkAgentTypeDetailed(ab, env, i, AgentType::ErrorProne, horizon, domain);
        if (!a.holds) return a;
        auto b = checkAgentTypeDetailed(ab, env, i, AgentType::Gullible, horizon, domain);
        b.exhaustive = b.exhaustive && a.exhaustive;
        return b;
    }
    AgentTypeVerdict verdict;
    for (Timestamp t = 0; t < horizon; ++t) {
        const auto candidates = boundedFEvents(ab, i, t);
        for (const auto& x : env.range(t)) {
            auto require = [&](const HapSet& s) {
                if (env.offers(ab, t, s)) return true;
                verdict.holds = false;
                verdict.counterexample = "t=" + std::to_string(t) + ": " + render(s) +
                                         " missing (from " + render(x) + ")";
                return false;
            };
            switch (type) {
                case AgentType::Correctable:
                    if (!require(withoutFaultsOf(x, i))) return verdict;
                    break;
                case AgentType::Delayable:
                    if (!require(withoutEventsOf(x, i))) return verdict;
                    break;
                case AgentType::ErrorProne:
                case AgentType::Gullible: {
                    const HapSet rest = type == AgentType::ErrorProne ? withoutFaultsOf(x, i)
                                                                      : withoutEventsOf(x, i);
                    const bool ok = forEachSubset(candidates, domain, verdict.exhaustive,
                                                  [&](const HapSet& y) {
                                                      HapSet s = unite(y, rest);
                                                      if (!checkTCoherent(ab, s, t).coherent())
                                                          return true;
                                                      return require(s);
                                                  });
                    if (!ok) return verdict;
                    break;
                }
                case AgentType::FullyByzantine: break;
            }
        }
    }
    return verdict;
}

bool checkAgentType(const Alphabet& ab, const EnvProtocol& env, AgentId agent, AgentType type,
                    Timestamp horizon, const BoundedDomain& domain) {
    return checkAgentTypeDetailed(ab, env, agent, type, horizon, domain).holds;
}

}  // namespace byzcone
