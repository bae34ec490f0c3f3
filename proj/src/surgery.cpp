#include "byzcone/surgery.hpp"

#include <algorithm>
#include <sstream>

namespace byzcone {

std::string toString(Intervention::Kind k) {
    switch (k) {
        case Intervention::Kind::Freeze: return "freeze";
        case Intervention::Kind::Echo: return "echo";
        case Intervention::Kind::Chatter: return "chatter";
        case Intervention::Kind::Vat: return "vat";
        case Intervention::Kind::Custom: return "custom";
    }
    return "?";
}

namespace {

HapSet echoEvents(const Run& base, AgentId i, Timestamp t) {
    HapSet out{fail(i)};
    for (const auto& a : base.betaAgent(i, t))
        if (const auto* s = std::get_if<GSend>(&a)) out.insert(FakeAction{i, *s, Noop{}});
    for (const auto& h : base.betaEnv(t)) {
        auto s = fakeSendOf(h);
        if (s && ownerOf(h) == i) out.insert(FakeAction{i, *s, Noop{}});
    }
    return out;
}

HapSet chatterEvents(const Alphabet& ab, const Run& base, AgentId i, Timestamp t,
                     const std::set<Node>& focus) {
    HapSet out;
    for (const auto& h : eventsOf(base.betaEnv(t), i)) {
        if (const auto* r = std::get_if<GRecv>(&h)) {
            auto f = ab.tryDecodeGmi(r->gmi);
            if (!f || focus.count(Node{f->sender, f->time}) == 0) continue;
        }
        out.insert(h);
    }
    return out;
}

HapSet vatEvents(const Run& base, AgentId i, Timestamp t) {
    HapSet out{fail(i)};
    for (const auto& h : eventsOf(base.betaEnv(t), i)) {
        if (const auto* r = std::get_if<GRecv>(&h)) {
            out.insert(Fake{i, *r});
        } else if (const auto* e = std::get_if<GExtEvent>(&h)) {
            out.insert(Fake{i, *e});
        } else if (std::holds_alternative<Fake>(h)) {
            out.insert(h);
        } else if (const auto* fa = std::get_if<FakeAction>(&h)) {
            out.insert(FakeAction{i, Noop{}, fa->perceived});
        }
    }
    for (const auto& a : base.betaAgent(i, t)) {
        if (const auto* s = std::get_if<GSend>(&a)) out.insert(FakeAction{i, Noop{}, *s});
        if (const auto* x = std::get_if<GIntAction>(&a)) out.insert(FakeAction{i, Noop{}, *x});
    }
    if (base.triggered(i, t)) out.insert(Sleep{i});
    return out;
}

}  // namespace

InterventionResult evalIntervention(const Alphabet& ab, const Intervention& iv, const Run& base) {
    switch (iv.kind) {
        case Intervention::Kind::Freeze: return {};
        case Intervention::Kind::Echo: return {{}, echoEvents(base, iv.agent, iv.time)};
        case Intervention::Kind::Chatter:
            return {base.betaAgent(iv.agent, iv.time),
                    chatterEvents(ab, base, iv.agent, iv.time, iv.focus)};
        case Intervention::Kind::Vat: return {{}, vatEvents(base, iv.agent, iv.time)};
        case Intervention::Kind::Custom: return {iv.actions, iv.events};
    }
    return {};
}

JointIntervention exactCopy(const Run& base, Timestamp m) {
    JointIntervention joint;
    for (int k = 1; k <= base.agents(); ++k) {
        const AgentId j(k);
        joint.push_back(Intervention::custom(j, base.betaAgent(j, m), eventsOf(base.betaEnv(m), j)));
    }
    return joint;
}

Run applyAdjustment(const AgentContext& ctx, const Run& base, const Adjustment& adj,
                    const std::optional<std::vector<AdversaryChoice>>& continuation) {
    const auto& ab = ctx.alphabet;
    if (static_cast<Timestamp>(adj.size()) > ctx.horizon)
        throw HorizonError("adjustment of length " + std::to_string(adj.size()) +
                           " exceeds horizon " + std::to_string(ctx.horizon));
    const std::size_t rest = static_cast<std::size_t>(ctx.horizon) - adj.size();
    if (continuation && continuation->size() < rest)
        throw HorizonError("continuation covers " + std::to_string(continuation->size()) +
                           " of " + std::to_string(rest) + " remaining rounds");

    Run run(base.initial(), base.agents());
    for (std::size_t m = 0; m < adj.size(); ++m) {
        const auto& joint = adj[m];
        if (joint.size() != static_cast<std::size_t>(ctx.agents()))
            throw std::invalid_argument("joint intervention needs one entry per agent");
        RoundTrace trace;
        trace.surgical = true;
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId j(k);
            auto res = evalIntervention(ab, joint[j.index()], base);
            for (const auto& a : res.actions)
                if (!isCorrectAction(a) || ownerOf(a) != j)
                    throw std::invalid_argument("intervention for agent " + std::to_string(k) +
                                                " yields a hap outside GActions");
            for (const auto& e : res.events)
                if (!inGEvents(e, j))
                    throw std::invalid_argument("intervention for agent " + std::to_string(k) +
                                                " yields a hap outside GEvents");
            trace.betaEnv.insert(res.events.begin(), res.events.end());
            trace.betaAgents.push_back(std::move(res.actions));
        }
        run.appendRound(ab, std::move(trace));
    }
    for (std::size_t k = 0; k < rest; ++k)
        run = stepRound(ctx, run, continuation ? (*continuation)[k] : minimalChoice(ctx));
    return run;
}

Adjustment coneAdjustment(const Alphabet& ab, const Run& base, const Node& theta, ConeCopy mode) {
    if (!nodeCorrect(base, theta))
        throw PreconditionError("theta " + toString(theta) + " is not correct");
    const auto part = partition(ab, base, theta);
    const auto focus = part.voiced();
    Adjustment adj;
    for (Timestamp m = 0; m < theta.time; ++m) {
        if (mode == ConeCopy::ExactCopy) {
            JointIntervention copy = exactCopy(base, m);
            for (int k = 1; k <= base.agents(); ++k) {
                const Node n{AgentId(k), m};
                if (part.regionOf(n) == ConePartition::Region::Buffer)
                    copy[n.agent.index()] = Intervention::echo(n.agent, m);
                else if (part.regionOf(n) == ConePartition::Region::Masses)
                    copy[n.agent.index()] = Intervention::freeze(n.agent);
            }
            adj.push_back(std::move(copy));
            continue;
        }
        JointIntervention joint;
        for (int k = 1; k <= base.agents(); ++k) {
            const AgentId j(k);
            switch (part.regionOf(Node{j, m})) {
                case ConePartition::Region::Cone:
                    joint.push_back(Intervention::chatter(j, m, focus));
                    break;
                case ConePartition::Region::Buffer: joint.push_back(Intervention::echo(j, m)); break;
                case ConePartition::Region::Masses: joint.push_back(Intervention::freeze(j)); break;
            }
        }
        adj.push_back(std::move(joint));
    }
    return adj;
}

std::vector<WitnessRound> constructWitnessAlphas(const AgentContext& ctx, const Run& base,
                                                 const Node& theta, const Run& adjusted) {
    const auto& ab = ctx.alphabet;
    const auto part = partition(ab, base, theta);
    std::vector<WitnessRound> out;
    for (Timestamp m = 0; m < theta.time; ++m) {
        const auto& round = base.round(m);
        if (round.surgical)
            throw PreconditionError("base round " + std::to_string(m) + " is not certified");
        WitnessRound w;
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId j(k);
            if (part.regionOf(Node{j, m}) == ConePartition::Region::Cone) {
                w.alphaAgents.push_back(round.alphaAgents.at(j.index()));
            } else {
                const auto& range = ctx.protocol(j).range(adjusted.localHistory(j, m));
                w.alphaAgents.push_back(labelActions(ab, j, m, range.front()));
            }
        }
        const HapSet pre =
            filterEnvLeqF(base.state(m), round.alphaEnv, round.alphaAgents, ctx.faultBound);
        for (const auto& h : pre)
            if (part.regionOf(Node{ownerOf(h), m}) == ConePartition::Region::Cone)
                w.alphaEnv.insert(h);
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId l(k);
            if (part.regionOf(Node{l, m}) == ConePartition::Region::Buffer) {
                auto echo = echoEvents(base, l, m);
                w.alphaEnv.insert(echo.begin(), echo.end());
            }
        }
        out.push_back(std::move(w));
    }
    return out;
}

std::optional<WitnessFailure> checkWitness(const AgentContext& ctx, const Run& run,
                                           const std::vector<WitnessRound>& witnesses) {
    const auto& ab = ctx.alphabet;
    for (std::size_t idx = 0; idx < witnesses.size(); ++idx) {
        const auto m = static_cast<Timestamp>(idx);
        const auto& w = witnesses[idx];
        if (m >= run.time()) return WitnessFailure{m, "run is shorter than the witness"};
        if (!ctx.env.offers(ab, m, w.alphaEnv))
            return WitnessFailure{m, "environment set not offered by the closed protocol"};
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId j(k);
            const auto& range = ctx.protocol(j).range(run.localHistory(j, m));
            const bool conforms = std::any_of(range.begin(), range.end(), [&](const LocalSet& x) {
                return labelActions(ab, j, m, x) == w.alphaAgents.at(j.index());
            });
            if (!conforms)
                return WitnessFailure{m, "agent " + std::to_string(k) +
                                             " actions not offered by its protocol"};
        }
        const HapSet betaEnv = filterEnv(run.state(m), w.alphaEnv, w.alphaAgents, ctx.faultBound);
        if (betaEnv != run.betaEnv(m))
            return WitnessFailure{m, "filtered environment set differs from the adjusted one"};
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId j(k);
            if (filterAgent(j, w.alphaAgents, betaEnv) != run.betaAgent(j, m))
                return WitnessFailure{m, "filtered actions of agent " + std::to_string(k) +
                                             " differ from the adjusted ones"};
        }
    }
    return std::nullopt;
}

void certifyRun(Run& run, const std::vector<WitnessRound>& witnesses) {
    for (std::size_t idx = 0; idx < witnesses.size(); ++idx)
        run.certifyRound(static_cast<Timestamp>(idx), witnesses[idx].alphaEnv,
                         witnesses[idx].alphaAgents);
}

bool ConeReport::pass() const {
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyResult& p) { return p.pass; });
}

const PropertyResult& ConeReport::get(char label) const {
    for (const auto& p : properties)
        if (p.label == label) return p;
    throw std::out_of_range(std::string("no property ") + label);
}

ConeReport verifyConeEquivalence(const AgentContext& ctx, const Run& base, const Node& theta,
                                 const Run& adjusted) {
    return verifyConeEquivalence(ctx, base, theta, adjusted,
                                 constructWitnessAlphas(ctx, base, theta, adjusted));
}

ConeReport verifyConeEquivalence(const AgentContext& ctx, const Run& base, const Node& theta,
                                 const Run& adjusted, const std::vector<WitnessRound>& witnesses) {
    const auto& ab = ctx.alphabet;
    const auto graph = buildCausalGraph(ab, base);
    const auto part = partition(base, graph, theta);
    const Timestamp t = theta.time;
    ConeReport rep;
    rep.theta = theta;

    auto fail = [](PropertyResult& p, Timestamp m, std::string detail) {
        if (!p.pass) return;
        p.pass = false;
        p.firstRound = m;
        p.detail = std::move(detail);
    };

    PropertyResult a{'A', true, std::nullopt, {}};
    for (const auto& n : part.cone)
        if (adjusted.localHistory(n.agent, n.time) != base.localHistory(n.agent, n.time))
            fail(a, n.time, "local state differs at cone node " + toString(n));

    PropertyResult b{'B', true, std::nullopt, {}};
    for (Timestamp m = 0; m <= t; ++m)
        if (adjusted.localHistory(theta.agent, m) != base.localHistory(theta.agent, m))
            fail(b, m, "local state of agent " + std::to_string(theta.agent.value) + " differs");

    PropertyResult c{'C', true, std::nullopt, {}};
    for (Timestamp m = 1; m <= t; ++m)
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId j(k);
            const auto& env = adjusted.betaEnv(m - 1);
            const bool faulted = std::any_of(env.begin(), env.end(),
                                             [&](const GlobalHap& h) { return inFEvents(h, j); });
            const bool expected =
                pathExists(graph, Node{j, m - 1}, theta) && !base.nodeCorrect(j, m);
            if (faulted != expected)
                fail(c, m - 1,
                     "agent " + std::to_string(k) + (faulted ? " faulted without" : " not faulted despite") +
                         " a faulty path node");
        }

    PropertyResult d{'D', true, std::nullopt, {}};
    for (Timestamp m = 0; m <= t; ++m)
        for (int k = 1; k <= ctx.agents(); ++k)
            if (base.nodeCorrect(AgentId(k), m) && !adjusted.nodeCorrect(AgentId(k), m))
                fail(d, m, "node " + toString(Node{AgentId(k), m}) + " became faulty");

    PropertyResult e{'E', true, std::nullopt, {}};
    for (Timestamp m = 0; m <= t; ++m) {
        const auto now = adjusted.faultyBy(m).size();
        if (now > base.faultyBy(m).size() || static_cast<int>(now) > ctx.faultBound)
            fail(e, m, std::to_string(now) + " faulty agents");
    }

    PropertyResult f{'F', true, std::nullopt, {}};
    if (auto wf = checkWitness(ctx, adjusted, witnesses)) fail(f, wf->round, wf->reason);
    for (Timestamp m = static_cast<Timestamp>(witnesses.size()); m < adjusted.time(); ++m)
        if (adjusted.round(m).surgical) fail(f, m, "uncertified surgical round");

    rep.properties = {a, b, c, d, e, f};
    return rep;
}

std::string renderAdjustment(const Adjustment& adj) {
    std::ostringstream out;
    for (std::size_t m = 0; m < adj.size(); ++m) {
        out << "round " << m << ":";
        for (const auto& iv : adj[m]) {
            out << " " << iv.agent.value << "=" << toString(iv.kind);
            if (iv.kind == Intervention::Kind::Chatter) {
                out << "{";
                bool first = true;
                for (const auto& n : iv.focus) {
                    out << (first ? "" : ",") << toString(n);
                    first = false;
                }
                out << "}";
            }
            if (iv.kind == Intervention::Kind::Custom)
                out << "(" << iv.actions.size() << " actions, " << iv.events.size() << " events)";
        }
        out << "\n";
    }
    return out.str();
}

std::string renderReport(const ConeReport& report) {
    std::ostringstream out;
    out << "theta " << toString(report.theta) << "\n";
    for (const auto& p : report.properties) {
        out << "(" << p.label << ") " << (p.pass ? "pass" : "FAIL");
        if (!p.pass) out << " at round " << *p.firstRound << ": " << p.detail;
        out << "\n";
    }
    out << "result: " << (report.pass() ? "pass" : "FAIL") << "\n";
    return out.str();
}

std::vector<WitnessRound> silentWitness(const AgentContext& ctx, const Run& run, Timestamp rounds) {
    std::vector<WitnessRound> out;
    for (Timestamp m = 0; m < rounds; ++m) {
        WitnessRound w;
        w.alphaEnv = run.betaEnv(m);
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId j(k);
            const auto& range = ctx.protocol(j).range(run.localHistory(j, m));
            w.alphaAgents.push_back(labelActions(ctx.alphabet, j, m, range.front()));
        }
        out.push_back(std::move(w));
    }
    return out;
}

VatResult brainInVat(const AgentContext& ctx, const Run& base, AgentId victim, Timestamp t) {
    if (ctx.faultBound < 1) throw PreconditionError("brain in a vat needs f >= 1");
    if (t < 0 || t > base.time()) throw std::out_of_range("vat time outside base run");
    Adjustment adj;
    Timestamp witnessTime = t;
    if (t == 0) {
        JointIntervention joint;
        for (int k = 1; k <= ctx.agents(); ++k) {
            const AgentId j(k);
            joint.push_back(j == victim ? Intervention::custom(j, {}, {fail(j)})
                                        : Intervention::freeze(j));
        }
        adj.push_back(std::move(joint));
        witnessTime = 1;
    } else {
        for (Timestamp m = 0; m < t; ++m) {
            JointIntervention joint;
            for (int k = 1; k <= ctx.agents(); ++k) {
                const AgentId j(k);
                joint.push_back(j == victim ? Intervention::vat(j, m) : Intervention::freeze(j));
            }
            adj.push_back(std::move(joint));
        }
    }
    VatResult res{applyAdjustment(ctx, base, adj), witnessTime, false};
    const auto w = silentWitness(ctx, res.run, static_cast<Timestamp>(adj.size()));
    res.transitional = !checkWitness(ctx, res.run, w);
    if (res.transitional) certifyRun(res.run, w);
    return res;
}

SeededResult seedFaults(const AgentContext& ctx, const Run& base, const Node& theta,
                        const std::set<AgentId>& seeded) {
    const auto& ab = ctx.alphabet;
    Adjustment adj = coneAdjustment(ab, base, theta);
    const bool empty = adj.empty();
    if (empty) {
        JointIntervention joint;
        for (int k = 1; k <= ctx.agents(); ++k) joint.push_back(Intervention::freeze(AgentId(k)));
        adj.push_back(std::move(joint));
    }
    for (AgentId j : seeded) {
        auto& iv = adj[0].at(j.index());
        auto res = evalIntervention(ab, iv, base);
        res.events.insert(fail(j));
        iv = Intervention::custom(j, std::move(res.actions), std::move(res.events));
    }
    SeededResult out{applyAdjustment(ctx, base, adj), false};
    std::vector<WitnessRound> w;
    if (empty) {
        w = silentWitness(ctx, out.run, 1);
    } else {
        w = constructWitnessAlphas(ctx, base, theta, out.run);
        for (AgentId j : seeded) w[0].alphaEnv.insert(fail(j));
    }
    out.transitional = !checkWitness(ctx, out.run, w);
    if (out.transitional) certifyRun(out.run, w);
    return out;
}

}  // namespace byzcone
