#pragma once

// Brute-force reference implementations used as test oracles. These work on
// the raw hap variants and never call the library's predicates or filters.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "byzcone/causal.hpp"
#include "byzcone/epistemic.hpp"
#include "byzcone/run.hpp"

namespace oracle {

using namespace byzcone;

inline int ownerAgent(const GlobalHap& h) {
    if (auto p = std::get_if<GSend>(&h)) return p->sender.value;
    if (auto p = std::get_if<GRecv>(&h)) return p->recipient.value;
    if (auto p = std::get_if<GExtEvent>(&h)) return p->agent.value;
    if (auto p = std::get_if<GIntAction>(&h)) return p->agent.value;
    if (auto p = std::get_if<Fake>(&h)) return p->agent.value;
    if (auto p = std::get_if<FakeAction>(&h)) return p->agent.value;
    if (auto p = std::get_if<Go>(&h)) return p->agent.value;
    if (auto p = std::get_if<Sleep>(&h)) return p->agent.value;
    return std::get<Hibernate>(h).agent.value;
}

/// BEvents_i ⊔ {sleep(i), hibernate(i)}
inline bool faultEventOf(const GlobalHap& h, int i) {
    if (auto p = std::get_if<Fake>(&h)) return p->agent.value == i;
    if (auto p = std::get_if<FakeAction>(&h)) return p->agent.value == i;
    if (auto p = std::get_if<Sleep>(&h)) return p->agent.value == i;
    if (auto p = std::get_if<Hibernate>(&h)) return p->agent.value == i;
    return false;
}

/// fake_i(gsend(i->j, μ, id) ↦ A) for some A.
inline bool isFakeSendOf(const GlobalHap& h, const GSend& s) {
    auto p = std::get_if<FakeAction>(&h);
    if (p == nullptr || p->agent != s.sender) return false;
    auto q = std::get_if<GSend>(&p->performed);
    return q != nullptr && *q == s;
}

/// Both stages of the environment filter, written directly from the predicates.
inline HapSet filterEnv(const std::vector<HapSet>& envRecords, const HapSet& xEnv,
                        const std::vector<HapSet>& xAgents, int f, int agents) {
    HapSet history;
    for (const auto& rec : envRecords) history.insert(rec.begin(), rec.end());

    // ≤f stage
    std::set<int> faulty;
    for (const auto& h : history)
        for (int i = 1; i <= agents; ++i)
            if (faultEventOf(h, i)) faulty.insert(i);
    for (const auto& h : xEnv)
        for (int i = 1; i <= agents; ++i)
            if (faultEventOf(h, i)) faulty.insert(i);
    HapSet stage1;
    for (const auto& h : xEnv) {
        bool fault = false;
        for (int i = 1; i <= agents; ++i) fault = fault || faultEventOf(h, i);
        if (static_cast<int>(faulty.size()) > f && fault) continue;
        stage1.insert(h);
    }

    // B stage
    HapSet out;
    for (const auto& h : stage1) {
        auto r = std::get_if<GRecv>(&h);
        if (r == nullptr) {
            out.insert(h);
            continue;
        }
        const GSend s{r->sender, r->recipient, r->payload, r->gmi};
        const bool inHistory = history.count(GlobalHap{s}) > 0;
        bool fakeInHistory = false;
        for (const auto& g : history) fakeInHistory = fakeInHistory || isFakeSendOf(g, s);
        const auto& xi = xAgents.at(static_cast<std::size_t>(s.sender.value - 1));
        const bool sentNow = xi.count(GlobalHap{s}) > 0 && stage1.count(GlobalHap{Go{s.sender}}) > 0;
        bool fakeNow = false;
        for (const auto& g : stage1) fakeNow = fakeNow || isFakeSendOf(g, s);
        const bool impossible = !inHistory && !fakeInHistory && !sentNow && !fakeNow;
        if (!impossible) out.insert(h);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Causal structure by exhaustive path search.

struct Graph {
    int agents = 0;
    Timestamp horizon = 0;
    std::map<Node, std::set<Node>> succ;
};

/// Local edges plus one message edge per delivered receive whose send (correct
/// or byzantine) is found anywhere in the run with the same identifier.
inline Graph graphOf(const Run& run) {
    Graph g;
    g.agents = run.agents();
    g.horizon = run.time();
    for (int i = 1; i <= g.agents; ++i)
        for (Timestamp t = 0; t < g.horizon; ++t) g.succ[Node{AgentId(i), t}].insert(Node{AgentId(i), t + 1});
    for (Timestamp l = 0; l < g.horizon; ++l) {
        for (const auto& h : run.betaEnv(l)) {
            auto r = std::get_if<GRecv>(&h);
            if (r == nullptr) continue;
            const GSend s{r->sender, r->recipient, r->payload, r->gmi};
            for (Timestamp m = 0; m < g.horizon; ++m) {
                bool sent = run.betaAgent(s.sender, m).count(GlobalHap{s}) > 0;
                for (const auto& e : run.betaEnv(m)) sent = sent || isFakeSendOf(e, s);
                if (sent) g.succ[Node{s.sender, m}].insert(Node{r->recipient, l + 1});
            }
        }
    }
    return g;
}

/// Calls `visit` on every path ending at `to`, each given source-first.
inline void forEachPathTo(const Graph& g, const Node& to,
                          const std::function<void(const std::vector<Node>&)>& visit) {
    std::map<Node, std::set<Node>> pred;
    for (const auto& [a, bs] : g.succ)
        for (const auto& b : bs) pred[b].insert(a);
    std::vector<Node> path{to};
    std::function<void()> walk = [&]() {
        std::vector<Node> forward(path.rbegin(), path.rend());
        visit(forward);
        for (const auto& p : pred[path.back()]) {
            path.push_back(p);
            walk();
            path.pop_back();
        }
    };
    walk();
}

struct Partition {
    std::set<Node> cone, buffer, masses;
};

inline Partition partitionOf(const Run& run, const Node& theta) {
    const Graph g = graphOf(run);
    auto correct = [&](const Node& n) { return run.nodeCorrect(n.agent, n.time); };
    std::set<Node> onPath, reliable;
    forEachPathTo(g, theta, [&](const std::vector<Node>& p) {
        onPath.insert(p.front());
        bool ok = correct(theta);
        for (std::size_t k = 0; k + 1 < p.size(); ++k)
            ok = ok && correct(Node{p[k].agent, p[k].time + 1});
        if (ok) reliable.insert(p.front());
    });
    Partition out;
    out.cone = reliable;
    for (const auto& n : onPath)
        if (n.time < theta.time && !correct(Node{n.agent, n.time + 1})) out.buffer.insert(n);
    for (int i = 1; i <= g.agents; ++i)
        for (Timestamp t = 0; t <= g.horizon; ++t) {
            const Node n{AgentId(i), t};
            if (!out.cone.count(n) && !out.buffer.count(n)) out.masses.insert(n);
        }
    return out;
}

/// Correct occurrences of an event o: nodes (j, m), m < before, with a correct
/// event of j in round m whose local form is o.
inline std::set<Node> occurrences(const Run& run, const LocalHap& o, Timestamp before) {
    std::set<Node> out;
    for (Timestamp m = 0; m < std::min(before, run.time()); ++m)
        for (const auto& h : run.betaEnv(m)) {
            LocalHap local;
            if (auto r = std::get_if<GRecv>(&h)) local = LocalRecv{r->sender, r->payload};
            else if (auto e = std::get_if<GExtEvent>(&h)) local = LocalExtEvent{e->label};
            else continue;
            if (local == o) out.insert(Node{AgentId(ownerAgent(h)), m});
        }
    return out;
}

/// Necessary condition for a multipede, by enumerating every S and every path.
inline bool theorem3Satisfied(const Run& run, const Node& theta, const LocalHap& o, int f) {
    const auto part = partitionOf(run, theta);
    std::set<int> byz;
    for (const auto& n : part.buffer) byz.insert(n.agent.value);
    std::vector<int> pool;
    for (int a = 1; a <= run.agents(); ++a)
        if (a != theta.agent.value && !byz.count(a)) pool.push_back(a);
    const int need = f - static_cast<int>(byz.size());
    const auto occ = occurrences(run, o, theta.time);
    const Graph g = graphOf(run);
    bool all = true;
    bool any = false;
    for (unsigned mask = 0; mask < (1u << pool.size()); ++mask) {
        if (__builtin_popcount(mask) != need) continue;
        any = true;
        std::set<int> banned = byz;
        for (std::size_t k = 0; k < pool.size(); ++k)
            if (mask & (1u << k)) banned.insert(pool[k]);
        bool witness = false;
        forEachPathTo(g, theta, [&](const std::vector<Node>& p) {
            if (!occ.count(p.front())) return;
            for (const auto& n : p)
                if (banned.count(n.agent.value)) return;
            witness = true;
        });
        all = all && witness;
    }
    return !any || all;
}

// ---------------------------------------------------------------------------
// Knowledge by scanning every point.

inline bool knows(const InterpretedSystem& sys, const TruthTable& sub, std::size_t run, Timestamp t, AgentId i) {
    const auto& mine = sys.run(run).localHistory(i, t);
    for (std::size_t r = 0; r < sys.universe().size(); ++r)
        for (Timestamp u = 0; u <= sys.run(r).time(); ++u)
            if (sys.run(r).localHistory(i, u) == mine && !sub[r][static_cast<std::size_t>(u)]) return false;
    return true;
}

inline TruthTable knowsTable(const InterpretedSystem& sys, const TruthTable& sub, AgentId i) {
    TruthTable out;
    for (std::size_t r = 0; r < sys.universe().size(); ++r) {
        out.emplace_back();
        for (Timestamp t = 0; t <= sys.run(r).time(); ++t) out.back().push_back(knows(sys, sub, r, t, i));
    }
    return out;
}

}  // namespace oracle
