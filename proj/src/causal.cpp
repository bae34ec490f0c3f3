#include "byzcone/causal.hpp"

#include <deque>
#include <sstream>

namespace byzcone {

std::string toString(const Node& n) {
    return std::to_string(n.agent.value) + "@" + std::to_string(n.time);
}

bool nodeCorrect(const Run& run, const Node& node) {
    if (node.time < 0 || node.time > run.time())
        throw std::out_of_range("node " + toString(node) + " outside run");
    return run.nodeCorrect(node.agent, node.time);
}

std::vector<Node> CausalGraph::predecessors(const Node& n) const {
    std::vector<Node> out;
    if (n.time > 0) out.push_back(Node{n.agent, n.time - 1});
    for (const auto& e : messageEdges)
        if (e.to == n) out.push_back(e.from);
    return out;
}

std::vector<Node> CausalGraph::successors(const Node& n) const {
    std::vector<Node> out;
    if (n.time < horizon) out.push_back(Node{n.agent, n.time + 1});
    for (const auto& e : messageEdges)
        if (e.from == n) out.push_back(e.to);
    return out;
}

std::vector<Node> CausalGraph::nodes() const {
    std::vector<Node> out;
    for (int a = 1; a <= agents; ++a)
        for (Timestamp t = 0; t <= horizon; ++t) out.push_back(Node{AgentId(a), t});
    return out;
}

CausalGraph buildCausalGraph(const Alphabet& ab, const Run& run) {
    CausalGraph g;
    g.agents = run.agents();
    g.horizon = run.time();
    for (Timestamp l1 = 0; l1 < run.time(); ++l1) {
        for (const auto& h : run.betaEnv(l1)) {
            const auto* recv = std::get_if<GRecv>(&h);
            if (recv == nullptr) continue;
            auto fields = ab.tryDecodeGmi(recv->gmi);
            if (!fields)
                throw IntegrityError("undecodable gmi #" + std::to_string(recv->gmi.code) +
                                     " in round " + std::to_string(l1));
            const Timestamp m = fields->time;
            if (m < 0 || m >= run.time()) continue;
            const GSend send{recv->sender, recv->recipient, recv->payload, recv->gmi};
            bool correct = run.betaAgent(recv->sender, m).count(GlobalHap{send}) > 0;
            bool fake = false;
            for (const auto& b : run.betaEnv(m)) {
                auto s = fakeSendOf(b);
                if (s && *s == send && ownerOf(b) == send.sender) fake = true;
            }
            if (!correct && !fake) continue;
            g.messageEdges.push_back(MessageEdge{Node{recv->sender, m},
                                                 Node{recv->recipient, l1 + 1}, recv->gmi,
                                                 recv->payload, !correct});
        }
    }
    return g;
}

namespace {

// Backward search from `to`; `admit` decides whether a predecessor may be entered.
template <typename Admit>
std::set<Node> reachBackward(const CausalGraph& g, const Node& to, Admit admit) {
    std::set<Node> seen{to};
    std::deque<Node> queue{to};
    while (!queue.empty()) {
        Node n = queue.front();
        queue.pop_front();
        for (const auto& p : g.predecessors(n)) {
            if (seen.count(p) || !admit(p)) continue;
            seen.insert(p);
            queue.push_back(p);
        }
    }
    return seen;
}

}  // namespace

bool pathExists(const CausalGraph& g, const Node& from, const Node& to) {
    return reachBackward(g, to, [](const Node&) { return true; }).count(from) > 0;
}

bool reliablePathExists(const Run& run, const CausalGraph& g, const Node& from, const Node& to) {
    if (!nodeCorrect(run, to)) return false;
    auto reach = reachBackward(g, to, [&](const Node& p) {
        return nodeCorrect(run, Node{p.agent, p.time + 1});
    });
    return reach.count(from) > 0;
}

ConePartition::Region ConePartition::regionOf(const Node& n) const {
    if (cone.count(n)) return Region::Cone;
    if (buffer.count(n)) return Region::Buffer;
    return Region::Masses;
}

std::set<Node> ConePartition::voiced() const {
    std::set<Node> out = cone;
    out.insert(buffer.begin(), buffer.end());
    return out;
}

std::string toString(ConePartition::Region r) {
    switch (r) {
        case ConePartition::Region::Cone: return "cone";
        case ConePartition::Region::Buffer: return "buffer";
        case ConePartition::Region::Masses: return "masses";
    }
    return "?";
}

ConePartition partition(const Run& run, const CausalGraph& g, const Node& theta) {
    if (theta.time < 0 || theta.time > run.time() || theta.agent.value < 1 ||
        theta.agent.value > run.agents())
        throw std::out_of_range("theta " + toString(theta) + " outside run");
    ConePartition p;
    p.theta = theta;
    if (nodeCorrect(run, theta))
        p.cone = reachBackward(g, theta, [&](const Node& n) {
            return nodeCorrect(run, Node{n.agent, n.time + 1});
        });
    for (const auto& n : reachBackward(g, theta, [](const Node&) { return true; }))
        if (n.time < theta.time && !nodeCorrect(run, Node{n.agent, n.time + 1}))
            p.buffer.insert(n);
    for (const auto& n : g.nodes())
        if (!p.cone.count(n) && !p.buffer.count(n)) p.masses.insert(n);
    return p;
}

ConePartition partition(const Alphabet& ab, const Run& run, const Node& theta) {
    return partition(run, buildCausalGraph(ab, run), theta);
}

std::string toDot(const CausalGraph& g, const ConePartition& p) {
    auto id = [](const Node& n) {
        return "n" + std::to_string(n.agent.value) + "_" + std::to_string(n.time);
    };
    std::ostringstream out;
    out << "digraph causal {\n  rankdir=LR;\n  node [shape=circle, style=filled, fontsize=10];\n";
    for (const auto& n : g.nodes()) {
        const char* color = "gray80";
        switch (p.regionOf(n)) {
            case ConePartition::Region::Cone: color = "palegreen"; break;
            case ConePartition::Region::Buffer: color = "orange"; break;
            case ConePartition::Region::Masses: break;
        }
        out << "  " << id(n) << " [label=\"" << toString(n) << "\", fillcolor=" << color;
        if (n == p.theta) out << ", penwidth=3";
        out << "];\n";
    }
    for (const auto& n : g.nodes())
        if (n.time < g.horizon)
            out << "  " << id(n) << " -> " << id(Node{n.agent, n.time + 1}) << " [color=gray50];\n";
    for (const auto& e : g.messageEdges) {
        out << "  " << id(e.from) << " -> " << id(e.to) << " [label=\"" << e.payload << " #"
            << e.gmi.code << "\"";
        if (e.byzantineSource) out << ", style=dashed";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace byzcone
