#pragma once

// Causal graph of a run, reliable paths, and the cone / buffer / masses
// partition of the agent-time nodes relative to a node θ.

#include <set>
#include <string>
#include <vector>

#include "byzcone/run.hpp"

namespace byzcone {

struct Node {
    AgentId agent;
    Timestamp time = 0;
    auto operator<=>(const Node&) const = default;
};

std::string toString(const Node& n);

class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool nodeCorrect(const Run& run, const Node& node);

struct MessageEdge {
    Node from;
    Node to;
    Gmi gmi;
    std::string payload;
    /// The source is a fake send in β_ε rather than a correct send.
    bool byzantineSource = false;
    auto operator<=>(const MessageEdge&) const = default;
};

/// Local edges (i,t) → (i,t+1) are implicit up to the run's time.
struct CausalGraph {
    int agents = 0;
    Timestamp horizon = 0;
    std::vector<MessageEdge> messageEdges;

    std::vector<Node> predecessors(const Node& n) const;
    std::vector<Node> successors(const Node& n) const;
    std::vector<Node> nodes() const;
};

/// Throws IntegrityError if a correct receive carries an undecodable GMI.
CausalGraph buildCausalGraph(const Alphabet& ab, const Run& run);

bool pathExists(const CausalGraph& g, const Node& from, const Node& to);
bool reliablePathExists(const Run& run, const CausalGraph& g, const Node& from, const Node& to);

struct ConePartition {
    Node theta;
    std::set<Node> cone;
    std::set<Node> buffer;
    std::set<Node> masses;

    enum class Region { Cone, Buffer, Masses };
    Region regionOf(const Node& n) const;
    /// cone ∪ buffer, the focus handed to Chatter.
    std::set<Node> voiced() const;
};

std::string toString(ConePartition::Region r);

ConePartition partition(const Run& run, const CausalGraph& g, const Node& theta);
ConePartition partition(const Alphabet& ab, const Run& run, const Node& theta);

/// Graphviz rendering: cone green, buffer orange, masses gray, fake sends dashed.
std::string toDot(const CausalGraph& g, const ConePartition& p);

}  // namespace byzcone
