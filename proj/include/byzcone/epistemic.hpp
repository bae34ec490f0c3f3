#pragma once

// Model checking of epistemic formulas over a bounded run universe, and the
// multipede conditions relating hope to the reliable causal cone.
//
// K_i quantifies over every point (r', t') of the universe with t' up to the
// length of r'. Negative verdicts are sound when the universe contains the
// refuting run; positive verdicts over-approximate.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "byzcone/causal.hpp"
#include "byzcone/formula.hpp"

namespace byzcone {

struct Point {
    std::size_t run = 0;
    Timestamp time = 0;
    auto operator<=>(const Point&) const = default;
};

/// Custom propositions only; designated atoms are never valuated.
using Valuation = std::map<std::string, std::set<Point>>;
/// [run][t] for t = 0..run.time().
using TruthTable = std::vector<std::vector<bool>>;

class InterpretedSystem {
public:
    InterpretedSystem(Alphabet alphabet, RunUniverse universe, Valuation valuation = {});

    const Alphabet& alphabet() const { return alphabet_; }
    const RunUniverse& universe() const { return universe_; }
    const Run& run(std::size_t idx) const { return universe_.at(idx); }
    const Valuation& valuation() const { return valuation_; }
    std::size_t pointCount() const;

    std::size_t addRun(Run r);

    /// Points whose local state for `agent` equals that at p.
    const std::vector<Point>& classOf(AgentId agent, const Point& p) const;
    /// Every indistinguishability class for `agent`.
    const std::vector<std::vector<Point>>& classes(AgentId agent) const;

    TruthTable evaluate(const FormulaPtr& phi) const;
    bool holds(const FormulaPtr& phi, std::size_t run, Timestamp t) const;

private:
    void index(std::size_t runIdx);

    Alphabet alphabet_;
    RunUniverse universe_;
    Valuation valuation_;
    // Per agent: local state -> class id, class members, and [run][t] -> class id.
    std::vector<std::map<LocalHistory, std::size_t>> classIds_;
    std::vector<std::vector<std::vector<Point>>> members_;
    std::vector<std::vector<std::vector<std::size_t>>> pointClass_;
};

/// Truth of a designated or custom atom. Throws std::out_of_range past the run's end.
bool evalAtom(const InterpretedSystem& sys, std::size_t run, Timestamp t, const Formula& atom);
bool localStateEqual(const Run& r1, Timestamp t1, const Run& r2, Timestamp t2, AgentId agent);
bool evalK(const InterpretedSystem& sys, std::size_t run, Timestamp t, AgentId agent,
           const FormulaPtr& sub);
bool evalHope(const InterpretedSystem& sys, std::size_t run, Timestamp t, AgentId agent,
              const FormulaPtr& sub);

/// A pair of indistinguishable points on which φ differs, if any.
std::optional<std::pair<Point, Point>> localizationCounterexample(const InterpretedSystem& sys,
                                                                  const FormulaPtr& phi,
                                                                  AgentId agent);
bool checkLocalized(const InterpretedSystem& sys, const FormulaPtr& phi, AgentId agent);

/// Nodes (j, m), m < θ.time, whose round m+½ holds a correct event O of j with local(O) = o.
std::vector<Node> correctOccurrences(const Alphabet& ab, const Run& run, const LocalHap& o,
                                     Timestamp before);

/// Every correct occurrence of o before θ lies outside the cone.
bool checkTheorem2Premise(const Alphabet& ab, const Run& run, const Node& theta, const LocalHap& o);

/// Every universe run agreeing with `run` on θ's local state at θ.time has a
/// correct occurrence of o at a cone node.
bool checkMultipedeBounded(const InterpretedSystem& sys, std::size_t run, const Node& theta,
                           const LocalHap& o);

struct Theorem3Entry {
    std::set<AgentId> excluded;  // S
    std::optional<Node> witness;
    std::vector<Node> path;
};

struct Theorem3Report {
    Node theta;
    std::set<AgentId> byz;
    int faultBound = 0;
    std::vector<Theorem3Entry> entries;
    /// No S of the required size exists.
    bool vacuous = false;
    bool satisfied() const;
};

/// Throws IntegrityError if the buffer involves more than f agents and
/// std::invalid_argument if θ is not correct.
Theorem3Report checkTheorem3Necessary(const Alphabet& ab, const Run& run, const Node& theta,
                                      const LocalHap& o, int f);

std::string renderTruthTable(const InterpretedSystem& sys, const TruthTable& table);
std::string renderTheorem3(const Theorem3Report& report);

}  // namespace byzcone
