#pragma once

// Scenario files: the agent-context, adversary script, universe policy and a
// list of declarative queries. The grammar is documented in docs/scenario.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "byzcone/causal.hpp"
#include "byzcone/epistemic.hpp"
#include "byzcone/transition.hpp"

namespace byzcone {

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Expectation {
    enum class Kind { None, Everywhere, Nowhere, At, Bool };
    Kind kind = Kind::None;
    bool value = true;
    Point at;
};

struct Query {
    enum class Kind {
        Simulate,
        Enumerate,
        Partition,
        Adjust,
        VerifyLemma5,
        Vat,
        AugmentVat,
        AugmentCone,
        AugmentSeeded,
        Eval,
        ConeHope,
        MultipedeNecessary,
        MultipedeBounded,
        Ghost,
    };

    Kind kind = Kind::Simulate;
    int line = 0;
    std::string text;
    std::optional<Node> theta;
    /// verify-lemma5 / vat over every correct θ or time of the scripted run.
    bool all = false;
    AgentId agent;
    Timestamp time = 0;
    FormulaPtr formula;
    LocalHap hap;
    Expectation expect;
    std::uint64_t atLeast = 0;
    std::vector<AgentId> bufferAgents;
    bool checkBuffer = false;
};

std::string toString(Query::Kind k);

struct Scenario {
    std::string name;
    AgentContext ctx;
    AdversaryScript script;
    std::optional<std::uint64_t> seed;
    bool enumerateUniverse = true;
    std::uint64_t budget = 200000;
    std::vector<Query> queries;
};

struct ScenarioOverrides {
    std::optional<Timestamp> horizon;
    std::optional<std::uint64_t> budget;
    std::optional<std::uint64_t> seed;
};

/// Throws ParseError with line/column or ValidationError naming the invariant.
Scenario parseScenario(std::string_view text, const std::string& name = "scenario",
                       const ScenarioOverrides& overrides = {});
Scenario loadScenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

/// Parses one query line (as written in the [queries] section).
Query parseQuery(std::string_view line, int lineNo);

Node parseNode(Cursor& c);

}  // namespace byzcone
