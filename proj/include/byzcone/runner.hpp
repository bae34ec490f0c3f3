#pragma once

// Executes scenario queries against the scripted run and the run universe.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "byzcone/scenario.hpp"
#include "byzcone/surgery.hpp"

namespace byzcone {

enum class Verdict { Pass, Fail, Info };
std::string toString(Verdict v);

struct QueryOutcome {
    Query query;
    Verdict verdict = Verdict::Info;
    std::string summary;
    std::string report;
    /// Extra artifacts as (path relative to the output directory, content).
    std::vector<std::pair<std::string, std::string>> artifacts;
};

class ScenarioRunner {
public:
    explicit ScenarioRunner(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const AgentContext& context() const { return scenario_.ctx; }
    /// The run driven by the scenario's script, seed, or the minimal choice.
    const Run& scripted();
    /// Scripted run first, then the enumerated runs, then augmentations.
    InterpretedSystem& system();
    std::size_t baseRuns();

    QueryOutcome execute(const Query& q);
    std::vector<QueryOutcome> executeAll();

private:
    QueryOutcome verifyLemma5(const Query& q);
    QueryOutcome vat(const Query& q);
    QueryOutcome augment(const Query& q);

    Scenario scenario_;
    std::optional<Run> scripted_;
    std::optional<InterpretedSystem> system_;
    std::size_t baseRuns_ = 0;
};

/// Writes reports/, traces/ and graphs/ under `out`, plus reports/summary.txt.
void writeOutcomes(const std::filesystem::path& out, const std::string& scenarioName,
                   const std::vector<QueryOutcome>& outcomes);
std::string renderSummary(const std::string& scenarioName, const std::vector<QueryOutcome>& outcomes);
/// 0 if no query failed, 1 otherwise.
int exitCodeFor(const std::vector<QueryOutcome>& outcomes);

}  // namespace byzcone
