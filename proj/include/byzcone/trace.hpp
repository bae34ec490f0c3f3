#pragma once

// Text dump of a run (α/β-sets per round and the adversary choices) and its
// replay against an agent-context.

#include <string>
#include <string_view>

#include "byzcone/transition.hpp"

namespace byzcone {

std::string dumpRun(const Run& run);
/// Rebuilds the run from its dumped β-sets. Throws ParseError.
Run parseRunDump(std::string_view text, const Alphabet& ab);

struct ReplayReport {
    /// Re-filtering each certified round's α-sets gives the dumped β-sets.
    bool filtersReproduce = true;
    /// Re-running the dumped adversary choices gives the dumped β-sets.
    bool choicesReproduce = true;
    std::string detail;
    bool pass() const { return filtersReproduce && choicesReproduce; }
};

ReplayReport replayRun(const AgentContext& ctx, const Run& dumped);

}  // namespace byzcone
