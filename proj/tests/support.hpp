#pragma once

// Corpus access and hand-rolled generators shared by the test binaries.

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "byzcone/runner.hpp"
#include "byzcone/scenario.hpp"

namespace support {

using namespace byzcone;

inline std::filesystem::path scenarioDir() { return BYZCONE_SCENARIO_DIR; }

inline std::vector<std::filesystem::path> corpusPaths() {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(scenarioDir()))
        if (e.path().extension() == ".scn") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline Scenario corpus(const std::string& name) { return loadScenario(scenarioDir() / (name + ".scn")); }

/// Scripted run first, then every enumerated run (when the scenario enumerates).
inline RunUniverse baseRuns(const Scenario& sc) {
    ScenarioRunner runner(sc);
    const auto& sys = runner.system();
    return RunUniverse(sys.universe().begin(), sys.universe().begin() + static_cast<long>(runner.baseRuns()));
}

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs.at(static_cast<std::size_t>(range(0, static_cast<int>(xs.size()) - 1)));
    }
};

/// A small alphabet for generated haps: 3 agents, two payloads, one event, one action.
inline Alphabet smallAlphabet() { return Alphabet(3, {"m", "n"}, {"e"}, {"a"}, 1, 4); }

inline GSend genSend(Gen& g, const Alphabet& ab) {
    const int s = g.range(1, ab.agents());
    int r = g.range(1, ab.agents() - 1);
    if (r >= s) ++r;
    const auto& payload = g.pick(ab.messages());
    const int copy = g.range(0, ab.maxCopies());
    const int time = g.range(0, ab.horizon() - 1);
    return GSend{AgentId(s), AgentId(r), payload, ab.encodeGmi(AgentId(s), AgentId(r), payload, copy, time)};
}

inline GRecv recvOf(const GSend& s) { return GRecv{s.recipient, s.sender, s.payload, s.gmi}; }

inline GlobalHap genHap(Gen& g, const Alphabet& ab) {
    const AgentId i(g.range(1, ab.agents()));
    switch (g.range(0, 9)) {
        case 0: return genSend(g, ab);
        case 1: return recvOf(genSend(g, ab));
        case 2: return GExtEvent{i, ab.extEvents().front()};
        case 3: return GIntAction{i, g.range(0, ab.horizon() - 1), ab.intActions().front()};
        case 4: {
            GRecv r = recvOf(genSend(g, ab));
            return Fake{r.recipient, r};
        }
        case 5: {
            GSend s = genSend(g, ab);
            return FakeAction{s.sender, s, Noop{}};
        }
        case 6: return fail(i);
        case 7: return Go{i};
        case 8: return Sleep{i};
        default: return Hibernate{i};
    }
}

}  // namespace support
