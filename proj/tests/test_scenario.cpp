#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "byzcone/trace.hpp"
#include "support.hpp"

using namespace byzcone;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> readTree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), root).string()] = s.str();
    }
    return out;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("byzcone-test-" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Scenario, MinimalFileTakesDefaults) {
    const auto sc = parseScenario("[system]\nagents = 1\n\n[queries]\nsimulate\n");
    EXPECT_EQ(sc.ctx.agents(), 1);
    EXPECT_EQ(sc.ctx.faultBound, 0);
    EXPECT_EQ(sc.ctx.horizon, 3);
    EXPECT_EQ(sc.budget, 200000u);
    EXPECT_TRUE(sc.enumerateUniverse);
    ScenarioRunner runner(sc);
    const auto outcomes = runner.executeAll();
    EXPECT_EQ(exitCodeFor(outcomes), 0);
    EXPECT_EQ(runner.scripted().time(), 3);
}

TEST(Scenario, IncoherentOptionNamesClause) {
    const std::string text =
        "[system]\nagents = 1\n[environment]\ndefault = {{go(1), sleep(1)}}\n[queries]\nsimulate\n";
    try {
        parseScenario(text);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("(a)"), std::string::npos) << e.what();
    }
}

TEST(Scenario, ParseErrorHasLineAndColumn) {
    try {
        parseScenario("[system]\nagents = 2\nhorizon = soon\n[queries]\nsimulate\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 11);
    }
    try {
        parseScenario("[system]\nagents = 2\n[environment]\ndefault = {{go(1), go(3)}}\n[queries]\nsimulate\n");
        FAIL() << "expected an error for agent 3";
    } catch (const std::exception& e) {
        EXPECT_TRUE(dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
                    dynamic_cast<const AlphabetError*>(&e))
            << e.what();
    }
}

TEST(Scenario, QueriesAreRequired) {
    EXPECT_THROW(parseScenario("[system]\nagents = 2\n"), ValidationError);
}

TEST(Scenario, FormulaMentioningUnknownAgentIsRejected) {
    EXPECT_ANY_THROW(parseScenario("[system]\nagents = 2\n[queries]\neval (K 3 true)\n"));
}

TEST(Scenario, OverridesApply) {
    const auto sc = loadScenario(support::scenarioDir() / "ghost.scn", ScenarioOverrides{4, 99, 7});
    EXPECT_EQ(sc.ctx.horizon, 4);
    EXPECT_EQ(sc.budget, 99u);
    EXPECT_EQ(sc.seed, std::optional<std::uint64_t>(7));
}

TEST(Scenario, HorizonOverrideMustCoverQueryNodes) {
    EXPECT_THROW(loadScenario(support::scenarioDir() / "ping.scn", ScenarioOverrides{3, std::nullopt, std::nullopt}),
                 ValidationError);
}

TEST(Scenario, BudgetExceededSurfaces) {
    const auto sc = loadScenario(support::scenarioDir() / "ping.scn", ScenarioOverrides{std::nullopt, 5, std::nullopt});
    ScenarioRunner runner(sc);
    EXPECT_THROW(runner.system(), ResourceError);
}

// Every shipped scenario runs with all of its queries passing.
TEST(Corpus, EveryScenarioPasses) {
    ASSERT_GE(support::corpusPaths().size(), 5u);
    for (const auto& path : support::corpusPaths()) {
        ScenarioRunner runner(loadScenario(path));
        const auto outcomes = runner.executeAll();
        for (const auto& o : outcomes)
            EXPECT_NE(o.verdict, Verdict::Fail) << path.filename() << ": " << o.summary;
        EXPECT_EQ(exitCodeFor(outcomes), 0);
    }
}

TEST(Corpus, OutputIsDeterministic) {
    for (const auto& path : support::corpusPaths()) {
        const auto a = scratch("a");
        const auto b = scratch("b");
        for (const auto& dir : {a, b}) {
            ScenarioRunner runner(loadScenario(path));
            writeOutcomes(dir, path.stem().string(), runner.executeAll());
        }
        const auto ta = readTree(a);
        EXPECT_FALSE(ta.empty());
        EXPECT_EQ(ta, readTree(b)) << path.filename();
        fs::remove_all(a);
        fs::remove_all(b);
    }
}

// Dumped runs parse back to the same β-sets and replay against their context.
TEST(Corpus, DumpsReplay) {
    for (const auto& path : support::corpusPaths()) {
        const auto sc = loadScenario(path);
        const auto runs = support::baseRuns(sc);
        for (std::size_t r = 0; r < runs.size(); r += std::max<std::size_t>(1, runs.size() / 20)) {
            const auto text = dumpRun(runs[r]);
            const auto back = parseRunDump(text, sc.ctx.alphabet);
            EXPECT_TRUE(sameBetaSets(back, runs[r]));
            EXPECT_EQ(back.time(), runs[r].time());
            EXPECT_EQ(dumpRun(back), text);
            const auto rep = replayRun(sc.ctx, back);
            EXPECT_TRUE(rep.pass()) << path.filename() << " run " << r << ": " << rep.detail;
        }
    }
}

TEST(Corpus, MalformedDumpIsRejected) {
    const auto sc = support::corpus("ghost");
    EXPECT_THROW(parseRunDump("round 0\nbeta-env = {go(1)\n", sc.ctx.alphabet), ParseError);
}
