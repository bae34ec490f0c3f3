#include <gtest/gtest.h>

#include "byzcone/hap_text.hpp"
#include "byzcone/protocol.hpp"
#include "support.hpp"

using namespace byzcone;

namespace {

const AgentId one(1);
const AgentId two(2);

EnvProtocol envOf(EventRange range) {
    EnvProtocol env;
    env.setDefault(std::move(range));
    return env;
}

// Every coherent subset of `pool` at time t.
EventRange coherentPowerset(const Alphabet& ab, const std::vector<GlobalHap>& pool, Timestamp t) {
    EventRange out;
    for (unsigned mask = 0; mask < (1u << pool.size()); ++mask) {
        HapSet s;
        for (std::size_t k = 0; k < pool.size(); ++k)
            if (mask & (1u << k)) s.insert(pool[k]);
        if (checkTCoherent(ab, s, t).coherent()) out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(Coherency, TwoSystemEventsViolateA) {
    const Alphabet ab(1, {}, {}, {}, 0, 3);
    const auto rep = checkTCoherent(ab, {Go{one}, Sleep{one}}, 0);
    EXPECT_TRUE(rep.violates('a'));
    EXPECT_FALSE(rep.violates('b'));
}

TEST(Coherency, FakeBesideCorrectViolatesB) {
    const Alphabet ab(2, {"m"}, {}, {}, 0, 3);
    const GRecv r{one, two, "m", ab.encodeGmi(two, one, "m", 0, 0)};
    EXPECT_TRUE(checkTCoherent(ab, {r, Fake{one, r}}, 1).violates('b'));
    // A fake receive of a different payload is fine.
    const Alphabet ab2(2, {"m", "n"}, {}, {}, 0, 3);
    const GRecv rn{one, two, "n", ab2.encodeGmi(two, one, "n", 0, 0)};
    const GRecv rm{one, two, "m", ab2.encodeGmi(two, one, "m", 0, 0)};
    EXPECT_TRUE(checkTCoherent(ab2, {rm, Fake{one, rn}}, 1).coherent());
}

TEST(Coherency, ByzantineSendIdentifierMustMatchRound) {
    const Alphabet ab(2, {"m"}, {}, {}, 0, 4);
    for (Timestamp t = 0; t < 4; ++t) {
        const GSend good{one, two, "m", ab.encodeGmi(one, two, "m", 0, t)};
        EXPECT_TRUE(checkTCoherent(ab, {FakeAction{one, good, Noop{}}}, t).coherent());
        EXPECT_TRUE(checkTCoherent(ab, {FakeAction{one, Noop{}, good}}, t).coherent());
        const GSend stale{one, two, "m", ab.encodeGmi(one, two, "m", 0, (t + 1) % 4)};
        EXPECT_TRUE(checkTCoherent(ab, {FakeAction{one, stale, Noop{}}}, t).violates('c'));
    }
}

TEST(Coherency, ActionsAreRejected) {
    const Alphabet ab(2, {"m"}, {}, {}, 0, 4);
    EXPECT_THROW(checkTCoherent(ab, {GSend{one, two, "m", ab.encodeGmi(one, two, "m", 0, 0)}}, 0), FormatError);
}

TEST(EnvProtocol, ValidationNamesClause) {
    const Alphabet ab(1, {}, {}, {}, 0, 3);
    EnvProtocol env = envOf({{Go{one}, Sleep{one}}});
    try {
        env.validate(ab, 3);
        FAIL() << "expected a protocol error";
    } catch (const ProtocolError& e) {
        EXPECT_NE(std::string(e.what()).find("t-coherency (a)"), std::string::npos) << e.what();
    }
}

TEST(EnvProtocol, TimestampOverridesDefault) {
    EnvProtocol env = envOf({{Go{one}}});
    env.setRange(1, {{}, {Sleep{one}}});
    EXPECT_EQ(env.range(0).size(), 1u);
    EXPECT_EQ(env.range(1).size(), 2u);
    EXPECT_EQ(env.range(2).size(), 1u);
}

TEST(AgentProtocol, LookupOrderAndNonEmptyRanges) {
    const Alphabet ab(2, {"m"}, {"e"}, {"a"}, 0, 3);
    AgentProtocol p;
    EXPECT_EQ(p.range(LocalHistory{"s0", {}}), (ActionRange{LocalSet{}}));
    p.setDefault({{LocalIntAction{"a"}}});
    ProtocolRule rule;
    rule.guard.push_back(HistoryCondition{HistoryCondition::Kind::NonEmpty, {}, {}});
    rule.range = {{LocalSend{two, "m", 0}}, {}};
    p.addRule(rule);
    const LocalHistory busy{"s0", {LocalSet{LocalExtEvent{"e"}}}};
    p.addEntry(busy, {{}});
    EXPECT_EQ(p.range(LocalHistory{"s0", {}}).size(), 1u);
    EXPECT_EQ(p.range(LocalHistory{"s0", {LocalSet{}}}).size(), 2u);
    EXPECT_EQ(p.range(busy), (ActionRange{LocalSet{}}));
    EXPECT_NO_THROW(p.validate(ab, one));

    AgentProtocol bad;
    EXPECT_THROW(bad.setDefault({}), ProtocolError);
    AgentProtocol events;
    events.setDefault({{LocalExtEvent{"e"}}});
    EXPECT_THROW(events.validate(ab, one), ProtocolError);
}

TEST(AgentType, OnlyGoIsCorrectableNotGullible) {
    const Alphabet ab(1, {}, {"e"}, {}, 0, 3);
    const EnvProtocol env = envOf({{Go{one}}});
    EXPECT_TRUE(checkAgentType(ab, env, one, AgentType::Correctable, 3));
    EXPECT_FALSE(checkAgentType(ab, env, one, AgentType::Gullible, 3));
    EXPECT_FALSE(checkAgentType(ab, env, one, AgentType::Delayable, 3));
}

TEST(AgentType, DelayableWhenAgentFreeSetsOffered) {
    const Alphabet ab(2, {}, {"e"}, {}, 0, 3);
    const EnvProtocol env = envOf({{Go{one}, Go{two}}, {Go{two}}, {Go{one}}, {}});
    EXPECT_TRUE(checkAgentType(ab, env, one, AgentType::Delayable, 3));
    EXPECT_TRUE(checkAgentType(ab, env, two, AgentType::Delayable, 3));
    const EnvProtocol partial = envOf({{Go{one}, Go{two}}, {Go{two}}});
    EXPECT_TRUE(checkAgentType(ab, partial, one, AgentType::Delayable, 3));
    EXPECT_FALSE(checkAgentType(ab, partial, two, AgentType::Delayable, 3));
}

// The environment offering every coherent set over agent 1's events is fully
// byzantine; dropping {fail(1)} breaks both fault closures but not the others.
TEST(AgentType, PowersetEnvironmentIsFullyByzantine) {
    const Alphabet ab(1, {}, {"e"}, {}, 0, 2);
    std::vector<GlobalHap> pool{Go{one}, GExtEvent{one, "e"}};
    for (const auto& h : boundedFEvents(ab, one, 0)) pool.push_back(h);
    ASSERT_LE(pool.size(), 10u);
    EnvProtocol env = envOf(coherentPowerset(ab, pool, 0));
    env.setRange(1, coherentPowerset(ab, pool, 1));
    const auto verdict = checkAgentTypeDetailed(ab, env, one, AgentType::FullyByzantine, 2);
    EXPECT_TRUE(verdict.holds) << verdict.counterexample;
    EXPECT_TRUE(verdict.exhaustive);

    EventRange pruned;
    for (const auto& s : coherentPowerset(ab, pool, 0))
        if (s != HapSet{fail(one)}) pruned.push_back(s);
    const EnvProtocol env2 = envOf(pruned);
    EXPECT_FALSE(checkAgentType(ab, env2, one, AgentType::Gullible, 1));
    EXPECT_FALSE(checkAgentType(ab, env2, one, AgentType::ErrorProne, 1));
    EXPECT_TRUE(checkAgentType(ab, env2, one, AgentType::Correctable, 1));
    EXPECT_TRUE(checkAgentType(ab, env2, one, AgentType::Delayable, 1));
}

TEST(AgentType, ClosureFlagsMakeTypesHold) {
    const Alphabet ab(2, {"m"}, {"e"}, {}, 0, 3);
    EnvProtocol env = envOf({{Go{one}, Go{two}, GExtEvent{one, "e"}}});
    EXPECT_FALSE(checkAgentType(ab, env, one, AgentType::FullyByzantine, 3));
    env.setClosure(one, ClosureFlags{false, true, true, true});
    EXPECT_TRUE(checkAgentType(ab, env, one, AgentType::FullyByzantine, 3));
    EXPECT_TRUE(env.offers(ab, 1, {Go{two}, fail(one)}));
    EXPECT_FALSE(env.offers(ab, 1, {fail(two)}));
}

// Property over generated environments: gullible implies delayable, and
// error-prone implies correctable.
TEST(AgentType, ImplicationsOnGeneratedEnvironments) {
    const Alphabet ab(2, {"m"}, {"e"}, {}, 0, 2);
    support::Gen gen(3);
    std::vector<GlobalHap> pool{Go{one}, Go{two}, GExtEvent{one, "e"}, GExtEvent{two, "e"}, fail(one), fail(two),
                                Sleep{one}, Fake{one, GExtEvent{one, "e"}}};
    int gullible = 0, errorProne = 0;
    for (int round = 0; round < 150; ++round) {
        EventRange range;
        const int options = gen.range(1, 10);
        while (static_cast<int>(range.size()) < options) {
            HapSet s;
            for (const auto& h : pool)
                if (gen.coin(0.3)) s.insert(h);
            if (checkTCoherent(ab, s, 0).coherent()) range.push_back(s);
        }
        EnvProtocol env = envOf(range);
        if (gen.coin(0.3)) env.setClosure(one, ClosureFlags{gen.coin(), gen.coin(), gen.coin(), gen.coin()});
        for (AgentId i : {one, two}) {
            if (checkAgentType(ab, env, i, AgentType::Gullible, 2)) {
                ++gullible;
                EXPECT_TRUE(checkAgentType(ab, env, i, AgentType::Delayable, 2));
            }
            if (checkAgentType(ab, env, i, AgentType::ErrorProne, 2)) {
                ++errorProne;
                EXPECT_TRUE(checkAgentType(ab, env, i, AgentType::Correctable, 2));
            }
        }
    }
    EXPECT_GT(gullible, 0);
    EXPECT_GT(errorProne, 0);
}

TEST(AgentContext, FaultBoundAndHorizonChecked) {
    AgentContext ctx;
    ctx.alphabet = Alphabet(2, {}, {}, {}, 0, 3);
    ctx.protocols.assign(2, AgentProtocol{});
    ctx.initialStates = {{"s0", "s0"}};
    ctx.faultBound = 3;
    EXPECT_THROW(ctx.validate(), ProtocolError);
    ctx.faultBound = 2;
    EXPECT_NO_THROW(ctx.validate());
    ctx.horizon = 0;
    EXPECT_THROW(ctx.validate(), ProtocolError);
}
