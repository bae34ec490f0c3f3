#include "byzcone/scenario.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace byzcone {

std::string toString(Query::Kind k) {
    switch (k) {
        case Query::Kind::Simulate: return "simulate";
        case Query::Kind::Enumerate: return "enumerate";
        case Query::Kind::Partition: return "partition";
        case Query::Kind::Adjust: return "adjust";
        case Query::Kind::VerifyLemma5: return "verify-lemma5";
        case Query::Kind::Vat: return "vat";
        case Query::Kind::AugmentVat: return "augment-vat";
        case Query::Kind::AugmentCone: return "augment-cone";
        case Query::Kind::AugmentSeeded: return "augment-seeded";
        case Query::Kind::Eval: return "eval";
        case Query::Kind::ConeHope: return "cone-hope";
        case Query::Kind::MultipedeNecessary: return "multipede-necessary";
        case Query::Kind::MultipedeBounded: return "multipede-bounded";
        case Query::Kind::Ghost: return "ghost";
    }
    return "?";
}

Node parseNode(Cursor& c) {
    const int a = c.integer();
    c.expect("@");
    return Node{AgentId(a), c.integer()};
}

namespace {

struct Line {
    int number = 0;
    std::string text;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> splitWords(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

// Joins backslash continuations and drops comment and blank lines, grouped by section.
std::map<std::string, std::vector<Line>> sections(std::string_view text) {
    std::map<std::string, std::vector<Line>> out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int number = 0;
    Line pending;
    bool continuing = false;
    while (std::getline(in, raw)) {
        ++number;
        std::string t = trim(raw);
        if (!continuing && (t.empty() || t[0] == '#')) continue;
        if (!continuing) pending = Line{number, ""};
        const bool more = !t.empty() && t.back() == '\\';
        if (more) t.pop_back();
        pending.text += (pending.text.empty() ? "" : " ") + trim(t);
        continuing = more;
        if (continuing) continue;
        if (pending.text.front() == '[') {
            if (pending.text.back() != ']')
                throw ParseError("malformed section header", pending.number, 1);
            section = trim(pending.text.substr(1, pending.text.size() - 2));
            if (section != "system" && section != "protocols" && section != "environment" &&
                section != "adversary" && section != "queries")
                throw ParseError("unknown section [" + section + "]", pending.number, 1);
            out[section];
            continue;
        }
        if (section.empty()) throw ParseError("entry outside any section", pending.number, 1);
        out[section].push_back(pending);
    }
    if (continuing) throw ParseError("dangling line continuation", pending.number, 1);
    return out;
}

std::pair<std::string, std::string> keyValue(const Line& l) {
    const auto eq = l.text.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", l.number, 1);
    return {trim(l.text.substr(0, eq)), trim(l.text.substr(eq + 1))};
}

int toInt(const std::string& s, const Line& l) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        const auto at = l.text.find(s);
        throw ParseError("expected an integer, got '" + s + "'", l.number,
                         at == std::string::npos ? 1 : static_cast<int>(at) + 1);
    }
}

std::vector<AgentId> parseWho(Cursor& c, int agents) {
    if (c.consume("*")) {
        std::vector<AgentId> all;
        for (int k = 1; k <= agents; ++k) all.emplace_back(k);
        return all;
    }
    const int a = c.integer();
    if (a < 1 || a > agents) c.fail("undeclared agent " + std::to_string(a));
    return {AgentId(a)};
}

HistoryCondition parseCondition(Cursor& c) {
    const std::string kind = c.word();
    HistoryCondition cond;
    if (kind == "empty") {
        cond.kind = HistoryCondition::Kind::Empty;
    } else if (kind == "nonempty") {
        cond.kind = HistoryCondition::Kind::NonEmpty;
    } else if (kind == "has") {
        cond.kind = HistoryCondition::Kind::Has;
        cond.hap = parseLocalHap(c);
    } else if (kind == "lacks") {
        cond.kind = HistoryCondition::Kind::Lacks;
        cond.hap = parseLocalHap(c);
    } else if (kind == "last-has") {
        cond.kind = HistoryCondition::Kind::LastHas;
        cond.hap = parseLocalHap(c);
    } else if (kind == "initial") {
        cond.kind = HistoryCondition::Kind::InitialIs;
        cond.initial = c.label();
    } else {
        c.fail("unknown history condition '" + kind + "'");
    }
    return cond;
}

void parseProtocolLine(const Line& l, AgentContext& ctx) {
    Cursor c(l.text, l.number);
    const auto who = parseWho(c, ctx.agents());
    const std::string kind = c.word();
    auto finish = [&]() {
        c.expect("=");
        auto range = parseLocalRange(c);
        if (!c.atEnd()) c.fail("trailing input");
        if (range.empty()) c.fail("protocol range must be nonempty");
        for (AgentId i : who)
            for (const auto& option : range)
                for (const auto& h : option) {
                    if (!isAction(h)) c.fail("protocols offer actions only, got " + render(h));
                    try {
                        ctx.alphabet.validate(h, i);
                    } catch (const AlphabetError& e) {
                        c.fail(e.what());
                    }
                }
        return range;
    };
    if (kind == "default") {
        auto range = finish();
        for (AgentId i : who) ctx.protocols[i.index()].setDefault(range);
    } else if (kind == "when") {
        ProtocolRule rule;
        rule.guard.push_back(parseCondition(c));
        while (c.consume("&")) rule.guard.push_back(parseCondition(c));
        rule.range = finish();
        for (AgentId i : who) ctx.protocols[i.index()].addRule(rule);
    } else if (kind == "history") {
        LocalHistory h;
        h.initial = c.label();
        while (c.consume("|")) h.records.push_back(parseLocalSet(c));
        auto range = finish();
        for (AgentId i : who) ctx.protocols[i.index()].addEntry(h, range);
    } else {
        c.fail("expected default, when or history");
    }
}

ClosureFlags parseFlags(Cursor& c) {
    ClosureFlags fl;
    while (!c.atEnd()) {
        const std::string w = c.word();
        if (w == "correctable") fl.correctable = true;
        else if (w == "delayable") fl.delayable = true;
        else if (w == "error-prone") fl.errorProne = true;
        else if (w == "gullible") fl.gullible = true;
        else if (w == "fully-byzantine") fl.errorProne = fl.gullible = true;
        else if (w == "none") {}
        else c.fail("unknown closure flag '" + w + "'");
    }
    return fl;
}

void parseEnvironmentLine(const Line& l, AgentContext& ctx) {
    Cursor c(l.text, l.number);
    if (c.peek() >= '0' && c.peek() <= '9') {
        const int t = c.integer();
        c.expect("=");
        auto range = parseHapRange(c, ctx.alphabet);
        if (!c.atEnd()) c.fail("trailing input");
        if (range.empty()) c.fail("environment range must be nonempty");
        ctx.env.setRange(t, std::move(range));
        return;
    }
    const std::string kind = c.word();
    if (kind == "default") {
        c.expect("=");
        auto range = parseHapRange(c, ctx.alphabet);
        if (!c.atEnd()) c.fail("trailing input");
        if (range.empty()) c.fail("environment range must be nonempty");
        ctx.env.setDefault(std::move(range));
    } else if (kind == "closure") {
        const auto who = parseWho(c, ctx.agents());
        c.expect("=");
        const auto flags = parseFlags(c);
        for (AgentId i : who) ctx.env.setClosure(i, flags);
    } else {
        c.fail("expected default, closure or a timestamp");
    }
}

Expectation parseBoolExpect(Cursor& c) {
    Expectation e;
    if (!c.consume("expect")) return e;
    const std::string w = c.word();
    e.kind = Expectation::Kind::Bool;
    if (w == "true" || w == "satisfied") e.value = true;
    else if (w == "false" || w == "violated") e.value = false;
    else c.fail("expected true/false or satisfied/violated");
    return e;
}

}  // namespace

Query parseQuery(std::string_view line, int lineNo) {
    Cursor c(line, lineNo);
    Query q;
    q.line = lineNo;
    q.text = trim(line);
    const std::string head = c.word();
    using K = Query::Kind;
    if (head == "simulate") {
        q.kind = K::Simulate;
    } else if (head == "enumerate") {
        q.kind = K::Enumerate;
        if (c.consume("at-least")) q.atLeast = static_cast<std::uint64_t>(c.integer());
    } else if (head == "partition") {
        q.kind = K::Partition;
        q.theta = parseNode(c);
        if (c.consume("buffer-agents")) {
            q.checkBuffer = true;
            while (!c.atEnd()) q.bufferAgents.emplace_back(c.integer());
        }
    } else if (head == "adjust") {
        q.kind = K::Adjust;
        q.theta = parseNode(c);
    } else if (head == "verify-lemma5") {
        q.kind = K::VerifyLemma5;
        if (c.consume("all")) q.all = true;
        else q.theta = parseNode(c);
    } else if (head == "vat") {
        q.kind = K::Vat;
        q.agent = AgentId(c.integer());
        if (c.consume("all")) q.all = true;
        else q.time = c.integer();
    } else if (head == "augment") {
        const std::string what = c.word();
        if (what == "vat") {
            q.kind = K::AugmentVat;
            q.agent = AgentId(c.integer());
        } else if (what == "cone") {
            q.kind = K::AugmentCone;
            q.theta = parseNode(c);
        } else if (what == "seeded") {
            q.kind = K::AugmentSeeded;
            q.theta = parseNode(c);
        } else {
            c.fail("augment takes vat, cone or seeded");
        }
    } else if (head == "eval") {
        q.kind = K::Eval;
        q.formula = parseFormula(c);
        if (c.consume("expect")) {
            if (c.consume("all-true")) {
                q.expect.kind = Expectation::Kind::Everywhere;
            } else if (c.consume("all-false")) {
                q.expect.kind = Expectation::Kind::Nowhere;
            } else {
                q.expect.kind = Expectation::Kind::At;
                const int r = c.integer();
                c.expect("@");
                q.expect.at = Point{static_cast<std::size_t>(r), c.integer()};
                const std::string v = c.word();
                if (v != "true" && v != "false") c.fail("expected true or false");
                q.expect.value = v == "true";
            }
        }
    } else if (head == "cone-hope") {
        q.kind = K::ConeHope;
        q.theta = parseNode(c);
        q.hap = parseHapArgument(c);
    } else if (head == "multipede-necessary" || head == "multipede-bounded") {
        q.kind = head == "multipede-necessary" ? K::MultipedeNecessary : K::MultipedeBounded;
        q.theta = parseNode(c);
        q.hap = parseHapArgument(c);
        q.expect = parseBoolExpect(c);
    } else if (head == "ghost") {
        q.kind = K::Ghost;
        q.theta = parseNode(c);
    } else {
        c.fail("unknown query '" + head + "'");
    }
    if (!c.atEnd()) c.fail("trailing input in query");
    return q;
}

Scenario parseScenario(std::string_view text, const std::string& name,
                       const ScenarioOverrides& overrides) {
    auto secs = sections(text);
    Scenario sc;
    sc.name = name;

    int agents = 0;
    int f = 0;
    Timestamp horizon = 3;
    int maxCopies = 0;
    std::vector<std::string> messages, events, actions;
    std::vector<GlobalInitialState> initials;
    Admissibility adm;
    for (const auto& l : secs["system"]) {
        auto [key, value] = keyValue(l);
        if (key == "agents") agents = toInt(value, l);
        else if (key == "f") f = toInt(value, l);
        else if (key == "horizon") horizon = toInt(value, l);
        else if (key == "max-copies") maxCopies = toInt(value, l);
        else if (key == "messages") messages = splitWords(value, ',');
        else if (key == "events") events = splitWords(value, ',');
        else if (key == "actions") actions = splitWords(value, ',');
        else if (key == "initial") initials.push_back(splitWords(value, ' '));
        else if (key == "budget") sc.budget = static_cast<std::uint64_t>(toInt(value, l));
        else if (key == "universe") {
            if (value == "enumerate") sc.enumerateUniverse = true;
            else if (value == "script") sc.enumerateUniverse = false;
            else throw ParseError("universe must be enumerate or script", l.number, 1);
        } else if (key == "admissibility") {
            auto w = splitWords(value, ' ');
            if (w.size() == 1 && w[0] == "none") adm = {};
            else if (w.size() == 2 && w[0] == "fair") adm = {Admissibility::Kind::FairSchedule, toInt(w[1], l)};
            else throw ParseError("admissibility must be 'none' or 'fair <window>'", l.number, 1);
        } else {
            throw ParseError("unknown system key '" + key + "'", l.number, 1);
        }
    }
    if (agents < 1) throw ValidationError("[system] must declare agents >= 1");
    if (overrides.horizon) horizon = *overrides.horizon;
    if (overrides.budget) sc.budget = *overrides.budget;
    if (initials.empty()) initials.push_back(GlobalInitialState(static_cast<std::size_t>(agents), "s0"));

    auto& ctx = sc.ctx;
    ctx.alphabet = Alphabet(agents, messages, events, actions, maxCopies, horizon);
    ctx.protocols.assign(static_cast<std::size_t>(agents), AgentProtocol{});
    ctx.initialStates = initials;
    ctx.faultBound = f;
    ctx.horizon = horizon;
    ctx.admissibility = adm;

    for (const auto& l : secs["protocols"]) parseProtocolLine(l, ctx);
    for (const auto& l : secs["environment"]) parseEnvironmentLine(l, ctx);

    for (const auto& l : secs["adversary"]) {
        auto [key, value] = keyValue(l);
        if (key == "initial") {
            sc.script.initial = static_cast<std::size_t>(toInt(value, l));
        } else if (key == "seed") {
            sc.seed = static_cast<std::uint64_t>(std::stoull(value));
        } else if (key.rfind("round", 0) == 0) {
            const int m = toInt(trim(key.substr(5)), l);
            const auto w = splitWords(value, ' ');
            if (w.size() != static_cast<std::size_t>(agents) + 1)
                throw ParseError("round choice needs one environment and one index per agent",
                                 l.number, 1);
            AdversaryChoice choice;
            choice.env = static_cast<std::size_t>(toInt(w[0], l));
            for (std::size_t k = 1; k < w.size(); ++k)
                choice.agents.push_back(static_cast<std::size_t>(toInt(w[k], l)));
            if (sc.script.rounds.size() <= static_cast<std::size_t>(m))
                sc.script.rounds.resize(static_cast<std::size_t>(m) + 1, minimalChoice(ctx));
            sc.script.rounds[static_cast<std::size_t>(m)] = choice;
        } else {
            throw ParseError("unknown adversary key '" + key + "'", l.number, 1);
        }
    }
    if (overrides.seed) sc.seed = overrides.seed;

    for (const auto& l : secs["queries"]) {
        sc.queries.push_back(parseQuery(l.text, l.number));
        const auto& q = sc.queries.back();
        auto checkNode = [&](const Node& n) {
            if (!ctx.alphabet.validAgent(n.agent) || n.time < 0 || n.time > horizon)
                throw ValidationError("line " + std::to_string(l.number) + ": node " + toString(n) +
                                      " outside A x [0, horizon]");
        };
        if (q.theta) checkNode(*q.theta);
        if (q.formula) {
            try {
                validateFormula(q.formula, ctx.alphabet);
            } catch (const AlphabetError& e) {
                throw ValidationError("line " + std::to_string(l.number) + ": " + e.what());
            }
        }
        if ((q.kind == Query::Kind::Vat || q.kind == Query::Kind::AugmentVat) &&
            !ctx.alphabet.validAgent(q.agent))
            throw ValidationError("line " + std::to_string(l.number) + ": undeclared agent");
    }

    if (sc.queries.empty()) throw ValidationError("[queries] must list at least one query (e.g. simulate)");
    try {
        ctx.validate();
    } catch (const ProtocolError& e) {
        throw ValidationError(e.what());
    }
    if (sc.script.initial >= ctx.initialStates.size())
        throw ValidationError("adversary initial index outside the declared initial states");
    return sc;
}

Scenario loadScenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parseScenario(buf.str(), path.stem().string(), overrides);
}

}  // namespace byzcone
