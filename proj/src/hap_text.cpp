#include "byzcone/hap_text.hpp"

#include <cctype>
#include <sstream>

namespace byzcone {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string num(int v) { return std::to_string(v); }
std::string agent(AgentId a) { return std::to_string(a.value); }
std::string gmi(Gmi g) { return "#" + std::to_string(g.code); }

std::string renderAction(const ActionOrNoop& a) {
    return std::visit(Overloaded{
                          [](const Noop&) { return std::string("noop"); },
                          [](const auto& x) { return render(GlobalHap{x}); },
                      },
                      a);
}

template <class Set>
std::string renderSet(const Set& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& h : s) {
        if (!first) out += ", ";
        first = false;
        out += render(h);
    }
    return out + "}";
}

bool isWordChar(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
}

}  // namespace

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

Cursor::Cursor(std::string_view text, int line, int columnOffset)
    : text_(text), line_(line), columnOffset_(columnOffset) {}

void Cursor::skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
}

bool Cursor::atEnd() {
    skipSpace();
    return pos_ >= text_.size();
}

char Cursor::peek() {
    skipSpace();
    return pos_ < text_.size() ? text_[pos_] : '\0';
}

bool Cursor::consume(std::string_view token) {
    skipSpace();
    if (text_.substr(pos_, token.size()) == token) {
        pos_ += token.size();
        return true;
    }
    return false;
}

void Cursor::expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
}

int Cursor::integer() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
}

std::string Cursor::word() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
        const char ch = text_[pos_];
        if (isWordChar(ch)) {
            ++pos_;
        } else if (ch == '-' && pos_ > start && pos_ + 1 < text_.size() &&
                   text_[pos_ + 1] != '>' && isWordChar(text_[pos_ + 1])) {
            ++pos_;
        } else {
            break;
        }
    }
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
}

std::string Cursor::label() {
    if (peek() == '"') {
        ++pos_;
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
        if (pos_ >= text_.size()) fail("unterminated string");
        std::string out(text_.substr(start, pos_ - start));
        ++pos_;
        return out;
    }
    return word();
}

void Cursor::fail(const std::string& message) const {
    throw ParseError(message, line_, columnOffset_ + static_cast<int>(pos_) + 1);
}

// ---------------------------------------------------------------------------

std::string render(const LocalHap& h) {
    return std::visit(Overloaded{
                          [](const LocalSend& s) {
                              return "send(" + agent(s.recipient) + ", " + s.payload + ", " +
                                     num(s.copy) + ")";
                          },
                          [](const LocalRecv& r) {
                              return "recv(" + agent(r.sender) + ", " + r.payload + ")";
                          },
                          [](const LocalExtEvent& e) { return "ext(" + e.label + ")"; },
                          [](const LocalIntAction& a) { return "act(" + a.label + ")"; },
                      },
                      h);
}

std::string render(const GlobalHap& h) {
    return std::visit(
        Overloaded{
            [](const GSend& s) {
                return "gsend(" + agent(s.sender) + "->" + agent(s.recipient) + ", " + s.payload +
                       ", " + gmi(s.gmi) + ")";
            },
            [](const GRecv& r) {
                return "grecv(" + agent(r.recipient) + "<-" + agent(r.sender) + ", " + r.payload +
                       ", " + gmi(r.gmi) + ")";
            },
            [](const GExtEvent& e) { return "gext(" + agent(e.agent) + ", " + e.label + ")"; },
            [](const GIntAction& a) {
                return "gact(" + agent(a.agent) + "@" + num(a.time) + ", " + a.label + ")";
            },
            [](const Fake& f) { return "fake(" + agent(f.agent) + ", " + render(toGlobal(f.inner)) + ")"; },
            [](const FakeAction& f) {
                if (std::holds_alternative<Noop>(f.performed) &&
                    std::holds_alternative<Noop>(f.perceived))
                    return "fail(" + agent(f.agent) + ")";
                return "fake(" + agent(f.agent) + ", " + renderAction(f.performed) + " -> " +
                       renderAction(f.perceived) + ")";
            },
            [](const Go& g) { return "go(" + agent(g.agent) + ")"; },
            [](const Sleep& g) { return "sleep(" + agent(g.agent) + ")"; },
            [](const Hibernate& g) { return "hibernate(" + agent(g.agent) + ")"; },
        },
        h);
}

std::string render(const HapSet& s) { return renderSet(s); }
std::string render(const LocalSet& s) { return renderSet(s); }

std::string render(const std::vector<HapSet>& range) {
    std::string out = "{";
    for (std::size_t i = 0; i < range.size(); ++i) out += (i ? ", " : "") + render(range[i]);
    return out + "}";
}

std::string render(const std::vector<LocalSet>& range) {
    std::string out = "{";
    for (std::size_t i = 0; i < range.size(); ++i) out += (i ? ", " : "") + render(range[i]);
    return out + "}";
}

// ---------------------------------------------------------------------------

LocalHap parseLocalHap(Cursor& c) {
    const std::string head = c.word();
    c.expect("(");
    LocalHap out;
    if (head == "send") {
        const int to = c.integer();
        c.expect(",");
        std::string payload = c.label();
        c.expect(",");
        const int copy = c.integer();
        out = LocalSend{AgentId(to), std::move(payload), copy};
    } else if (head == "recv") {
        const int from = c.integer();
        c.expect(",");
        out = LocalRecv{AgentId(from), c.label()};
    } else if (head == "ext") {
        out = LocalExtEvent{c.label()};
    } else if (head == "act") {
        out = LocalIntAction{c.label()};
    } else {
        c.fail("unknown local hap '" + head + "'");
    }
    c.expect(")");
    return out;
}

namespace {

Gmi parseGmi(Cursor& c, const Alphabet& ab, AgentId sender, AgentId recipient,
             const std::string& payload) {
    c.expect("#");
    if (c.consume("c")) {
        const int copy = c.integer();
        c.expect("@");
        const int time = c.integer();
        try {
            return ab.encodeGmi(sender, recipient, payload, copy, time);
        } catch (const AlphabetError& e) {
            c.fail(e.what());
        }
    }
    return Gmi{static_cast<std::uint64_t>(c.integer())};
}

GSend parseSendBody(Cursor& c, const Alphabet& ab) {
    c.expect("(");
    const AgentId from(c.integer());
    c.expect("->");
    const AgentId to(c.integer());
    c.expect(",");
    std::string payload = c.label();
    c.expect(",");
    const Gmi id = parseGmi(c, ab, from, to, payload);
    c.expect(")");
    return GSend{from, to, std::move(payload), id};
}

GRecv parseRecvBody(Cursor& c, const Alphabet& ab) {
    c.expect("(");
    const AgentId to(c.integer());
    c.expect("<-");
    const AgentId from(c.integer());
    c.expect(",");
    std::string payload = c.label();
    c.expect(",");
    const Gmi id = parseGmi(c, ab, from, to, payload);
    c.expect(")");
    return GRecv{to, from, std::move(payload), id};
}

GExtEvent parseExtBody(Cursor& c) {
    c.expect("(");
    const AgentId a(c.integer());
    c.expect(",");
    std::string label = c.label();
    c.expect(")");
    return GExtEvent{a, std::move(label)};
}

GIntAction parseActBody(Cursor& c) {
    c.expect("(");
    const AgentId a(c.integer());
    c.expect("@");
    const int t = c.integer();
    c.expect(",");
    std::string label = c.label();
    c.expect(")");
    return GIntAction{a, t, std::move(label)};
}

ActionOrNoop parseActionOrNoop(Cursor& c, const Alphabet& ab) {
    const std::string head = c.word();
    if (head == "noop") return Noop{};
    if (head == "gsend") return parseSendBody(c, ab);
    if (head == "gact") return parseActBody(c);
    c.fail("expected noop, gsend or gact");
}

AgentId parseAgentArg(Cursor& c) {
    c.expect("(");
    const AgentId a(c.integer());
    c.expect(")");
    return a;
}

}  // namespace

GlobalHap parseGlobalHap(Cursor& c, const Alphabet& ab) {
    const std::string head = c.word();
    GlobalHap out;
    if (head == "gsend") {
        out = parseSendBody(c, ab);
    } else if (head == "grecv") {
        out = parseRecvBody(c, ab);
    } else if (head == "gext") {
        out = parseExtBody(c);
    } else if (head == "gact") {
        out = parseActBody(c);
    } else if (head == "go") {
        out = Go{parseAgentArg(c)};
    } else if (head == "sleep") {
        out = Sleep{parseAgentArg(c)};
    } else if (head == "hibernate") {
        out = Hibernate{parseAgentArg(c)};
    } else if (head == "fail") {
        out = fail(parseAgentArg(c));
    } else if (head == "fake") {
        c.expect("(");
        const AgentId a(c.integer());
        c.expect(",");
        const std::string inner = c.word();
        if (inner == "grecv") {
            out = Fake{a, parseRecvBody(c, ab)};
        } else if (inner == "gext") {
            out = Fake{a, parseExtBody(c)};
        } else {
            ActionOrNoop performed;
            if (inner == "noop") {
                performed = Noop{};
            } else if (inner == "gsend") {
                performed = parseSendBody(c, ab);
            } else if (inner == "gact") {
                performed = parseActBody(c);
            } else {
                c.fail("unknown byzantine form '" + inner + "'");
            }
            c.expect("->");
            ActionOrNoop perceived = parseActionOrNoop(c, ab);
            out = FakeAction{a, std::move(performed), std::move(perceived)};
        }
        c.expect(")");
    } else {
        c.fail("unknown global hap '" + head + "'");
    }
    try {
        ab.validate(out);
    } catch (const AlphabetError& e) {
        c.fail(e.what());
    }
    return out;
}

HapSet parseHapSet(Cursor& c, const Alphabet& ab) {
    HapSet out;
    c.expect("{");
    if (c.consume("}")) return out;
    do {
        out.insert(parseGlobalHap(c, ab));
    } while (c.consume(","));
    c.expect("}");
    return out;
}

LocalSet parseLocalSet(Cursor& c) {
    LocalSet out;
    c.expect("{");
    if (c.consume("}")) return out;
    do {
        out.insert(parseLocalHap(c));
    } while (c.consume(","));
    c.expect("}");
    return out;
}

std::vector<HapSet> parseHapRange(Cursor& c, const Alphabet& ab) {
    std::vector<HapSet> out;
    c.expect("{");
    if (c.consume("}")) return out;
    do {
        out.push_back(parseHapSet(c, ab));
    } while (c.consume(","));
    c.expect("}");
    return out;
}

std::vector<LocalSet> parseLocalRange(Cursor& c) {
    std::vector<LocalSet> out;
    c.expect("{");
    if (c.consume("}")) return out;
    do {
        out.push_back(parseLocalSet(c));
    } while (c.consume(","));
    c.expect("}");
    return out;
}

GlobalHap parseGlobalHap(std::string_view text, const Alphabet& ab) {
    Cursor c(text);
    GlobalHap h = parseGlobalHap(c, ab);
    if (!c.atEnd()) c.fail("trailing input");
    return h;
}

LocalHap parseLocalHap(std::string_view text) {
    Cursor c(text);
    LocalHap h = parseLocalHap(c);
    if (!c.atEnd()) c.fail("trailing input");
    return h;
}

HapSet parseHapSet(std::string_view text, const Alphabet& ab) {
    Cursor c(text);
    HapSet s = parseHapSet(c, ab);
    if (!c.atEnd()) c.fail("trailing input");
    return s;
}

}  // namespace byzcone
