#include "byzcone/formula.hpp"

#include <map>

namespace byzcone {

using Op = Formula::Op;

bool Formula::isAtom() const {
    switch (op) {
        case Op::Not:
        case Op::And:
        case Op::Or:
        case Op::Implies:
        case Op::K:
        case Op::H: return false;
        default: return true;
    }
}

namespace {

FormulaPtr make(Op op, AgentId i = AgentId(), Timestamp t = 0, LocalHap o = LocalExtEvent{},
                std::string name = {}, std::vector<FormulaPtr> args = {}) {
    auto phi = std::make_shared<Formula>();
    phi->op = op;
    phi->agent = i;
    phi->time = t;
    phi->hap = std::move(o);
    phi->name = std::move(name);
    phi->args = std::move(args);
    return phi;
}

}  // namespace

namespace f {
FormulaPtr truth() { return make(Op::True); }
FormulaPtr falsity() { return make(Op::False); }
FormulaPtr correct(AgentId i) { return make(Op::Correct, i); }
FormulaPtr correctAt(AgentId i, Timestamp t) { return make(Op::CorrectAt, i, t); }
FormulaPtr fakeAt(AgentId i, Timestamp t, LocalHap o) { return make(Op::FakeAt, i, t, std::move(o)); }
FormulaPtr occurredCorrectlyAt(AgentId i, Timestamp t, LocalHap o) {
    return make(Op::OccurredCorrectlyAt, i, t, std::move(o));
}
FormulaPtr occurredCorrectlyBy(AgentId i, LocalHap o) {
    return make(Op::OccurredCorrectlyBy, i, 0, std::move(o));
}
FormulaPtr occurredCorrectly(LocalHap o) {
    return make(Op::OccurredCorrectly, AgentId(), 0, std::move(o));
}
FormulaPtr occurred(AgentId i, LocalHap o) { return make(Op::Occurred, i, 0, std::move(o)); }
FormulaPtr prop(std::string name) { return make(Op::Prop, AgentId(), 0, LocalExtEvent{}, std::move(name)); }
FormulaPtr lnot(FormulaPtr a) { return make(Op::Not, AgentId(), 0, LocalExtEvent{}, {}, {std::move(a)}); }
FormulaPtr land(FormulaPtr a, FormulaPtr b) {
    return make(Op::And, AgentId(), 0, LocalExtEvent{}, {}, {std::move(a), std::move(b)});
}
FormulaPtr lor(FormulaPtr a, FormulaPtr b) {
    return make(Op::Or, AgentId(), 0, LocalExtEvent{}, {}, {std::move(a), std::move(b)});
}
FormulaPtr implies(FormulaPtr a, FormulaPtr b) {
    return make(Op::Implies, AgentId(), 0, LocalExtEvent{}, {}, {std::move(a), std::move(b)});
}
FormulaPtr knows(AgentId i, FormulaPtr a) { return make(Op::K, i, 0, LocalExtEvent{}, {}, {std::move(a)}); }
FormulaPtr hope(AgentId i, FormulaPtr a) { return make(Op::H, i, 0, LocalExtEvent{}, {}, {std::move(a)}); }
}  // namespace f

FormulaPtr expand(const FormulaPtr& phi) {
    switch (phi->op) {
        case Op::Not: return f::lnot(expand(phi->args[0]));
        case Op::And: {
            FormulaPtr acc = expand(phi->args[0]);
            for (std::size_t k = 1; k < phi->args.size(); ++k) acc = f::land(acc, expand(phi->args[k]));
            return acc;
        }
        case Op::Or: {
            FormulaPtr acc = f::lnot(expand(phi->args[0]));
            for (std::size_t k = 1; k < phi->args.size(); ++k)
                acc = f::land(acc, f::lnot(expand(phi->args[k])));
            return f::lnot(acc);
        }
        case Op::Implies:
            return f::lnot(f::land(expand(phi->args[0]), f::lnot(expand(phi->args[1]))));
        case Op::K: return f::knows(phi->agent, expand(phi->args[0]));
        case Op::H: {
            const AgentId i = phi->agent;
            return expand(f::implies(f::correct(i), f::knows(i, f::implies(f::correct(i), phi->args[0]))));
        }
        default: return phi;
    }
}

LocalHap parseHapArgument(Cursor& c) {
    if (c.peek() == '"') return LocalExtEvent{c.label()};
    const auto mark = c.position();
    const std::string w = c.word();
    if (c.peek() == '(' && (w == "send" || w == "recv" || w == "ext" || w == "act")) {
        c.restore(mark);
        return parseLocalHap(c);
    }
    return LocalExtEvent{w};
}

namespace {

AgentId parseAgent(Cursor& c) { return AgentId(c.integer()); }

const std::map<std::string, Op>& opNames() {
    static const std::map<std::string, Op> names{
        {"correct", Op::Correct},
        {"correct-at", Op::CorrectAt},
        {"fake-at", Op::FakeAt},
        {"occurred-correctly-at", Op::OccurredCorrectlyAt},
        {"occurred-correctly-by", Op::OccurredCorrectlyBy},
        {"occurred-correctly", Op::OccurredCorrectly},
        {"occurred", Op::Occurred},
        {"prop", Op::Prop},
        {"not", Op::Not},
        {"and", Op::And},
        {"or", Op::Or},
        {"implies", Op::Implies},
        {"K", Op::K},
        {"H", Op::H},
    };
    return names;
}

}  // namespace

FormulaPtr parseFormula(Cursor& c) {
    if (c.peek() != '(') {
        const std::string w = c.word();
        if (w == "true") return f::truth();
        if (w == "false") return f::falsity();
        c.fail("expected '(' or true/false, got '" + w + "'");
    }
    c.expect("(");
    const std::string head = c.word();
    auto it = opNames().find(head);
    if (it == opNames().end()) c.fail("unknown operator '" + head + "'");
    FormulaPtr out;
    switch (it->second) {
        case Op::Correct: out = f::correct(parseAgent(c)); break;
        case Op::CorrectAt: {
            const AgentId i = parseAgent(c);
            out = f::correctAt(i, c.integer());
            break;
        }
        case Op::FakeAt:
        case Op::OccurredCorrectlyAt: {
            const AgentId i = parseAgent(c);
            const Timestamp t = c.integer();
            LocalHap o = parseHapArgument(c);
            out = it->second == Op::FakeAt ? f::fakeAt(i, t, o) : f::occurredCorrectlyAt(i, t, o);
            break;
        }
        case Op::OccurredCorrectlyBy: {
            const AgentId i = parseAgent(c);
            out = f::occurredCorrectlyBy(i, parseHapArgument(c));
            break;
        }
        case Op::OccurredCorrectly: out = f::occurredCorrectly(parseHapArgument(c)); break;
        case Op::Occurred: {
            const AgentId i = parseAgent(c);
            out = f::occurred(i, parseHapArgument(c));
            break;
        }
        case Op::Prop: out = f::prop(c.label()); break;
        case Op::Not: out = f::lnot(parseFormula(c)); break;
        case Op::And:
        case Op::Or: {
            std::vector<FormulaPtr> args;
            while (c.peek() != ')') {
                if (c.atEnd()) c.fail("unterminated formula");
                args.push_back(parseFormula(c));
            }
            if (args.size() < 2) c.fail(head + " needs at least two operands");
            out = make(it->second, AgentId(), 0, LocalExtEvent{}, {}, std::move(args));
            break;
        }
        case Op::Implies: {
            auto a = parseFormula(c);
            out = f::implies(a, parseFormula(c));
            break;
        }
        case Op::K:
        case Op::H: {
            const AgentId i = parseAgent(c);
            auto a = parseFormula(c);
            out = it->second == Op::K ? f::knows(i, a) : f::hope(i, a);
            break;
        }
        default: c.fail("unexpected operator");
    }
    c.expect(")");
    return out;
}

FormulaPtr parseFormula(std::string_view text) {
    Cursor c(text);
    auto phi = parseFormula(c);
    if (!c.atEnd()) c.fail("trailing input after formula");
    return phi;
}

std::string render(const FormulaPtr& phi) {
    const std::string i = std::to_string(phi->agent.value);
    const std::string t = std::to_string(phi->time);
    auto hap = [&] { return render(phi->hap); };
    switch (phi->op) {
        case Op::True: return "true";
        case Op::False: return "false";
        case Op::Correct: return "(correct " + i + ")";
        case Op::CorrectAt: return "(correct-at " + i + " " + t + ")";
        case Op::FakeAt: return "(fake-at " + i + " " + t + " " + hap() + ")";
        case Op::OccurredCorrectlyAt: return "(occurred-correctly-at " + i + " " + t + " " + hap() + ")";
        case Op::OccurredCorrectlyBy: return "(occurred-correctly-by " + i + " " + hap() + ")";
        case Op::OccurredCorrectly: return "(occurred-correctly " + hap() + ")";
        case Op::Occurred: return "(occurred " + i + " " + hap() + ")";
        case Op::Prop: return "(prop \"" + phi->name + "\")";
        case Op::Not: return "(not " + render(phi->args[0]) + ")";
        case Op::And:
        case Op::Or: {
            std::string out = phi->op == Op::And ? "(and" : "(or";
            for (const auto& a : phi->args) out += " " + render(a);
            return out + ")";
        }
        case Op::Implies: return "(implies " + render(phi->args[0]) + " " + render(phi->args[1]) + ")";
        case Op::K: return "(K " + i + " " + render(phi->args[0]) + ")";
        case Op::H: return "(H " + i + " " + render(phi->args[0]) + ")";
    }
    return "?";
}

namespace {

void validateHap(const LocalHap& h, const Alphabet& ab) {
    auto agent = [&](AgentId i) {
        if (!ab.validAgent(i))
            throw AlphabetError("formula mentions undeclared agent " + std::to_string(i.value));
    };
    auto known = [](bool ok, const std::string& what, const std::string& label) {
        if (!ok) throw AlphabetError("formula mentions undeclared " + what + " " + label);
    };
    if (const auto* s = std::get_if<LocalSend>(&h)) {
        agent(s->recipient);
        known(ab.hasMessage(s->payload), "message", s->payload);
    } else if (const auto* r = std::get_if<LocalRecv>(&h)) {
        agent(r->sender);
        known(ab.hasMessage(r->payload), "message", r->payload);
    } else if (const auto* e = std::get_if<LocalExtEvent>(&h)) {
        known(ab.hasEvent(e->label), "event", e->label);
    } else if (const auto* a = std::get_if<LocalIntAction>(&h)) {
        known(ab.hasAction(a->label), "action", a->label);
    }
}

}  // namespace

void validateFormula(const FormulaPtr& phi, const Alphabet& ab) {
    switch (phi->op) {
        case Op::True:
        case Op::False:
        case Op::Prop:
        case Op::Not:
        case Op::And:
        case Op::Or:
        case Op::Implies: break;
        case Op::OccurredCorrectly: validateHap(phi->hap, ab); break;
        case Op::FakeAt:
        case Op::OccurredCorrectlyAt:
        case Op::OccurredCorrectlyBy:
        case Op::Occurred: validateHap(phi->hap, ab); [[fallthrough]];
        default:
            if (!ab.validAgent(phi->agent))
                throw AlphabetError("formula mentions undeclared agent " +
                                    std::to_string(phi->agent.value));
    }
    for (const auto& a : phi->args) validateFormula(a, ab);
}

}  // namespace byzcone
