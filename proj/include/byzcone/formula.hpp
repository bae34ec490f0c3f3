#pragma once

// Epistemic formulas over designated atoms, custom propositions, ¬, ∧, K_i,
// with ∨, →, and hope H_i as derived forms.
//
// Prefix syntax:
//   true  false  (prop name)
//   (correct i)  (correct-at i t)  (fake-at i t o)  (occurred-correctly-at i t o)
//   (occurred-correctly-by i o)  (occurred-correctly o)  (occurred i o)
//   (not φ)  (and φ ψ ...)  (or φ ψ ...)  (implies φ ψ)  (K i φ)  (H i φ)
// A hap argument o is a local hap such as recv(1, m), or a bare or quoted
// label standing for ext(label).

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "byzcone/hap_text.hpp"

namespace byzcone {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Op {
        True,
        False,
        Correct,              // correct(i)
        CorrectAt,            // correct(i, t)
        FakeAt,               // fake(i, t)(o)
        OccurredCorrectlyAt,  // occurred-correctly(i, t)(o)
        OccurredCorrectlyBy,  // occurred-correctly_i(o)
        OccurredCorrectly,    // occurred-correctly(o)
        Occurred,             // occurred_i(o)
        Prop,
        Not,
        And,
        Or,
        Implies,
        K,
        H,
    };

    Op op = Op::True;
    AgentId agent;
    Timestamp time = 0;
    LocalHap hap;
    std::string name;
    std::vector<FormulaPtr> args;

    bool isAtom() const;
    bool isDerived() const { return op == Op::Or || op == Op::Implies || op == Op::H; }
};

namespace f {
FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr correct(AgentId i);
FormulaPtr correctAt(AgentId i, Timestamp t);
FormulaPtr fakeAt(AgentId i, Timestamp t, LocalHap o);
FormulaPtr occurredCorrectlyAt(AgentId i, Timestamp t, LocalHap o);
FormulaPtr occurredCorrectlyBy(AgentId i, LocalHap o);
FormulaPtr occurredCorrectly(LocalHap o);
FormulaPtr occurred(AgentId i, LocalHap o);
FormulaPtr prop(std::string name);
FormulaPtr lnot(FormulaPtr a);
FormulaPtr land(FormulaPtr a, FormulaPtr b);
FormulaPtr lor(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr knows(AgentId i, FormulaPtr a);
FormulaPtr hope(AgentId i, FormulaPtr a);
}  // namespace f

/// Rewrites ∨, → and H into ¬, ∧ and K.
FormulaPtr expand(const FormulaPtr& phi);

FormulaPtr parseFormula(Cursor& c);
/// A local hap, or a bare or quoted label read as ext(label).
LocalHap parseHapArgument(Cursor& c);
FormulaPtr parseFormula(std::string_view text);
std::string render(const FormulaPtr& phi);

/// Throws AlphabetError if the formula mentions an undeclared agent.
void validateFormula(const FormulaPtr& phi, const Alphabet& ab);

}  // namespace byzcone
