#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eff/syntax.hpp"

namespace eff {

enum class RuleTag {
    Const, Beta, Return, Handle, Proj1, Proj2, CaseL, CaseR, Nil, Cons, Fix,
    IfTrue, IfFalse,
};

std::string rule_name(RuleTag tag);

// ---------------------------------------------------------------------------
// Evaluation contexts: a stack of frames, outermost first. Filling the hole
// reconstructs the original term exactly.
// ---------------------------------------------------------------------------

struct FrAppFn { TermPtr arg; };                 // [] M2
struct FrAppArg { TermPtr fn; };                 // v1 []
struct FrOpArg { std::string op; };              // #op([])
struct FrHandle { HandlerPtr handler; };         // handle [] with H
struct FrLet {                                   // let x = [] in M
    std::string binder;
    std::optional<Scheme> ann;
    TermPtr body;
};
struct FrPairL { TermPtr right; };               // ([], M2)
struct FrPairR { TermPtr left; };                // (v1, [])
struct FrProj { int index; };                    // fst [] / snd []
struct FrInl {};
struct FrInr {};
struct FrCaseSum {
    std::string left_binder;
    TermPtr left_body;
    std::string right_binder;
    TermPtr right_body;
};
struct FrCons {};
struct FrCaseList {
    TermPtr nil_body;
    std::string cons_binder;
    TermPtr cons_body;
};
struct FrIf { TermPtr then_branch, else_branch; };

struct Frame {
    std::variant<FrAppFn, FrAppArg, FrOpArg, FrHandle, FrLet, FrPairL, FrPairR,
                 FrProj, FrInl, FrInr, FrCaseSum, FrCons, FrCaseList, FrIf>
        node;
    Span span;
};

using EvalContext = std::vector<Frame>;

TermPtr fill(const EvalContext& ctx, TermPtr hole);

// Unique call-by-value decomposition of a closed term.
struct Decomposition {
    enum class Kind { Value, Redex, Unhandled } kind;
    EvalContext context;   // Redex: frames around the redex; Unhandled: whole context
    TermPtr redex;         // Redex
    std::string op;        // Unhandled
    TermPtr op_arg;        // Unhandled
};

Decomposition decompose(const TermPtr& m);

// Contracting one redex.
struct Contraction {
    bool stuck = false;
    TermPtr term;            // contractum when !stuck
    RuleTag tag = RuleTag::Beta;
    std::string stuck_reason;
};

Contraction contract(const TermPtr& redex);

// One evaluation step via E-Eval.
struct StepResult {
    enum class Kind { Value, Reduced, UnhandledOp, Stuck } kind;
    TermPtr term;            // Reduced: whole next term; Value: the value
    RuleTag tag = RuleTag::Beta;
    TermPtr redex;           // Reduced/Stuck
    TermPtr contractum;      // Reduced
    std::string op;          // UnhandledOp
    TermPtr op_arg;
    std::string stuck_reason;
};

StepResult step(const TermPtr& m);

struct Outcome {
    enum class Kind { Value, UnhandledOp, Stuck, OutOfFuel } kind;
    TermPtr value;            // Value
    std::string op;           // UnhandledOp
    TermPtr op_arg;
    std::string stuck_reason; // Stuck
    TermPtr stuck_redex;
    long long steps = 0;

    bool is_value() const { return kind == Kind::Value; }
};

std::string outcome_text(const Outcome& o);

// Iterated small-step evaluation; trace lines are appended when a sink is
// given (format: "step N: [RULE] <redex> ↝ <contractum>").
Outcome run(const TermPtr& m, long long max_steps,
            std::vector<std::string>* trace = nullptr);

}  // namespace eff
