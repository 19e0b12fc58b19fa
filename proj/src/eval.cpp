#include "eff/eval.hpp"

#include <cassert>

#include "eff/pretty.hpp"

namespace eff {

std::string rule_name(RuleTag tag) {
    switch (tag) {
        case RuleTag::Const: return "Const";
        case RuleTag::Beta: return "Beta";
        case RuleTag::Return: return "Return";
        case RuleTag::Handle: return "Handle";
        case RuleTag::Proj1: return "Proj1";
        case RuleTag::Proj2: return "Proj2";
        case RuleTag::CaseL: return "CaseL";
        case RuleTag::CaseR: return "CaseR";
        case RuleTag::Nil: return "Nil";
        case RuleTag::Cons: return "Cons";
        case RuleTag::Fix: return "Fix";
        case RuleTag::IfTrue: return "If-True";
        case RuleTag::IfFalse: return "If-False";
    }
    return "?";
}

namespace {

TermPtr fill_one(const Frame& f, TermPtr hole) {
    return std::visit(
        [&](const auto& n) -> TermPtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, FrAppFn>) {
                return mk_app(hole, n.arg, f.span);
            } else if constexpr (std::is_same_v<N, FrAppArg>) {
                return mk_app(n.fn, hole, f.span);
            } else if constexpr (std::is_same_v<N, FrOpArg>) {
                return mk_opcall(n.op, hole, f.span);
            } else if constexpr (std::is_same_v<N, FrHandle>) {
                return mk_handle(hole, n.handler, f.span);
            } else if constexpr (std::is_same_v<N, FrLet>) {
                return mk_let(n.binder, hole, n.body, f.span, n.ann);
            } else if constexpr (std::is_same_v<N, FrPairL>) {
                return mk_pair(hole, n.right, f.span);
            } else if constexpr (std::is_same_v<N, FrPairR>) {
                return mk_pair(n.left, hole, f.span);
            } else if constexpr (std::is_same_v<N, FrProj>) {
                return mk_proj(n.index, hole, f.span);
            } else if constexpr (std::is_same_v<N, FrInl>) {
                return mk_inl(hole, f.span);
            } else if constexpr (std::is_same_v<N, FrInr>) {
                return mk_inr(hole, f.span);
            } else if constexpr (std::is_same_v<N, FrCaseSum>) {
                return mk_case_sum(hole, n.left_binder, n.left_body, n.right_binder,
                                   n.right_body, f.span);
            } else if constexpr (std::is_same_v<N, FrCons>) {
                return mk_cons(hole, f.span);
            } else if constexpr (std::is_same_v<N, FrCaseList>) {
                return mk_case_list(hole, n.nil_body, n.cons_binder, n.cons_body, f.span);
            } else {
                static_assert(std::is_same_v<N, FrIf>);
                return mk_if(hole, n.then_branch, n.else_branch, f.span);
            }
        },
        f.node);
}

TermPtr fill_range(const EvalContext& ctx, std::size_t begin, TermPtr hole) {
    for (std::size_t i = ctx.size(); i-- > begin;) hole = fill_one(ctx[i], hole);
    return hole;
}

}  // namespace

TermPtr fill(const EvalContext& ctx, TermPtr hole) { return fill_range(ctx, 0, hole); }

Decomposition decompose(const TermPtr& m) {
    Decomposition out;
    EvalContext ctx;
    TermPtr cur = m;

    if (is_value(cur)) {
        out.kind = Decomposition::Kind::Value;
        out.redex = cur;
        return out;
    }

    while (true) {
        bool descended = false;
        const Span sp = cur->span;
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                auto descend = [&](Frame f, const TermPtr& next) {
                    f.span = sp;
                    ctx.push_back(std::move(f));
                    cur = next;
                    descended = true;
                };
                if constexpr (std::is_same_v<N, TApp>) {
                    if (!is_value(n.fn))
                        descend(Frame{FrAppFn{n.arg}, {}}, n.fn);
                    else if (!is_value(n.arg))
                        descend(Frame{FrAppArg{n.fn}, {}}, n.arg);
                } else if constexpr (std::is_same_v<N, TOpCall>) {
                    if (!is_value(n.arg)) descend(Frame{FrOpArg{n.op}, {}}, n.arg);
                } else if constexpr (std::is_same_v<N, THandle>) {
                    if (!is_value(n.body)) descend(Frame{FrHandle{n.handler}, {}}, n.body);
                } else if constexpr (std::is_same_v<N, TLet>) {
                    if (!is_value(n.bound))
                        descend(Frame{FrLet{n.binder, n.ann, n.body}, {}}, n.bound);
                } else if constexpr (std::is_same_v<N, TPair>) {
                    if (!is_value(n.left))
                        descend(Frame{FrPairL{n.right}, {}}, n.left);
                    else if (!is_value(n.right))
                        descend(Frame{FrPairR{n.left}, {}}, n.right);
                } else if constexpr (std::is_same_v<N, TProj>) {
                    if (!is_value(n.pair)) descend(Frame{FrProj{n.index}, {}}, n.pair);
                } else if constexpr (std::is_same_v<N, TInl>) {
                    if (!is_value(n.value)) descend(Frame{FrInl{}, {}}, n.value);
                } else if constexpr (std::is_same_v<N, TInr>) {
                    if (!is_value(n.value)) descend(Frame{FrInr{}, {}}, n.value);
                } else if constexpr (std::is_same_v<N, TCaseSum>) {
                    if (!is_value(n.scrutinee))
                        descend(Frame{FrCaseSum{n.left_binder, n.left_body,
                                                n.right_binder, n.right_body},
                                      {}},
                                n.scrutinee);
                } else if constexpr (std::is_same_v<N, TCons>) {
                    if (!is_value(n.pair)) descend(Frame{FrCons{}, {}}, n.pair);
                } else if constexpr (std::is_same_v<N, TCaseList>) {
                    if (!is_value(n.scrutinee))
                        descend(Frame{FrCaseList{n.nil_body, n.cons_binder, n.cons_body},
                                      {}},
                                n.scrutinee);
                } else if constexpr (std::is_same_v<N, TIf>) {
                    if (!is_value(n.cond))
                        descend(Frame{FrIf{n.then_branch, n.else_branch}, {}}, n.cond);
                }
                // TVar, TConst, TAbs, TNil, TFix never descend
            },
            cur->node);
        if (descended) continue;

        // `cur` is the innermost non-value node whose children (in evaluation
        // positions) are values: either a redex or an operation call.
        if (const auto* opc = std::get_if<TOpCall>(&cur->node)) {
            // innermost enclosing handler with a clause for op
            for (std::size_t i = ctx.size(); i-- > 0;) {
                const auto* hf = std::get_if<FrHandle>(&ctx[i].node);
                if (hf && hf->handler->find(opc->op)) {
                    out.kind = Decomposition::Kind::Redex;
                    TermPtr body = fill_range(ctx, i + 1, cur);
                    out.redex = mk_handle(body, hf->handler, ctx[i].span);
                    ctx.resize(i);
                    out.context = std::move(ctx);
                    return out;
                }
            }
            out.kind = Decomposition::Kind::Unhandled;
            out.op = opc->op;
            out.op_arg = opc->arg;
            out.context = std::move(ctx);
            return out;
        }

        out.kind = Decomposition::Kind::Redex;
        out.redex = cur;
        out.context = std::move(ctx);
        return out;
    }
}

namespace {

Contraction stuck(std::string reason) {
    Contraction c;
    c.stuck = true;
    c.stuck_reason = std::move(reason);
    return c;
}

Contraction reduced(TermPtr t, RuleTag tag) {
    Contraction c;
    c.term = std::move(t);
    c.tag = tag;
    return c;
}

}  // namespace

Contraction contract(const TermPtr& redex) {
    return std::visit(
        [&](const auto& n) -> Contraction {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TApp>) {
                if (const auto* abs = std::get_if<TAbs>(&n.fn->node))
                    return reduced(subst_term(abs->body, abs->binder, n.arg),
                                   RuleTag::Beta);
                if (const auto* cst = std::get_if<TConst>(&n.fn->node)) {
                    const auto* argc = std::get_if<TConst>(&n.arg->node);
                    if (!argc)
                        return stuck("constant '" + show_constant(cst->c) +
                                     "' applied to a non-constant value");
                    auto res = zeta(cst->c, argc->c);
                    if (!res)
                        return stuck("constant application undefined: " +
                                     show_constant(cst->c) + " " +
                                     show_constant(argc->c));
                    return reduced(mk_const(*res, redex->span), RuleTag::Const);
                }
                return stuck("application of a non-function value");
            } else if constexpr (std::is_same_v<N, THandle>) {
                const Handler& h = *n.handler;
                if (is_value(n.body))
                    return reduced(subst_term(h.return_body, h.return_binder, n.body),
                                   RuleTag::Return);
                // handle E[#op(v)] with H, op-free E, H handles op
                Decomposition d = decompose(n.body);
                if (d.kind != Decomposition::Kind::Unhandled)
                    return stuck("malformed handle redex");
                const OpClause* cl = h.find(d.op);
                if (!cl) return stuck("malformed handle redex: no clause");
                TermPtr resumed = fill(d.context, mk_var("y"));
                TermPtr kont = mk_abs("y", mk_handle(resumed, n.handler, redex->span),
                                      redex->span);
                TermPtr body = subst_term(cl->body, cl->arg_binder, d.op_arg);
                body = subst_term(body, cl->cont_binder, kont);
                return reduced(body, RuleTag::Handle);
            } else if constexpr (std::is_same_v<N, TLet>) {
                return reduced(subst_term(n.body, n.binder, n.bound), RuleTag::Beta);
            } else if constexpr (std::is_same_v<N, TProj>) {
                const auto* pair = std::get_if<TPair>(&n.pair->node);
                if (!pair) return stuck("projection from a non-pair value");
                return reduced(n.index == 1 ? pair->left : pair->right,
                               n.index == 1 ? RuleTag::Proj1 : RuleTag::Proj2);
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                if (const auto* inl = std::get_if<TInl>(&n.scrutinee->node))
                    return reduced(subst_term(n.left_body, n.left_binder, inl->value),
                                   RuleTag::CaseL);
                if (const auto* inr = std::get_if<TInr>(&n.scrutinee->node))
                    return reduced(subst_term(n.right_body, n.right_binder, inr->value),
                                   RuleTag::CaseR);
                return stuck("case on a non-sum value");
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                if (std::holds_alternative<TNil>(n.scrutinee->node))
                    return reduced(n.nil_body, RuleTag::Nil);
                if (const auto* cons = std::get_if<TCons>(&n.scrutinee->node))
                    return reduced(subst_term(n.cons_body, n.cons_binder, cons->pair),
                                   RuleTag::Cons);
                return stuck("case on a non-list value");
            } else if constexpr (std::is_same_v<N, TFix>) {
                TermPtr lam = mk_abs(n.arg_binder, n.body, redex->span);
                return reduced(subst_term(lam, n.fn_binder, redex), RuleTag::Fix);
            } else if constexpr (std::is_same_v<N, TIf>) {
                const auto* c = std::get_if<TConst>(&n.cond->node);
                if (c && c->c.tag == Constant::Tag::Bool)
                    return c->c.bool_val ? reduced(n.then_branch, RuleTag::IfTrue)
                                         : reduced(n.else_branch, RuleTag::IfFalse);
                return stuck("if condition is not a boolean");
            } else if constexpr (std::is_same_v<N, TVar>) {
                return stuck("free variable '" + n.name + "'");
            } else {
                return stuck("no rule applies");
            }
        },
        redex->node);
}

StepResult step(const TermPtr& m) {
    StepResult res;
    Decomposition d = decompose(m);
    switch (d.kind) {
        case Decomposition::Kind::Value:
            res.kind = StepResult::Kind::Value;
            res.term = d.redex;
            return res;
        case Decomposition::Kind::Unhandled:
            res.kind = StepResult::Kind::UnhandledOp;
            res.op = d.op;
            res.op_arg = d.op_arg;
            return res;
        case Decomposition::Kind::Redex: {
            Contraction c = contract(d.redex);
            if (c.stuck) {
                res.kind = StepResult::Kind::Stuck;
                res.redex = d.redex;
                res.stuck_reason = c.stuck_reason;
                return res;
            }
            res.kind = StepResult::Kind::Reduced;
            res.redex = d.redex;
            res.contractum = c.term;
            res.tag = c.tag;
            res.term = fill(d.context, c.term);
            return res;
        }
    }
    res.kind = StepResult::Kind::Stuck;
    res.stuck_reason = "internal: bad decomposition";
    return res;
}

Outcome run(const TermPtr& m, long long max_steps, std::vector<std::string>* trace) {
    TermPtr cur = m;
    Outcome out;
    for (long long n = 0;; ++n) {
        StepResult s = step(cur);
        switch (s.kind) {
            case StepResult::Kind::Value:
                out.kind = Outcome::Kind::Value;
                out.value = s.term;
                out.steps = n;
                return out;
            case StepResult::Kind::UnhandledOp:
                out.kind = Outcome::Kind::UnhandledOp;
                out.op = s.op;
                out.op_arg = s.op_arg;
                out.steps = n;
                return out;
            case StepResult::Kind::Stuck:
                out.kind = Outcome::Kind::Stuck;
                out.stuck_reason = s.stuck_reason;
                out.stuck_redex = s.redex;
                out.steps = n;
                return out;
            case StepResult::Kind::Reduced:
                if (n >= max_steps) {
                    out.kind = Outcome::Kind::OutOfFuel;
                    out.steps = n;
                    return out;
                }
                if (trace)
                    trace->push_back("step " + std::to_string(n + 1) + ": [" +
                                     rule_name(s.tag) + "] " + pretty(s.redex) +
                                     " ↝ " + pretty(s.contractum));
                cur = s.term;
                break;
        }
    }
}

std::string outcome_text(const Outcome& o) {
    switch (o.kind) {
        case Outcome::Kind::Value:
            return show_value(o.value);
        case Outcome::Kind::UnhandledOp:
            return "unhandled operation: #" + o.op + "(" + show_value(o.op_arg) + ")";
        case Outcome::Kind::Stuck:
            return "stuck: " + o.stuck_reason +
                   (o.stuck_redex ? " in `" + pretty(o.stuck_redex) + "`" : "");
        case Outcome::Kind::OutOfFuel:
            return "out of fuel after " + std::to_string(o.steps) + " steps";
    }
    return "?";
}

}  // namespace eff
