#include "eff/bigstep.hpp"

#include <functional>

namespace eff {

namespace {

using Builder = std::function<TermPtr(TermPtr)>;

struct Big {
    enum class Kind { Value, Request, Stuck, OutOfFuel } kind;
    TermPtr value;
    std::string op;
    TermPtr op_arg;
    Builder ctx;               // op-free context around the request
    std::string stuck_reason;
    TermPtr stuck_redex;
};

Big value(TermPtr v) { return Big{Big::Kind::Value, std::move(v), {}, nullptr, nullptr, {}, nullptr}; }

Big stuck(std::string reason, TermPtr redex = nullptr) {
    Big b{Big::Kind::Stuck, nullptr, {}, nullptr, nullptr, std::move(reason), std::move(redex)};
    return b;
}

struct Evaluator {
    long long fuel;

    bool spend() {
        if (fuel <= 0) return false;
        --fuel;
        return true;
    }

    // Bubble a result through one surrounding frame: on a value continue with
    // `next`, on a request extend the term-building context by `rebuild`.
    Big seq(Big r, const Builder& rebuild, const std::function<Big(TermPtr)>& next) {
        switch (r.kind) {
            case Big::Kind::Value:
                return next(r.value);
            case Big::Kind::Request: {
                Builder inner = r.ctx;
                r.ctx = [inner, rebuild](TermPtr h) { return rebuild(inner(h)); };
                return r;
            }
            default:
                return r;
        }
    }

    Big apply(const TermPtr& fn, const TermPtr& arg, Span sp) {
        if (const auto* abs = std::get_if<TAbs>(&fn->node)) {
            if (!spend()) return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr, nullptr, {}, nullptr};
            return eval(subst_term(abs->body, abs->binder, arg));
        }
        if (const auto* cst = std::get_if<TConst>(&fn->node)) {
            const auto* argc = std::get_if<TConst>(&arg->node);
            if (!argc)
                return stuck("constant '" + show_constant(cst->c) +
                                 "' applied to a non-constant value",
                             mk_app(fn, arg, sp));
            auto res = zeta(cst->c, argc->c);
            if (!res)
                return stuck("constant application undefined: " + show_constant(cst->c) +
                                 " " + show_constant(argc->c),
                             mk_app(fn, arg, sp));
            if (!spend()) return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr, nullptr, {}, nullptr};
            return value(mk_const(*res, sp));
        }
        return stuck("application of a non-function value", mk_app(fn, arg, sp));
    }

    Big handle_result(Big r, const HandlerPtr& handler, Span sp) {
        const Handler& h = *handler;
        switch (r.kind) {
            case Big::Kind::Value:
                if (!spend()) return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr, nullptr, {}, nullptr};
                return eval(subst_term(h.return_body, h.return_binder, r.value));
            case Big::Kind::Request: {
                const OpClause* cl = h.find(r.op);
                if (!cl) {
                    Builder inner = r.ctx;
                    HandlerPtr hp = handler;
                    r.ctx = [inner, hp, sp](TermPtr hole) {
                        return mk_handle(inner(hole), hp, sp);
                    };
                    return r;
                }
                if (!spend()) return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr, nullptr, {}, nullptr};
                TermPtr kont =
                    mk_abs("y", mk_handle(r.ctx(mk_var("y", sp)), handler, sp), sp);
                TermPtr body = subst_term(cl->body, cl->arg_binder, r.op_arg);
                body = subst_term(body, cl->cont_binder, kont);
                return eval(body);
            }
            default:
                return r;
        }
    }

    Big eval(const TermPtr& m) {
        const Span sp = m->span;
        return std::visit(
            [&](const auto& n) -> Big {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, TVar>) {
                    return stuck("free variable '" + n.name + "'", m);
                } else if constexpr (std::is_same_v<N, TConst> ||
                                     std::is_same_v<N, TAbs> ||
                                     std::is_same_v<N, TNil>) {
                    return value(m);
                } else if constexpr (std::is_same_v<N, TApp>) {
                    TermPtr arg_term = n.arg;
                    return seq(
                        eval(n.fn),
                        [arg_term, sp](TermPtr h) { return mk_app(h, arg_term, sp); },
                        [&](TermPtr vf) {
                            return seq(
                                eval(n.arg),
                                [vf, sp](TermPtr h) { return mk_app(vf, h, sp); },
                                [&](TermPtr va) { return apply(vf, va, sp); });
                        });
                } else if constexpr (std::is_same_v<N, TOpCall>) {
                    std::string op = n.op;
                    return seq(
                        eval(n.arg),
                        [op, sp](TermPtr h) { return mk_opcall(op, h, sp); },
                        [&](TermPtr va) -> Big {
                            Big b;
                            b.kind = Big::Kind::Request;
                            b.op = n.op;
                            b.op_arg = va;
                            b.ctx = [](TermPtr h) { return h; };
                            return b;
                        });
                } else if constexpr (std::is_same_v<N, THandle>) {
                    return handle_result(eval(n.body), n.handler, sp);
                } else if constexpr (std::is_same_v<N, TLet>) {
                    auto binder = n.binder;
                    auto ann = n.ann;
                    auto body = n.body;
                    return seq(
                        eval(n.bound),
                        [binder, ann, body, sp](TermPtr h) {
                            return mk_let(binder, h, body, sp, ann);
                        },
                        [&](TermPtr v) -> Big {
                            if (!spend())
                                return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr,
                                           nullptr, {}, nullptr};
                            return eval(subst_term(n.body, n.binder, v));
                        });
                } else if constexpr (std::is_same_v<N, TPair>) {
                    TermPtr right = n.right;
                    return seq(
                        eval(n.left),
                        [right, sp](TermPtr h) { return mk_pair(h, right, sp); },
                        [&](TermPtr vl) {
                            return seq(
                                eval(n.right),
                                [vl, sp](TermPtr h) { return mk_pair(vl, h, sp); },
                                [&](TermPtr vr) { return value(mk_pair(vl, vr, sp)); });
                        });
                } else if constexpr (std::is_same_v<N, TProj>) {
                    int index = n.index;
                    return seq(
                        eval(n.pair),
                        [index, sp](TermPtr h) { return mk_proj(index, h, sp); },
                        [&](TermPtr v) -> Big {
                            const auto* pair = std::get_if<TPair>(&v->node);
                            if (!pair)
                                return stuck("projection from a non-pair value",
                                             mk_proj(n.index, v, sp));
                            if (!spend())
                                return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr,
                                           nullptr, {}, nullptr};
                            return value(n.index == 1 ? pair->left : pair->right);
                        });
                } else if constexpr (std::is_same_v<N, TInl>) {
                    return seq(
                        eval(n.value), [sp](TermPtr h) { return mk_inl(h, sp); },
                        [&](TermPtr v) { return value(mk_inl(v, sp)); });
                } else if constexpr (std::is_same_v<N, TInr>) {
                    return seq(
                        eval(n.value), [sp](TermPtr h) { return mk_inr(h, sp); },
                        [&](TermPtr v) { return value(mk_inr(v, sp)); });
                } else if constexpr (std::is_same_v<N, TCaseSum>) {
                    auto lb = n.left_binder;
                    auto lbody = n.left_body;
                    auto rb = n.right_binder;
                    auto rbody = n.right_body;
                    return seq(
                        eval(n.scrutinee),
                        [lb, lbody, rb, rbody, sp](TermPtr h) {
                            return mk_case_sum(h, lb, lbody, rb, rbody, sp);
                        },
                        [&](TermPtr v) -> Big {
                            if (!spend())
                                return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr,
                                           nullptr, {}, nullptr};
                            if (const auto* inl = std::get_if<TInl>(&v->node))
                                return eval(subst_term(n.left_body, n.left_binder,
                                                       inl->value));
                            if (const auto* inr = std::get_if<TInr>(&v->node))
                                return eval(subst_term(n.right_body, n.right_binder,
                                                       inr->value));
                            return stuck("case on a non-sum value", v);
                        });
                } else if constexpr (std::is_same_v<N, TCons>) {
                    return seq(
                        eval(n.pair), [sp](TermPtr h) { return mk_cons(h, sp); },
                        [&](TermPtr v) { return value(mk_cons(v, sp)); });
                } else if constexpr (std::is_same_v<N, TCaseList>) {
                    auto nil_body = n.nil_body;
                    auto cb = n.cons_binder;
                    auto cbody = n.cons_body;
                    return seq(
                        eval(n.scrutinee),
                        [nil_body, cb, cbody, sp](TermPtr h) {
                            return mk_case_list(h, nil_body, cb, cbody, sp);
                        },
                        [&](TermPtr v) -> Big {
                            if (!spend())
                                return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr,
                                           nullptr, {}, nullptr};
                            if (std::holds_alternative<TNil>(v->node))
                                return eval(n.nil_body);
                            if (const auto* cons = std::get_if<TCons>(&v->node))
                                return eval(subst_term(n.cons_body, n.cons_binder,
                                                       cons->pair));
                            return stuck("case on a non-list value", v);
                        });
                } else if constexpr (std::is_same_v<N, TFix>) {
                    if (!spend())
                        return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr, nullptr,
                                   {}, nullptr};
                    TermPtr lam = mk_abs(n.arg_binder, n.body, sp);
                    return value(subst_term(lam, n.fn_binder, m));
                } else {
                    static_assert(std::is_same_v<N, TIf>);
                    auto tb = n.then_branch;
                    auto eb = n.else_branch;
                    return seq(
                        eval(n.cond),
                        [tb, eb, sp](TermPtr h) { return mk_if(h, tb, eb, sp); },
                        [&](TermPtr v) -> Big {
                            const auto* c = std::get_if<TConst>(&v->node);
                            if (!c || c->c.tag != Constant::Tag::Bool)
                                return stuck("if condition is not a boolean", v);
                            if (!spend())
                                return Big{Big::Kind::OutOfFuel, nullptr, {}, nullptr,
                                           nullptr, {}, nullptr};
                            return eval(c->c.bool_val ? n.then_branch : n.else_branch);
                        });
                }
            },
            m->node);
    }
};

}  // namespace

Outcome bigstep_oracle(const TermPtr& m, long long fuel) {
    Evaluator ev{fuel};
    Big r = ev.eval(m);
    Outcome out;
    switch (r.kind) {
        case Big::Kind::Value:
            out.kind = Outcome::Kind::Value;
            out.value = r.value;
            break;
        case Big::Kind::Request:
            out.kind = Outcome::Kind::UnhandledOp;
            out.op = r.op;
            out.op_arg = r.op_arg;
            break;
        case Big::Kind::Stuck:
            out.kind = Outcome::Kind::Stuck;
            out.stuck_reason = r.stuck_reason;
            out.stuck_redex = r.stuck_redex;
            break;
        case Big::Kind::OutOfFuel:
            out.kind = Outcome::Kind::OutOfFuel;
            break;
    }
    return out;
}

}  // namespace eff
