#include "eff/effects.hpp"

#include <algorithm>

#include "eff/pretty.hpp"

namespace eff {

bool subeffect(const Effect& e1, const Effect& e2) {
    return std::includes(e2.begin(), e2.end(), e1.begin(), e1.end());
}

std::string effect_to_string(const Effect& e) {
    std::string s = "{";
    bool first = true;
    for (const auto& op : e) {
        if (!first) s += ",";
        s += op;
        first = false;
    }
    return s + "}";
}

namespace {

[[noreturn]] void eff_error(const std::string& msg, Span sp, std::string detail = {},
                            Phase phase = Phase::EffectType) {
    Diagnostic d;
    d.phase = phase;
    d.span = sp;
    d.message = msg;
    d.detail = std::move(detail);
    throw CheckError(std::move(d));
}

Effect unite(const Effect& a, const Effect& b) {
    Effect out = a;
    out.insert(b.begin(), b.end());
    return out;
}

}  // namespace

std::pair<TypePtr, Effect> EffectChecker::infer(TypingContext& ctx, const TermPtr& m) {
    return std::visit(
        [&](const auto& n) -> std::pair<TypePtr, Effect> {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TVar>) {
                const Scheme* s = ctx.lookup(n.name);
                if (!s) eff_error("unbound variable '" + n.name + "'", m->span);
                return {instantiate(st_, *s), {}};
            } else if constexpr (std::is_same_v<N, TConst>) {
                return {const_type(n.c, true), {}};
            } else if constexpr (std::is_same_v<N, TAbs>) {
                TypePtr dom = n.binder_ann ? with_default_effects(*n.binder_ann)
                                           : st_.fresh_uvar(n.binder);
                ctx.push(n.binder, mono(dom));
                auto [cod, eff] = infer(ctx, n.body);
                ctx.pop();
                return {ty_arrow(dom, cod, eff), {}};
            } else if constexpr (std::is_same_v<N, TApp>) {
                auto [tf, ef] = infer(ctx, n.fn);
                TypePtr rf = st_.sub.resolve(tf);
                if (const auto* arrow = std::get_if<TyArrow>(&rf->node)) {
                    Effect ea = check_against(ctx, n.arg, arrow->dom);
                    return {arrow->cod, unite(unite(ef, ea), *arrow->eff)};
                }
                auto [ta, ea] = infer(ctx, n.arg);
                TypePtr res = st_.fresh_uvar();
                unify(st_.sub, tf, ty_arrow(ta, res, Effect{}), m->span);
                return {res, unite(ef, ea)};
            } else if constexpr (std::is_same_v<N, TOpCall>) {
                auto it = st_.sigs.find(n.op);
                if (it == st_.sigs.end())
                    eff_error("operation '" + n.op + "' is not declared", m->span);
                auto [dom, cod] = instantiate(st_, it->second);
                Effect ea = check_against(ctx, n.arg, dom);
                ea.insert(n.op);
                return {cod, ea};
            } else if constexpr (std::is_same_v<N, THandle>) {
                return infer_handle(ctx, n, m->span);
            } else if constexpr (std::is_same_v<N, TLet>) {
                auto [scheme, e1] = check_binding(ctx, n.binder, n.ann, n.bound, m->span);
                ctx.push(n.binder, scheme);
                auto [t, e2] = infer(ctx, n.body);
                ctx.pop();
                return {t, unite(e1, e2)};
            } else if constexpr (std::is_same_v<N, TPair>) {
                auto [tl, el] = infer(ctx, n.left);
                auto [tr, er] = infer(ctx, n.right);
                return {ty_prod(tl, tr), unite(el, er)};
            } else if constexpr (std::is_same_v<N, TProj>) {
                auto [tp, ep] = infer(ctx, n.pair);
                TypePtr l = st_.fresh_uvar(), r = st_.fresh_uvar();
                unify(st_.sub, tp, ty_prod(l, r), m->span);
                return {n.index == 1 ? l : r, ep};
            } else if constexpr (std::is_same_v<N, TInl>) {
                auto [t, e] = infer(ctx, n.value);
                return {ty_sum(t, st_.fresh_uvar()), e};
            } else if constexpr (std::is_same_v<N, TInr>) {
                auto [t, e] = infer(ctx, n.value);
                return {ty_sum(st_.fresh_uvar(), t), e};
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                auto [ts, es] = infer(ctx, n.scrutinee);
                TypePtr a = st_.fresh_uvar(), b = st_.fresh_uvar();
                unify(st_.sub, ts, ty_sum(a, b), n.scrutinee->span);
                ctx.push(n.left_binder, mono(a));
                auto [t1, e1] = infer(ctx, n.left_body);
                ctx.pop();
                ctx.push(n.right_binder, mono(b));
                Effect e2 = check_against(ctx, n.right_body, t1);
                ctx.pop();
                return {t1, unite(unite(es, e1), e2)};
            } else if constexpr (std::is_same_v<N, TNil>) {
                return {ty_list(st_.fresh_uvar()), {}};
            } else if constexpr (std::is_same_v<N, TCons>) {
                auto [tp, e] = infer(ctx, n.pair);
                TypePtr a = st_.fresh_uvar();
                unify(st_.sub, tp, ty_prod(a, ty_list(a)), m->span);
                return {ty_list(a), e};
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                auto [ts, es] = infer(ctx, n.scrutinee);
                TypePtr a = st_.fresh_uvar();
                unify(st_.sub, ts, ty_list(a), n.scrutinee->span);
                auto [t1, e1] = infer(ctx, n.nil_body);
                ctx.push(n.cons_binder, mono(ty_prod(a, ty_list(a))));
                Effect e2 = check_against(ctx, n.cons_body, t1);
                ctx.pop();
                return {t1, unite(unite(es, e1), e2)};
            } else if constexpr (std::is_same_v<N, TFix>) {
                // the fixed point itself is pure; its latent effect is the body's
                TypePtr tf = st_.fresh_uvar(n.fn_binder);
                TypePtr tx = st_.fresh_uvar(n.arg_binder);
                ctx.push(n.fn_binder, mono(tf));
                ctx.push(n.arg_binder, mono(tx));
                auto [tb, eb] = infer(ctx, n.body);
                ctx.pop(2);
                unify(st_.sub, tf, ty_arrow(tx, tb, eb), m->span);
                return {tf, {}};
            } else {
                static_assert(std::is_same_v<N, TIf>);
                Effect ec = check_against(ctx, n.cond, ty_bool());
                auto [tt, et] = infer(ctx, n.then_branch);
                Effect ee = check_against(ctx, n.else_branch, tt);
                return {tt, unite(unite(ec, et), ee)};
            }
        },
        m->node);
}

Effect EffectChecker::check_against(TypingContext& ctx, const TermPtr& m,
                                    const TypePtr& expected_raw) {
    TypePtr expected = st_.sub.resolve(expected_raw);

    if (const auto* abs = std::get_if<TAbs>(&m->node)) {
        if (const auto* arrow = std::get_if<TyArrow>(&expected->node)) {
            if (abs->binder_ann)
                unify(st_.sub, with_default_effects(*abs->binder_ann), arrow->dom,
                      m->span);
            ctx.push(abs->binder, mono(arrow->dom));
            Effect body_eff = check_against(ctx, abs->body, arrow->cod);
            ctx.pop();
            if (!subeffect(body_eff, *arrow->eff))
                eff_error("latent effect overflow: function body performs " +
                              effect_to_string(body_eff) + " but the arrow allows " +
                              effect_to_string(*arrow->eff),
                          m->span);
            return {};
        }
    }
    if (const auto* let = std::get_if<TLet>(&m->node)) {
        auto [scheme, e1] = check_binding(ctx, let->binder, let->ann, let->bound, m->span);
        ctx.push(let->binder, scheme);
        Effect e2 = check_against(ctx, let->body, expected);
        ctx.pop();
        return unite(e1, e2);
    }
    if (const auto* ite = std::get_if<TIf>(&m->node)) {
        Effect ec = check_against(ctx, ite->cond, ty_bool());
        Effect et = check_against(ctx, ite->then_branch, expected);
        Effect ee = check_against(ctx, ite->else_branch, expected);
        return unite(unite(ec, et), ee);
    }
    if (const auto* pair = std::get_if<TPair>(&m->node)) {
        if (const auto* prod = std::get_if<TyProd>(&expected->node)) {
            Effect el = check_against(ctx, pair->left, prod->left);
            Effect er = check_against(ctx, pair->right, prod->right);
            return unite(el, er);
        }
    }
    if (const auto* inl = std::get_if<TInl>(&m->node)) {
        if (const auto* sum = std::get_if<TySum>(&expected->node))
            return check_against(ctx, inl->value, sum->left);
    }
    if (const auto* inr = std::get_if<TInr>(&m->node)) {
        if (const auto* sum = std::get_if<TySum>(&expected->node))
            return check_against(ctx, inr->value, sum->right);
    }
    if (const auto* cons = std::get_if<TCons>(&m->node)) {
        if (const auto* list = std::get_if<TyList>(&expected->node))
            return check_against(ctx, cons->pair,
                                 ty_prod(list->elem, ty_list(list->elem)));
    }
    if (std::holds_alternative<TNil>(m->node)) {
        if (std::holds_alternative<TyList>(expected->node)) return {};
    }
    if (const auto* cs = std::get_if<TCaseSum>(&m->node)) {
        auto [ts, es] = infer(ctx, cs->scrutinee);
        TypePtr a = st_.fresh_uvar(), b = st_.fresh_uvar();
        unify(st_.sub, ts, ty_sum(a, b), cs->scrutinee->span);
        ctx.push(cs->left_binder, mono(a));
        Effect e1 = check_against(ctx, cs->left_body, expected);
        ctx.pop();
        ctx.push(cs->right_binder, mono(b));
        Effect e2 = check_against(ctx, cs->right_body, expected);
        ctx.pop();
        return unite(unite(es, e1), e2);
    }
    if (const auto* cl = std::get_if<TCaseList>(&m->node)) {
        auto [ts, es] = infer(ctx, cl->scrutinee);
        TypePtr a = st_.fresh_uvar();
        unify(st_.sub, ts, ty_list(a), cl->scrutinee->span);
        Effect e1 = check_against(ctx, cl->nil_body, expected);
        ctx.push(cl->cons_binder, mono(ty_prod(a, ty_list(a))));
        Effect e2 = check_against(ctx, cl->cons_body, expected);
        ctx.pop();
        return unite(unite(es, e1), e2);
    }
    if (const auto* opc = std::get_if<TOpCall>(&m->node)) {
        auto it = st_.sigs.find(opc->op);
        if (it == st_.sigs.end())
            eff_error("operation '" + opc->op + "' is not declared", m->span);
        auto [dom, cod] = instantiate(st_, it->second);
        unify(st_.sub, cod, expected, m->span);
        Effect ea = check_against(ctx, opc->arg, dom);
        ea.insert(opc->op);
        return ea;
    }
    if (const auto* app = std::get_if<TApp>(&m->node)) {
        auto [tf, ef] = infer(ctx, app->fn);
        TypePtr rf = st_.sub.resolve(tf);
        if (const auto* arrow = std::get_if<TyArrow>(&rf->node)) {
            Effect ea = check_against(ctx, app->arg, arrow->dom);
            unify(st_.sub, arrow->cod, expected, m->span);
            return unite(unite(ef, ea), *arrow->eff);
        }
        auto [ta, ea] = infer(ctx, app->arg);
        unify(st_.sub, tf, ty_arrow(ta, expected, Effect{}), m->span);
        return unite(ef, ea);
    }

    auto [t, e] = infer(ctx, m);
    unify(st_.sub, t, expected, m->span);
    return e;
}

void EffectChecker::check_eff(TypingContext& ctx, const TermPtr& m, const TypePtr& a,
                              const Effect& eps) {
    Effect e = check_against(ctx, m, a);
    if (!subeffect(e, eps))
        eff_error("term performs effect " + effect_to_string(e) +
                      " exceeding the allowed " + effect_to_string(eps),
                  m->span);
}

Effect EffectChecker::run_clauses(TypingContext& ctx, const Handler& h, const TypePtr& in,
                                  const TypePtr& out, const Effect& out_eff, Span sp,
                                  std::vector<std::pair<std::string, int>>* skolems) {
    Effect clause_effects;

    ctx.push(h.return_binder, mono(in));
    Effect er = check_against(ctx, h.return_body, out);
    ctx.pop();
    clause_effects = unite(clause_effects, er);

    for (const auto& cl : h.op_clauses) {
        auto it = st_.sigs.find(cl.op);
        if (it == st_.sigs.end())
            eff_error("handler clause for undeclared operation '" + cl.op + "'", sp);
        const OpSignature& sig = it->second;
        TypeSubstMap skolemize;
        std::map<int, std::string> hints;
        for (const auto& v : collect_tyvars(sig.dom)) hints[v.id] = v.hint;
        for (const auto& v : collect_tyvars(sig.cod))
            if (!hints.count(v.id)) hints[v.id] = v.hint;
        for (int q : sig.quantified) {
            int id = st_.supply.fresh();
            skolemize[q] = ty_var(id, true, hints.count(q) ? hints[q] : "");
            if (skolems) skolems->emplace_back(cl.op, id);
        }
        TypePtr arg_ty = subst_type(sig.dom, skolemize);
        TypePtr res_ty = subst_type(sig.cod, skolemize);
        ctx.push(cl.arg_binder, mono(arg_ty));
        ctx.push(cl.cont_binder, mono(ty_arrow(res_ty, out, out_eff)));
        Effect ec = check_against(ctx, cl.body, out);
        ctx.pop(2);
        clause_effects = unite(clause_effects, ec);
    }
    return clause_effects;
}

std::pair<TypePtr, Effect> EffectChecker::infer_handle(TypingContext& ctx,
                                                       const THandle& n, Span sp) {
    auto [tin, ein] = infer(ctx, n.body);
    const Handler& h = *n.handler;

    Effect handled;
    for (const auto& cl : h.op_clauses) {
        if (!st_.sigs.count(cl.op))
            eff_error("handler clause for undeclared operation '" + cl.op + "'", sp);
        if (!ein.count(cl.op))
            eff_error("clause for operation '" + cl.op +
                          "' but the handled expression performs only " +
                          effect_to_string(ein),
                      sp);
        handled.insert(cl.op);
    }
    Effect passthrough;
    for (const auto& op : ein)
        if (!handled.count(op)) passthrough.insert(op);

    TypePtr out = st_.fresh_uvar("b");
    Effect out_eff = passthrough;
    // The continuation's latent effect equals the handler's output effect, so
    // iterate to a fixpoint over the finite set of declared operations.
    for (std::size_t round = 0; round <= st_.sigs.size() + 1; ++round) {
        Substitution saved = st_.sub;
        std::vector<std::pair<std::string, int>> skolems;
        Effect clause_effects = run_clauses(ctx, h, tin, out, out_eff, sp, &skolems);
        Effect next = unite(passthrough, clause_effects);
        if (next == out_eff) {
            std::set<int> out_vars = ftv(st_.sub.apply(out));
            std::set<int> in_vars = ftv(st_.sub.apply(tin));
            std::set<int> ctx_vars = ctx.free_type_vars(st_.sub);
            for (const auto& [op, id] : skolems)
                if (out_vars.count(id) || in_vars.count(id) || ctx_vars.count(id))
                    eff_error("type variable of operation '" + op +
                                  "' leaks from its handler clause",
                              sp);
            return {out, out_eff};
        }
        st_.sub = saved;
        out_eff = next;
    }
    eff_error("handler effect computation did not converge", sp);
}

void EffectChecker::check_eff_handler(TypingContext& ctx, const Handler& h,
                                      const TypePtr& in, const Effect& in_eff,
                                      const TypePtr& out, const Effect& out_eff,
                                      Span sp) {
    Effect handled;
    for (const auto& cl : h.op_clauses) {
        if (!in_eff.count(cl.op))
            eff_error("clause for operation '" + cl.op +
                          "' but the input effect is only " + effect_to_string(in_eff),
                      sp);
        handled.insert(cl.op);
    }
    Effect passthrough;
    for (const auto& op : in_eff)
        if (!handled.count(op)) passthrough.insert(op);
    if (!subeffect(passthrough, out_eff))
        eff_error("unhandled operations " + effect_to_string(passthrough) +
                      " do not fit in the output effect " + effect_to_string(out_eff),
                  sp);
    Effect clause_effects = run_clauses(ctx, h, in, out, out_eff, sp, nullptr);
    if (!subeffect(clause_effects, out_eff))
        eff_error("handler clauses perform " + effect_to_string(clause_effects) +
                      " exceeding the output effect " + effect_to_string(out_eff),
                  sp);
}

std::pair<Scheme, Effect> EffectChecker::check_binding(TypingContext& ctx,
                                                       const std::string& name,
                                                       const std::optional<Scheme>& ann,
                                                       const TermPtr& bound, Span sp) {
    if (!ann) {
        auto [t1, e1] = infer(ctx, bound);
        if (is_value(bound) || sr_.sr_effect(e1))
            return {generalize(st_, ctx, t1), e1};
        return {mono(st_.sub.apply(t1)), e1};
    }

    Scheme norm{ann->quantified, with_default_effects(ann->body)};
    std::vector<int> rigids;
    TypeSubstMap skolemize;
    std::map<int, std::string> hints;
    for (const auto& v : collect_tyvars(norm.body)) hints[v.id] = v.hint;
    for (int q : norm.quantified) {
        int id = st_.supply.fresh();
        skolemize[q] = ty_var(id, true, hints.count(q) ? hints[q] : "");
        rigids.push_back(id);
    }
    TypePtr expected = subst_type(norm.body, skolemize);
    Effect e1 = check_against(ctx, bound, expected);

    // Te-Gen: a non-value may have a polymorphic type only if its effect
    // satisfies the signature restriction.
    if (!rigids.empty() && !is_value(bound) && !sr_.sr_effect(e1))
        eff_error("polymorphic binding '" + name + "' performs effect " +
                      effect_to_string(e1) +
                      " which does not satisfy the signature restriction",
                  sp, "a non-value can be generalized only over effects whose "
                      "operations all satisfy the signature restriction",
                  Phase::EffectGate);

    std::set<int> ctx_vars = ctx.free_type_vars(st_.sub);
    for (int id : rigids)
        if (ctx_vars.count(id))
            eff_error("annotation type variable of '" + name +
                          "' escapes into the environment",
                      sp);

    TypePtr body = st_.sub.apply(expected);
    std::set<int> body_vars = ftv(body);
    std::vector<int> quantified;
    for (int id : rigids)
        if (body_vars.count(id)) quantified.push_back(id);
    return {Scheme{std::move(quantified), body}, e1};
}

std::optional<EffCheckedProgram> check_program_effects(InferenceState& st,
                                                       const Program& p,
                                                       std::vector<Diagnostic>& diags) {
    st.effect_mode = true;
    for (const auto& d : p.decls) {
        OpSignature sig = d.sig;
        sig.dom = with_default_effects(sig.dom);
        sig.cod = with_default_effects(sig.cod);
        st.sigs[d.name] = sig;
    }
    // all operation names mentioned inside signature effect annotations must
    // be declared (mutual references are fine)
    for (const auto& d : p.decls) {
        const OpSignature& sig = st.sigs.at(d.name);
        for (const TypePtr& side : {sig.dom, sig.cod}) {
            std::vector<TypePtr> stack{side};
            while (!stack.empty()) {
                TypePtr t = stack.back();
                stack.pop_back();
                std::visit(
                    [&](const auto& n) {
                        using N = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<N, TyArrow>) {
                            if (n.eff)
                                for (const auto& op : *n.eff)
                                    if (!st.sigs.count(op)) {
                                        Diagnostic diag;
                                        diag.phase = Phase::EffectType;
                                        diag.span = d.span;
                                        diag.message = "signature of '" + d.name +
                                                       "' mentions undeclared operation '" +
                                                       op + "'";
                                        diags.push_back(diag);
                                    }
                            stack.push_back(n.dom);
                            stack.push_back(n.cod);
                        } else if constexpr (std::is_same_v<N, TyProd> ||
                                             std::is_same_v<N, TySum>) {
                            stack.push_back(n.left);
                            stack.push_back(n.right);
                        } else if constexpr (std::is_same_v<N, TyList>) {
                            stack.push_back(n.elem);
                        }
                    },
                    t->node);
            }
        }
    }
    if (!diags.empty()) return std::nullopt;

    EffCheckedProgram out;
    EffectChecker checker(st);
    TypingContext ctx;
    try {
        for (const auto& b : p.bindings) {
            auto [scheme, eff] = checker.check_binding(ctx, b.name, b.ann, b.term, b.span);
            ctx.push(b.name, scheme);
            out.bindings.emplace_back(b.name, scheme);
            out.binding_effects.push_back(eff);
            out.program_effect.insert(eff.begin(), eff.end());
        }
        if (p.main) {
            auto [t, e] = checker.infer(ctx, *p.main);
            out.main_type = st.sub.apply(t);
            out.main_effect = e;
            out.program_effect.insert(e.begin(), e.end());
        }
    } catch (const CheckError& e) {
        diags.push_back(e.diag);
        return std::nullopt;
    }
    return out;
}

}  // namespace eff
