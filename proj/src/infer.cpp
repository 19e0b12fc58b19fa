#include "eff/infer.hpp"

#include "eff/pretty.hpp"

namespace eff {

Scheme mono(TypePtr t) { return Scheme{{}, std::move(t)}; }

namespace {

[[noreturn]] void type_error(const std::string& msg, Span sp, std::string detail = {}) {
    Diagnostic d;
    d.phase = Phase::Type;
    d.span = sp;
    d.message = msg;
    d.detail = std::move(detail);
    throw CheckError(std::move(d));
}

void collect_tyvars_into(const TypePtr& t, std::vector<TyVar>& out, std::set<int>& seen) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyVar>) {
                if (seen.insert(n.id).second) out.push_back(n);
            } else if constexpr (std::is_same_v<N, TyArrow>) {
                collect_tyvars_into(n.dom, out, seen);
                collect_tyvars_into(n.cod, out, seen);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                collect_tyvars_into(n.left, out, seen);
                collect_tyvars_into(n.right, out, seen);
            } else if constexpr (std::is_same_v<N, TyList>) {
                collect_tyvars_into(n.elem, out, seen);
            }
        },
        t->node);
}

}  // namespace

std::vector<TyVar> collect_tyvars(const TypePtr& t) {
    std::vector<TyVar> out;
    std::set<int> seen;
    collect_tyvars_into(t, out, seen);
    return out;
}

void ensure_plain(const TypePtr& t, Span sp) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyArrow>) {
                if (n.eff) type_error("effect annotations require --effects", sp);
                ensure_plain(n.dom, sp);
                ensure_plain(n.cod, sp);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                ensure_plain(n.left, sp);
                ensure_plain(n.right, sp);
            } else if constexpr (std::is_same_v<N, TyList>) {
                ensure_plain(n.elem, sp);
            }
        },
        t->node);
}

TypePtr with_default_effects(const TypePtr& t) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyArrow>) {
                return ty_arrow(with_default_effects(n.dom), with_default_effects(n.cod),
                                n.eff ? *n.eff : Effect{});
            } else if constexpr (std::is_same_v<N, TyProd>) {
                return ty_prod(with_default_effects(n.left), with_default_effects(n.right));
            } else if constexpr (std::is_same_v<N, TySum>) {
                return ty_sum(with_default_effects(n.left), with_default_effects(n.right));
            } else if constexpr (std::is_same_v<N, TyList>) {
                return ty_list(with_default_effects(n.elem));
            } else {
                return t;
            }
        },
        t->node);
}

namespace {

// Maps quantified variables to images, preserving display hints.
TypeSubstMap quantified_map(InferenceState& st, const std::vector<int>& quantified,
                            const TypePtr& hint_source_a, const TypePtr& hint_source_b,
                            bool rigid, std::vector<int>* new_ids) {
    std::map<int, std::string> hints;
    for (const auto& v : collect_tyvars(hint_source_a)) hints[v.id] = v.hint;
    if (hint_source_b)
        for (const auto& v : collect_tyvars(hint_source_b))
            if (!hints.count(v.id)) hints[v.id] = v.hint;
    TypeSubstMap m;
    for (int q : quantified) {
        int id = st.supply.fresh();
        m[q] = ty_var(id, rigid, hints.count(q) ? hints[q] : "");
        if (new_ids) new_ids->push_back(id);
    }
    return m;
}

}  // namespace

TypePtr instantiate(InferenceState& st, const Scheme& s) {
    TypePtr body = st.sub.apply(s.body);
    if (s.quantified.empty()) return body;
    TypeSubstMap m = quantified_map(st, s.quantified, body, nullptr, false, nullptr);
    return subst_type(body, m);
}

std::pair<TypePtr, TypePtr> instantiate(InferenceState& st, const OpSignature& sig) {
    if (sig.quantified.empty()) return {sig.dom, sig.cod};
    TypeSubstMap m = quantified_map(st, sig.quantified, sig.dom, sig.cod, false, nullptr);
    return {subst_type(sig.dom, m), subst_type(sig.cod, m)};
}

Scheme generalize(InferenceState& st, const TypingContext& ctx, TypePtr t) {
    TypePtr body = st.sub.apply(t);
    std::set<int> ctx_vars = ctx.free_type_vars(st.sub);
    std::vector<int> quantified;
    TypeSubstMap promote;
    for (const auto& v : collect_tyvars(body)) {
        if (v.rigid || ctx_vars.count(v.id)) continue;
        int id = st.supply.fresh();
        promote[v.id] = ty_var(id, true, v.hint);
        quantified.push_back(id);
    }
    if (!promote.empty()) {
        for (const auto& [from, to] : promote) st.sub.bind(from, to);
        body = subst_type(body, promote);
    }
    return Scheme{std::move(quantified), body};
}

TypePtr infer_term(InferenceState& st, TypingContext& ctx, const TermPtr& m) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TVar>) {
                const Scheme* s = ctx.lookup(n.name);
                if (!s) type_error("unbound variable '" + n.name + "'", m->span);
                return instantiate(st, *s);
            } else if constexpr (std::is_same_v<N, TConst>) {
                return const_type(n.c, st.effect_mode);
            } else if constexpr (std::is_same_v<N, TAbs>) {
                TypePtr dom;
                if (n.binder_ann) {
                    ensure_plain(*n.binder_ann, m->span);
                    dom = *n.binder_ann;
                } else {
                    dom = st.fresh_uvar(n.binder);
                }
                ctx.push(n.binder, mono(dom));
                TypePtr cod = infer_term(st, ctx, n.body);
                ctx.pop();
                return ty_arrow(dom, cod);
            } else if constexpr (std::is_same_v<N, TApp>) {
                TypePtr tf = infer_term(st, ctx, n.fn);
                TypePtr ta = infer_term(st, ctx, n.arg);
                TypePtr res = st.fresh_uvar();
                unify(st.sub, tf, ty_arrow(ta, res), m->span);
                return res;
            } else if constexpr (std::is_same_v<N, TOpCall>) {
                auto it = st.sigs.find(n.op);
                if (it == st.sigs.end())
                    type_error("operation '" + n.op + "' is not declared", m->span);
                auto [dom, cod] = instantiate(st, it->second);
                TypePtr ta = infer_term(st, ctx, n.arg);
                unify(st.sub, ta, dom, m->span);
                return cod;
            } else if constexpr (std::is_same_v<N, THandle>) {
                TypePtr tin = infer_term(st, ctx, n.body);
                return infer_handler(st, ctx, *n.handler, tin, m->span);
            } else if constexpr (std::is_same_v<N, TLet>) {
                Scheme s = infer_binding(st, ctx, n.binder, n.ann, n.bound, m->span);
                ctx.push(n.binder, std::move(s));
                TypePtr t = infer_term(st, ctx, n.body);
                ctx.pop();
                return t;
            } else if constexpr (std::is_same_v<N, TPair>) {
                return ty_prod(infer_term(st, ctx, n.left), infer_term(st, ctx, n.right));
            } else if constexpr (std::is_same_v<N, TProj>) {
                TypePtr tp = infer_term(st, ctx, n.pair);
                TypePtr l = st.fresh_uvar(), r = st.fresh_uvar();
                unify(st.sub, tp, ty_prod(l, r), m->span);
                return n.index == 1 ? l : r;
            } else if constexpr (std::is_same_v<N, TInl>) {
                TypePtr t = infer_term(st, ctx, n.value);
                return ty_sum(t, st.fresh_uvar());
            } else if constexpr (std::is_same_v<N, TInr>) {
                TypePtr t = infer_term(st, ctx, n.value);
                return ty_sum(st.fresh_uvar(), t);
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                TypePtr ts = infer_term(st, ctx, n.scrutinee);
                TypePtr a = st.fresh_uvar(), b = st.fresh_uvar();
                unify(st.sub, ts, ty_sum(a, b), n.scrutinee->span);
                ctx.push(n.left_binder, mono(a));
                TypePtr t1 = infer_term(st, ctx, n.left_body);
                ctx.pop();
                ctx.push(n.right_binder, mono(b));
                TypePtr t2 = infer_term(st, ctx, n.right_body);
                ctx.pop();
                unify(st.sub, t1, t2, m->span);
                return t1;
            } else if constexpr (std::is_same_v<N, TNil>) {
                return ty_list(st.fresh_uvar());
            } else if constexpr (std::is_same_v<N, TCons>) {
                TypePtr tp = infer_term(st, ctx, n.pair);
                TypePtr a = st.fresh_uvar();
                unify(st.sub, tp, ty_prod(a, ty_list(a)), m->span);
                return ty_list(a);
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                TypePtr ts = infer_term(st, ctx, n.scrutinee);
                TypePtr a = st.fresh_uvar();
                unify(st.sub, ts, ty_list(a), n.scrutinee->span);
                TypePtr t1 = infer_term(st, ctx, n.nil_body);
                ctx.push(n.cons_binder, mono(ty_prod(a, ty_list(a))));
                TypePtr t2 = infer_term(st, ctx, n.cons_body);
                ctx.pop();
                unify(st.sub, t1, t2, m->span);
                return t1;
            } else if constexpr (std::is_same_v<N, TFix>) {
                TypePtr tf = st.fresh_uvar(n.fn_binder);
                TypePtr tx = st.fresh_uvar(n.arg_binder);
                ctx.push(n.fn_binder, mono(tf));
                ctx.push(n.arg_binder, mono(tx));
                TypePtr tb = infer_term(st, ctx, n.body);
                ctx.pop(2);
                unify(st.sub, tf, ty_arrow(tx, tb), m->span);
                return tf;
            } else {
                static_assert(std::is_same_v<N, TIf>);
                TypePtr tc = infer_term(st, ctx, n.cond);
                unify(st.sub, tc, ty_bool(), n.cond->span);
                TypePtr tt = infer_term(st, ctx, n.then_branch);
                TypePtr te = infer_term(st, ctx, n.else_branch);
                unify(st.sub, tt, te, m->span);
                return tt;
            }
        },
        m->node);
}

TypePtr infer_handler(InferenceState& st, TypingContext& ctx, const Handler& h,
                      TypePtr input, Span sp) {
    TypePtr out = st.fresh_uvar("b");

    ctx.push(h.return_binder, mono(input));
    TypePtr tr = infer_term(st, ctx, h.return_body);
    ctx.pop();
    unify(st.sub, tr, out, h.return_body->span);

    std::vector<std::pair<std::string, int>> skolems;
    for (const auto& cl : h.op_clauses) {
        auto it = st.sigs.find(cl.op);
        if (it == st.sigs.end())
            type_error("handler clause for undeclared operation '" + cl.op + "'", sp);
        const OpSignature& sig = it->second;
        std::vector<int> fresh_ids;
        TypeSubstMap skolemize = quantified_map(st, sig.quantified, sig.dom, sig.cod,
                                                true, &fresh_ids);
        for (int id : fresh_ids) skolems.emplace_back(cl.op, id);
        TypePtr arg_ty = subst_type(sig.dom, skolemize);
        TypePtr res_ty = subst_type(sig.cod, skolemize);
        ctx.push(cl.arg_binder, mono(arg_ty));
        ctx.push(cl.cont_binder, mono(ty_arrow(res_ty, out)));
        TypePtr tm = infer_term(st, ctx, cl.body);
        ctx.pop(2);
        unify(st.sub, tm, out, cl.body->span);
    }

    std::set<int> out_vars = ftv(st.sub.apply(out));
    std::set<int> in_vars = ftv(st.sub.apply(input));
    std::set<int> ctx_vars = ctx.free_type_vars(st.sub);
    for (const auto& [op, id] : skolems) {
        if (out_vars.count(id) || in_vars.count(id) || ctx_vars.count(id))
            type_error("type variable of operation '" + op +
                           "' leaks from its handler clause",
                       sp, "handler output type: " + pretty(st.sub.apply(out)));
    }
    return out;
}

Scheme infer_binding(InferenceState& st, TypingContext& ctx, const std::string& name,
                     const std::optional<Scheme>& ann, const TermPtr& bound, Span sp) {
    TypePtr t1 = infer_term(st, ctx, bound);
    if (!ann) return generalize(st, ctx, t1);

    if (!st.effect_mode) ensure_plain(ann->body, sp);
    std::vector<int> rigids;
    TypeSubstMap skolemize = quantified_map(st, ann->quantified, ann->body, nullptr,
                                            true, &rigids);
    TypePtr expected = subst_type(ann->body, skolemize);
    unify(st.sub, t1, expected, sp);

    std::set<int> ctx_vars = ctx.free_type_vars(st.sub);
    for (int id : rigids)
        if (ctx_vars.count(id))
            type_error("annotation type variable of '" + name +
                           "' escapes into the environment",
                       sp);

    Scheme s = generalize(st, ctx, t1);
    std::set<int> body_vars = ftv(s.body);
    std::vector<int> quantified;
    for (int id : rigids)
        if (body_vars.count(id)) quantified.push_back(id);
    for (int id : s.quantified) quantified.push_back(id);
    s.quantified = std::move(quantified);
    return s;
}

std::optional<CheckedProgram> check_program(InferenceState& st, const Program& p,
                                            std::vector<Diagnostic>& diags) {
    for (const auto& d : p.decls) {
        try {
            ensure_plain(d.sig.dom, d.span);
            ensure_plain(d.sig.cod, d.span);
        } catch (const CheckError& e) {
            diags.push_back(e.diag);
            continue;
        }
        st.sigs[d.name] = d.sig;
    }
    if (!diags.empty()) return std::nullopt;

    if (st.sr_enabled) {
        for (const auto& d : p.decls) {
            SrVerdict v = check_sr(d.sig);
            if (!v.pass) {
                Diagnostic diag;
                diag.phase = Phase::SignatureRestriction;
                diag.span = d.span;
                diag.message = "operation '" + d.name +
                               "' violates the signature restriction";
                diag.detail = v.describe();
                diags.push_back(diag);
            }
        }
        if (!diags.empty()) return std::nullopt;
    }

    CheckedProgram out;
    TypingContext ctx;
    try {
        for (const auto& b : p.bindings) {
            Scheme s = infer_binding(st, ctx, b.name, b.ann, b.term, b.span);
            ctx.push(b.name, s);
            out.bindings.emplace_back(b.name, s);
        }
        if (p.main) {
            TypePtr t = infer_term(st, ctx, *p.main);
            out.main_scheme = generalize(st, ctx, t);
        }
    } catch (const CheckError& e) {
        diags.push_back(e.diag);
        return std::nullopt;
    }
    return out;
}

}  // namespace eff
