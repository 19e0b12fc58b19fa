#include "eff/session.hpp"

#include "eff/pretty.hpp"

namespace eff {

TermPtr link_program(const Program& p) {
    TermPtr body = p.main ? *p.main : mk_unit();
    for (auto it = p.bindings.rbegin(); it != p.bindings.rend(); ++it)
        body = mk_let(it->name, it->term, body, it->span, it->ann);
    return body;
}

namespace {

TypePtr strip_effects(const TypePtr& t) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyArrow>) {
                return ty_arrow(strip_effects(n.dom), strip_effects(n.cod), std::nullopt);
            } else if constexpr (std::is_same_v<N, TyProd>) {
                return ty_prod(strip_effects(n.left), strip_effects(n.right));
            } else if constexpr (std::is_same_v<N, TySum>) {
                return ty_sum(strip_effects(n.left), strip_effects(n.right));
            } else if constexpr (std::is_same_v<N, TyList>) {
                return ty_list(strip_effects(n.elem));
            } else {
                return t;
            }
        },
        t->node);
}

TermPtr strip_term(const TermPtr& t) {
    return std::visit(
        [&](const auto& n) -> TermPtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TVar> || std::is_same_v<N, TConst> ||
                          std::is_same_v<N, TNil>) {
                return t;
            } else if constexpr (std::is_same_v<N, TAbs>) {
                std::optional<TypePtr> ann;
                if (n.binder_ann) ann = strip_effects(*n.binder_ann);
                return mk_abs(n.binder, strip_term(n.body), t->span, ann);
            } else if constexpr (std::is_same_v<N, TApp>) {
                return mk_app(strip_term(n.fn), strip_term(n.arg), t->span);
            } else if constexpr (std::is_same_v<N, TOpCall>) {
                return mk_opcall(n.op, strip_term(n.arg), t->span);
            } else if constexpr (std::is_same_v<N, THandle>) {
                std::vector<OpClause> clauses;
                for (const auto& cl : n.handler->op_clauses)
                    clauses.push_back(OpClause{cl.op, cl.arg_binder, cl.cont_binder,
                                               strip_term(cl.body)});
                return mk_handle(strip_term(n.body),
                                 mk_handler(n.handler->return_binder,
                                            strip_term(n.handler->return_body),
                                            std::move(clauses)),
                                 t->span);
            } else if constexpr (std::is_same_v<N, TLet>) {
                std::optional<Scheme> ann;
                if (n.ann) ann = Scheme{n.ann->quantified, strip_effects(n.ann->body)};
                return mk_let(n.binder, strip_term(n.bound), strip_term(n.body), t->span,
                              ann);
            } else if constexpr (std::is_same_v<N, TPair>) {
                return mk_pair(strip_term(n.left), strip_term(n.right), t->span);
            } else if constexpr (std::is_same_v<N, TProj>) {
                return mk_proj(n.index, strip_term(n.pair), t->span);
            } else if constexpr (std::is_same_v<N, TInl>) {
                return mk_inl(strip_term(n.value), t->span);
            } else if constexpr (std::is_same_v<N, TInr>) {
                return mk_inr(strip_term(n.value), t->span);
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                return mk_case_sum(strip_term(n.scrutinee), n.left_binder,
                                   strip_term(n.left_body), n.right_binder,
                                   strip_term(n.right_body), t->span);
            } else if constexpr (std::is_same_v<N, TCons>) {
                return mk_cons(strip_term(n.pair), t->span);
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                return mk_case_list(strip_term(n.scrutinee), strip_term(n.nil_body),
                                    n.cons_binder, strip_term(n.cons_body), t->span);
            } else if constexpr (std::is_same_v<N, TFix>) {
                return mk_fix(n.fn_binder, n.arg_binder, strip_term(n.body), t->span);
            } else {
                static_assert(std::is_same_v<N, TIf>);
                return mk_if(strip_term(n.cond), strip_term(n.then_branch),
                             strip_term(n.else_branch), t->span);
            }
        },
        t->node);
}

}  // namespace

Program erase_effect_annotations(const Program& p) {
    Program out;
    for (const auto& d : p.decls) {
        OpDecl nd = d;
        nd.sig.dom = strip_effects(d.sig.dom);
        nd.sig.cod = strip_effects(d.sig.cod);
        out.decls.push_back(std::move(nd));
    }
    for (const auto& b : p.bindings) {
        TopBinding nb = b;
        nb.term = strip_term(b.term);
        if (b.ann) nb.ann = Scheme{b.ann->quantified, strip_effects(b.ann->body)};
        out.bindings.push_back(std::move(nb));
    }
    if (p.main) out.main = strip_term(*p.main);
    return out;
}

CheckOutput check_source(const std::string& src, const SessionConfig& cfg) {
    CheckOutput out;
    ParseResult parsed = parse_program(src);
    if (!parsed.ok()) {
        out.diagnostics = parsed.diagnostics;
        return out;
    }
    out.program = parsed.program;
    const Program& p = *parsed.program;

    InferenceState st;
    st.sr_enabled = cfg.sr_enabled;
    if (cfg.effects_mode) {
        auto checked = check_program_effects(st, p, out.diagnostics);
        if (!checked) return out;
        for (std::size_t i = 0; i < checked->bindings.size(); ++i) {
            const auto& [name, scheme] = checked->bindings[i];
            out.lines.push_back(name + " : " + pretty_normalized(st.sub.apply(scheme)) +
                                " | " + effect_to_string(checked->binding_effects[i]));
        }
        if (checked->main_type) {
            Scheme s = mono(st.sub.apply(*checked->main_type));
            out.lines.push_back("main : " + pretty_normalized(s) + " | " +
                                effect_to_string(checked->main_effect));
            out.main_type = checked->main_type;
            out.main_effect = checked->main_effect;
        }
        out.program_effect = checked->program_effect;
        out.ok = true;
        return out;
    }

    auto checked = check_program(st, p, out.diagnostics);
    if (!checked) return out;
    for (const auto& [name, scheme] : checked->bindings)
        out.lines.push_back(name + " : " + pretty_normalized(st.sub.apply(scheme)));
    if (checked->main_scheme) {
        out.main_scheme = st.sub.apply(*checked->main_scheme);
        out.lines.push_back("main : " + pretty_normalized(*out.main_scheme));
    }
    out.ok = true;
    return out;
}

RunOutput run_source(const std::string& src, const SessionConfig& cfg) {
    RunOutput out;
    out.check = check_source(src, cfg);
    if (!out.check.ok) return out;
    TermPtr whole = link_program(*out.check.program);
    out.outcome = run(whole, cfg.max_steps, cfg.trace ? &out.trace_lines : nullptr);
    return out;
}

// ---------------------------------------------------------------------------
// Session (REPL)
// ---------------------------------------------------------------------------

Session::Session(SessionConfig cfg) : cfg_(std::move(cfg)) {
    st_.sr_enabled = cfg_.sr_enabled;
    st_.effect_mode = cfg_.effects_mode;
    if (cfg_.effects_mode) eff_.emplace(st_);
}

TermPtr Session::close_over_bindings(TermPtr expr) const {
    for (auto it = values_.rbegin(); it != values_.rend(); ++it)
        expr = subst_term(expr, it->first, it->second);
    return expr;
}

std::optional<Scheme> Session::check_expr(const TermPtr& expr, EntryResult& res,
                                          Effect* eff_out) {
    try {
        if (cfg_.effects_mode) {
            auto [t, e] = eff_->infer(ctx_, expr);
            if (eff_out) *eff_out = e;
            return generalize(st_, ctx_, t);
        }
        TypePtr t = infer_term(st_, ctx_, expr);
        return generalize(st_, ctx_, t);
    } catch (const CheckError& e) {
        res.diagnostics.push_back(e.diag);
        return std::nullopt;
    }
}

Session::EntryResult Session::handle_line(const std::string& line) {
    EntryResult res;
    ReplParseResult parsed = parse_repl_entry(line);
    if (!parsed.entry) {
        res.diagnostics = parsed.diagnostics;
        return res;
    }
    ReplEntry& entry = *parsed.entry;

    switch (entry.kind) {
        case ReplEntry::Kind::Decl: {
            if (st_.sigs.count(entry.decl.name)) {
                Diagnostic d;
                d.phase = Phase::Type;
                d.span = entry.decl.span;
                d.message = "operation '" + entry.decl.name + "' is already declared";
                res.diagnostics.push_back(d);
                return res;
            }
            OpSignature sig = entry.decl.sig;
            if (cfg_.effects_mode) {
                sig.dom = with_default_effects(sig.dom);
                sig.cod = with_default_effects(sig.cod);
            } else {
                try {
                    ensure_plain(sig.dom, entry.decl.span);
                    ensure_plain(sig.cod, entry.decl.span);
                } catch (const CheckError& e) {
                    res.diagnostics.push_back(e.diag);
                    return res;
                }
                if (cfg_.sr_enabled) {
                    SrVerdict v = check_sr(sig);
                    if (!v.pass) {
                        Diagnostic d;
                        d.phase = Phase::SignatureRestriction;
                        d.span = entry.decl.span;
                        d.message = "operation '" + entry.decl.name +
                                    "' violates the signature restriction";
                        d.detail = v.describe();
                        res.diagnostics.push_back(d);
                        return res;
                    }
                }
            }
            st_.sigs[entry.decl.name] = sig;
            res.ok = true;
            res.output.push_back(entry.decl.name + " : " + pretty(sig));
            return res;
        }
        case ReplEntry::Kind::Binding: {
            const TopBinding& b = entry.binding;
            Scheme scheme;
            Effect eff;
            try {
                if (cfg_.effects_mode) {
                    auto [s, e] = eff_->check_binding(ctx_, b.name, b.ann, b.term, b.span);
                    scheme = s;
                    eff = e;
                } else {
                    scheme = infer_binding(st_, ctx_, b.name, b.ann, b.term, b.span);
                }
            } catch (const CheckError& e) {
                res.diagnostics.push_back(e.diag);
                return res;
            }
            TermPtr closed = close_over_bindings(b.term);
            Outcome o = run(closed, cfg_.max_steps);
            if (!o.is_value()) {
                Diagnostic d;
                d.phase = Phase::Type;
                d.span = b.span;
                d.severity = Severity::Warning;
                d.message = "binding '" + b.name + "' did not evaluate to a value: " +
                            outcome_text(o);
                res.diagnostics.push_back(d);
                return res;
            }
            ctx_.push(b.name, scheme);
            values_.emplace_back(b.name, o.value);
            res.ok = true;
            std::string line_out = b.name + " : " + pretty_normalized(st_.sub.apply(scheme));
            if (cfg_.effects_mode) line_out += " | " + effect_to_string(eff);
            res.output.push_back(line_out);
            return res;
        }
        case ReplEntry::Kind::Expr:
            return eval_expr(entry.expr, cfg_.trace);
    }
    return res;
}

Session::EntryResult Session::eval_expr(const TermPtr& expr, bool with_trace) {
    EntryResult res;
    Effect eff;
    std::optional<Scheme> scheme = check_expr(expr, res, &eff);
    if (!scheme) return res;
    std::string type_line = pretty_normalized(st_.sub.apply(*scheme));
    if (cfg_.effects_mode) type_line += " | " + effect_to_string(eff);

    TermPtr closed = close_over_bindings(expr);
    std::vector<std::string> trace;
    Outcome o = run(closed, cfg_.max_steps, with_trace ? &trace : nullptr);
    for (const auto& t : trace) res.output.push_back(t);
    if (o.is_value())
        res.output.push_back("- : " + type_line + " = " + show_value(o.value));
    else
        res.output.push_back("- : " + type_line + " = " + outcome_text(o));
    res.ok = true;
    return res;
}

Session::EntryResult Session::type_of(const std::string& expr_src) {
    EntryResult res;
    ReplParseResult parsed = parse_repl_entry(expr_src);
    if (!parsed.entry) {
        res.diagnostics = parsed.diagnostics;
        return res;
    }
    if (parsed.entry->kind != ReplEntry::Kind::Expr) {
        Diagnostic d;
        d.phase = Phase::Parser;
        d.message = ":type expects an expression";
        res.diagnostics.push_back(d);
        return res;
    }
    Effect eff;
    std::optional<Scheme> scheme = check_expr(parsed.entry->expr, res, &eff);
    if (!scheme) return res;
    std::string line = pretty_normalized(st_.sub.apply(*scheme));
    if (cfg_.effects_mode) line += " | " + effect_to_string(eff);
    res.output.push_back(line);
    res.ok = true;
    return res;
}

Session::EntryResult Session::trace_of(const std::string& expr_src) {
    EntryResult res;
    ReplParseResult parsed = parse_repl_entry(expr_src);
    if (!parsed.entry) {
        res.diagnostics = parsed.diagnostics;
        return res;
    }
    if (parsed.entry->kind != ReplEntry::Kind::Expr) {
        Diagnostic d;
        d.phase = Phase::Parser;
        d.message = ":trace expects an expression";
        res.diagnostics.push_back(d);
        return res;
    }
    return eval_expr(parsed.entry->expr, true);
}

}  // namespace eff
