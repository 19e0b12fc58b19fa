#include "eff/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <stdexcept>

namespace eff {

// ---------------------------------------------------------------------------
// Type constructors
// ---------------------------------------------------------------------------

TypePtr ty_var(int id, bool rigid, std::string hint) {
    return std::make_shared<Type>(Type{TyVar{id, rigid, std::move(hint)}});
}

TypePtr ty_base(BaseType b) {
    static const TypePtr kBool = std::make_shared<Type>(Type{TyBase{BaseType::Bool}});
    static const TypePtr kInt = std::make_shared<Type>(Type{TyBase{BaseType::Int}});
    static const TypePtr kUnit = std::make_shared<Type>(Type{TyBase{BaseType::Unit}});
    static const TypePtr kStr = std::make_shared<Type>(Type{TyBase{BaseType::Str}});
    switch (b) {
        case BaseType::Bool: return kBool;
        case BaseType::Int: return kInt;
        case BaseType::Unit: return kUnit;
        case BaseType::Str: return kStr;
    }
    return kUnit;
}

TypePtr ty_bool() { return ty_base(BaseType::Bool); }
TypePtr ty_int() { return ty_base(BaseType::Int); }
TypePtr ty_unit() { return ty_base(BaseType::Unit); }
TypePtr ty_str() { return ty_base(BaseType::Str); }

TypePtr ty_arrow(TypePtr dom, TypePtr cod, std::optional<Effect> eff) {
    return std::make_shared<Type>(Type{TyArrow{std::move(dom), std::move(cod), std::move(eff)}});
}
TypePtr ty_prod(TypePtr l, TypePtr r) {
    return std::make_shared<Type>(Type{TyProd{std::move(l), std::move(r)}});
}
TypePtr ty_sum(TypePtr l, TypePtr r) {
    return std::make_shared<Type>(Type{TySum{std::move(l), std::move(r)}});
}
TypePtr ty_list(TypePtr elem) {
    return std::make_shared<Type>(Type{TyList{std::move(elem)}});
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

Constant Constant::of_int(long long v) {
    Constant c;
    c.tag = Tag::Int;
    c.int_val = v;
    return c;
}
Constant Constant::of_bool(bool v) {
    Constant c;
    c.tag = Tag::Bool;
    c.bool_val = v;
    return c;
}
Constant Constant::of_str(std::string v) {
    Constant c;
    c.tag = Tag::Str;
    c.str_val = std::move(v);
    return c;
}
Constant Constant::unit() {
    Constant c;
    c.tag = Tag::Unit;
    return c;
}
Constant Constant::prim_op(std::string name) {
    Constant c;
    c.tag = Tag::Prim;
    c.prim = std::move(name);
    return c;
}

bool Constant::operator==(const Constant& o) const {
    if (tag != o.tag) return false;
    switch (tag) {
        case Tag::Int: return int_val == o.int_val;
        case Tag::Bool: return bool_val == o.bool_val;
        case Tag::Str: return str_val == o.str_val;
        case Tag::Unit: return true;
        case Tag::Prim: return prim == o.prim && args == o.args;
    }
    return false;
}

namespace {

struct PrimInfo {
    std::string name;
    std::vector<BaseType> sig;    // sig[0..n-2] argument base types, sig[n-1] result
};

const std::vector<PrimInfo>& prim_table() {
    static const std::vector<PrimInfo> table = {
        {"+", {BaseType::Int, BaseType::Int, BaseType::Int}},
        {"-", {BaseType::Int, BaseType::Int, BaseType::Int}},
        {"*", {BaseType::Int, BaseType::Int, BaseType::Int}},
        {"mod", {BaseType::Int, BaseType::Int, BaseType::Int}},
        {"=", {BaseType::Int, BaseType::Int, BaseType::Bool}},
        {"<", {BaseType::Int, BaseType::Int, BaseType::Bool}},
        {"not", {BaseType::Bool, BaseType::Bool}},
        {"length", {BaseType::Str, BaseType::Int}},
        {"first", {BaseType::Str, BaseType::Str}},
        {"last", {BaseType::Str, BaseType::Str}},
    };
    return table;
}

const PrimInfo* find_prim(const std::string& name) {
    for (const auto& p : prim_table())
        if (p.name == name) return &p;
    return nullptr;
}

BaseType base_of_constant(const Constant& c) {
    switch (c.tag) {
        case Constant::Tag::Int: return BaseType::Int;
        case Constant::Tag::Bool: return BaseType::Bool;
        case Constant::Tag::Str: return BaseType::Str;
        case Constant::Tag::Unit: return BaseType::Unit;
        case Constant::Tag::Prim: break;
    }
    assert(false && "primitive constants have no base type");
    return BaseType::Unit;
}

std::optional<Constant> eval_prim(const std::string& name,
                                  const std::vector<Constant>& args) {
    if (name == "+") return Constant::of_int(args[0].int_val + args[1].int_val);
    if (name == "-") return Constant::of_int(args[0].int_val - args[1].int_val);
    if (name == "*") return Constant::of_int(args[0].int_val * args[1].int_val);
    if (name == "mod") {
        if (args[1].int_val == 0) return std::nullopt;   // undefined: Stuck
        return Constant::of_int(args[0].int_val % args[1].int_val);
    }
    if (name == "=") return Constant::of_bool(args[0].int_val == args[1].int_val);
    if (name == "<") return Constant::of_bool(args[0].int_val < args[1].int_val);
    if (name == "not") return Constant::of_bool(!args[0].bool_val);
    if (name == "length")
        return Constant::of_int(static_cast<long long>(args[0].str_val.size()));
    if (name == "first") {
        const std::string& s = args[0].str_val;
        return Constant::of_str(s.empty() ? std::string() : s.substr(0, 1));
    }
    if (name == "last") {
        const std::string& s = args[0].str_val;
        return Constant::of_str(s.empty() ? std::string() : s.substr(1));
    }
    return std::nullopt;
}

}  // namespace

TypePtr const_type(const Constant& c, bool effect_mode) {
    std::optional<Effect> latent;
    if (effect_mode) latent = Effect{};
    switch (c.tag) {
        case Constant::Tag::Int: return ty_int();
        case Constant::Tag::Bool: return ty_bool();
        case Constant::Tag::Str: return ty_str();
        case Constant::Tag::Unit: return ty_unit();
        case Constant::Tag::Prim: {
            const PrimInfo* info = find_prim(c.prim);
            if (!info) return nullptr;
            std::size_t consumed = c.args.size();
            assert(consumed < info->sig.size());
            TypePtr t = ty_base(info->sig.back());
            for (std::size_t i = info->sig.size() - 1; i-- > consumed;)
                t = ty_arrow(ty_base(info->sig[i]), t, latent);
            return t;
        }
    }
    return nullptr;
}

std::optional<Constant> zeta(const Constant& fn, const Constant& arg) {
    if (fn.tag != Constant::Tag::Prim) return std::nullopt;
    if (arg.tag == Constant::Tag::Prim) return std::nullopt;   // ty(arg) not a base
    const PrimInfo* info = find_prim(fn.prim);
    if (!info) return std::nullopt;
    std::size_t arity = info->sig.size() - 1;
    std::size_t consumed = fn.args.size();
    if (consumed >= arity) return std::nullopt;
    if (info->sig[consumed] != base_of_constant(arg)) return std::nullopt;
    if (consumed + 1 == arity) {
        std::vector<Constant> args = fn.args;
        args.push_back(arg);
        return eval_prim(fn.prim, args);
    }
    Constant partial = fn;
    partial.args.push_back(arg);
    return partial;
}

std::optional<Constant> lookup_prim(const std::string& name) {
    if (find_prim(name)) return Constant::prim_op(name);
    return std::nullopt;
}

const std::vector<std::string>& prim_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> ns;
        for (const auto& p : prim_table()) ns.push_back(p.name);
        return ns;
    }();
    return names;
}

std::string show_constant(const Constant& c) {
    switch (c.tag) {
        case Constant::Tag::Int: return std::to_string(c.int_val);
        case Constant::Tag::Bool: return c.bool_val ? "true" : "false";
        case Constant::Tag::Unit: return "()";
        case Constant::Tag::Str: {
            std::string out = "\"";
            for (char ch : c.str_val) {
                if (ch == '"' || ch == '\\') out += '\\';
                if (ch == '\n') {
                    out += "\\n";
                    continue;
                }
                out += ch;
            }
            out += '"';
            return out;
        }
        case Constant::Tag::Prim: {
            if (c.args.empty()) return c.prim;
            std::string out = "(" + c.prim;
            for (const auto& a : c.args) out += " " + show_constant(a);
            out += ")";
            return out;
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Term constructors
// ---------------------------------------------------------------------------

const OpClause* Handler::find(const std::string& op) const {
    for (const auto& cl : op_clauses)
        if (cl.op == op) return &cl;
    return nullptr;
}

HandlerPtr mk_handler(std::string ret_binder, TermPtr ret_body,
                      std::vector<OpClause> clauses) {
    Handler h;
    h.return_binder = std::move(ret_binder);
    h.return_body = std::move(ret_body);
    h.op_clauses = std::move(clauses);
    return std::make_shared<Handler>(std::move(h));
}

namespace {
template <typename Node>
TermPtr node(Node n, Span sp) {
    return std::make_shared<Term>(Term{std::move(n), sp});
}
}  // namespace

TermPtr mk_var(std::string name, Span sp) { return node(TVar{std::move(name)}, sp); }
TermPtr mk_const(Constant c, Span sp) { return node(TConst{std::move(c)}, sp); }
TermPtr mk_int(long long v, Span sp) { return mk_const(Constant::of_int(v), sp); }
TermPtr mk_bool(bool v, Span sp) { return mk_const(Constant::of_bool(v), sp); }
TermPtr mk_str(std::string v, Span sp) { return mk_const(Constant::of_str(std::move(v)), sp); }
TermPtr mk_unit(Span sp) { return mk_const(Constant::unit(), sp); }
TermPtr mk_abs(std::string binder, TermPtr body, Span sp, std::optional<TypePtr> ann) {
    return node(TAbs{std::move(binder), std::move(ann), std::move(body)}, sp);
}
TermPtr mk_app(TermPtr fn, TermPtr arg, Span sp) {
    return node(TApp{std::move(fn), std::move(arg)}, sp);
}
TermPtr mk_opcall(std::string op, TermPtr arg, Span sp) {
    return node(TOpCall{std::move(op), std::move(arg)}, sp);
}
TermPtr mk_handle(TermPtr body, HandlerPtr h, Span sp) {
    return node(THandle{std::move(body), std::move(h)}, sp);
}
TermPtr mk_let(std::string binder, TermPtr bound, TermPtr body, Span sp,
               std::optional<Scheme> ann) {
    return node(TLet{std::move(binder), std::move(ann), std::move(bound), std::move(body)}, sp);
}
TermPtr mk_pair(TermPtr l, TermPtr r, Span sp) {
    return node(TPair{std::move(l), std::move(r)}, sp);
}
TermPtr mk_proj(int index, TermPtr pair, Span sp) {
    return node(TProj{index, std::move(pair)}, sp);
}
TermPtr mk_inl(TermPtr v, Span sp) { return node(TInl{std::move(v)}, sp); }
TermPtr mk_inr(TermPtr v, Span sp) { return node(TInr{std::move(v)}, sp); }
TermPtr mk_case_sum(TermPtr scrut, std::string lb, TermPtr lbody, std::string rb,
                    TermPtr rbody, Span sp) {
    return node(TCaseSum{std::move(scrut), std::move(lb), std::move(lbody),
                         std::move(rb), std::move(rbody)},
                sp);
}
TermPtr mk_nil(Span sp) { return node(TNil{}, sp); }
TermPtr mk_cons(TermPtr pair, Span sp) { return node(TCons{std::move(pair)}, sp); }
TermPtr mk_case_list(TermPtr scrut, TermPtr nil_body, std::string cons_binder,
                     TermPtr cons_body, Span sp) {
    return node(TCaseList{std::move(scrut), std::move(nil_body),
                          std::move(cons_binder), std::move(cons_body)},
                sp);
}
TermPtr mk_fix(std::string f, std::string x, TermPtr body, Span sp) {
    return node(TFix{std::move(f), std::move(x), std::move(body)}, sp);
}
TermPtr mk_if(TermPtr c, TermPtr t, TermPtr e, Span sp) {
    return node(TIf{std::move(c), std::move(t), std::move(e)}, sp);
}

TermPtr mk_int_list(const std::vector<long long>& xs) {
    TermPtr t = mk_nil();
    for (auto it = xs.rbegin(); it != xs.rend(); ++it)
        t = mk_cons(mk_pair(mk_int(*it), t));
    return t;
}

// ---------------------------------------------------------------------------
// Free type variables and type substitution
// ---------------------------------------------------------------------------

namespace {
void ftv_into(const TypePtr& t, std::set<int>& out) {
    if (!t) return;
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyVar>) {
                out.insert(n.id);
            } else if constexpr (std::is_same_v<N, TyArrow>) {
                ftv_into(n.dom, out);
                ftv_into(n.cod, out);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                ftv_into(n.left, out);
                ftv_into(n.right, out);
            } else if constexpr (std::is_same_v<N, TyList>) {
                ftv_into(n.elem, out);
            }
        },
        t->node);
}
}  // namespace

std::set<int> ftv(const TypePtr& t) {
    std::set<int> out;
    ftv_into(t, out);
    return out;
}

std::set<int> ftv(const Scheme& s) {
    std::set<int> out = ftv(s.body);
    for (int q : s.quantified) out.erase(q);
    return out;
}

std::set<int> ftv(const OpSignature& sig) {
    std::set<int> out = ftv(sig.dom);
    ftv_into(sig.cod, out);
    for (int q : sig.quantified) out.erase(q);
    return out;
}

TypePtr subst_type(const TypePtr& t, const TypeSubstMap& s) {
    if (!t || s.empty()) return t;
    return std::visit(
        [&](const auto& n) -> TypePtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyVar>) {
                auto it = s.find(n.id);
                return it == s.end() ? t : it->second;
            } else if constexpr (std::is_same_v<N, TyBase>) {
                return t;
            } else if constexpr (std::is_same_v<N, TyArrow>) {
                TypePtr d = subst_type(n.dom, s), c = subst_type(n.cod, s);
                if (d == n.dom && c == n.cod) return t;
                return ty_arrow(d, c, n.eff);
            } else if constexpr (std::is_same_v<N, TyProd>) {
                TypePtr l = subst_type(n.left, s), r = subst_type(n.right, s);
                if (l == n.left && r == n.right) return t;
                return ty_prod(l, r);
            } else if constexpr (std::is_same_v<N, TySum>) {
                TypePtr l = subst_type(n.left, s), r = subst_type(n.right, s);
                if (l == n.left && r == n.right) return t;
                return ty_sum(l, r);
            } else {
                TypePtr e = subst_type(n.elem, s);
                if (e == n.elem) return t;
                return ty_list(e);
            }
        },
        t->node);
}

// ---------------------------------------------------------------------------
// Free term variables
// ---------------------------------------------------------------------------

namespace {
void fv_into(const TermPtr& t, std::set<std::string>& out);

void fv_handler(const Handler& h, std::set<std::string>& out) {
    std::set<std::string> sub;
    fv_into(h.return_body, sub);
    sub.erase(h.return_binder);
    out.insert(sub.begin(), sub.end());
    for (const auto& cl : h.op_clauses) {
        std::set<std::string> cs;
        fv_into(cl.body, cs);
        cs.erase(cl.arg_binder);
        cs.erase(cl.cont_binder);
        out.insert(cs.begin(), cs.end());
    }
}

void fv_into(const TermPtr& t, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TVar>) {
                out.insert(n.name);
            } else if constexpr (std::is_same_v<N, TConst> || std::is_same_v<N, TNil>) {
            } else if constexpr (std::is_same_v<N, TAbs>) {
                std::set<std::string> sub;
                fv_into(n.body, sub);
                sub.erase(n.binder);
                out.insert(sub.begin(), sub.end());
            } else if constexpr (std::is_same_v<N, TApp>) {
                fv_into(n.fn, out);
                fv_into(n.arg, out);
            } else if constexpr (std::is_same_v<N, TOpCall>) {
                fv_into(n.arg, out);
            } else if constexpr (std::is_same_v<N, THandle>) {
                fv_into(n.body, out);
                fv_handler(*n.handler, out);
            } else if constexpr (std::is_same_v<N, TLet>) {
                fv_into(n.bound, out);
                std::set<std::string> sub;
                fv_into(n.body, sub);
                sub.erase(n.binder);
                out.insert(sub.begin(), sub.end());
            } else if constexpr (std::is_same_v<N, TPair>) {
                fv_into(n.left, out);
                fv_into(n.right, out);
            } else if constexpr (std::is_same_v<N, TProj>) {
                fv_into(n.pair, out);
            } else if constexpr (std::is_same_v<N, TInl> || std::is_same_v<N, TInr>) {
                fv_into(n.value, out);
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                fv_into(n.scrutinee, out);
                std::set<std::string> ls, rs;
                fv_into(n.left_body, ls);
                ls.erase(n.left_binder);
                fv_into(n.right_body, rs);
                rs.erase(n.right_binder);
                out.insert(ls.begin(), ls.end());
                out.insert(rs.begin(), rs.end());
            } else if constexpr (std::is_same_v<N, TCons>) {
                fv_into(n.pair, out);
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                fv_into(n.scrutinee, out);
                fv_into(n.nil_body, out);
                std::set<std::string> cs;
                fv_into(n.cons_body, cs);
                cs.erase(n.cons_binder);
                out.insert(cs.begin(), cs.end());
            } else if constexpr (std::is_same_v<N, TFix>) {
                std::set<std::string> sub;
                fv_into(n.body, sub);
                sub.erase(n.fn_binder);
                sub.erase(n.arg_binder);
                out.insert(sub.begin(), sub.end());
            } else if constexpr (std::is_same_v<N, TIf>) {
                fv_into(n.cond, out);
                fv_into(n.then_branch, out);
                fv_into(n.else_branch, out);
            }
        },
        t->node);
}
}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
    std::set<std::string> out;
    fv_into(t, out);
    return out;
}

// ---------------------------------------------------------------------------
// Capture-avoiding substitution
// ---------------------------------------------------------------------------

namespace {

std::string fresh_avoiding(const std::string& base, const std::set<std::string>& avoid) {
    std::string stem = base;
    while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back())))
        stem.pop_back();
    if (stem.empty()) stem = "v";
    for (int i = 1;; ++i) {
        std::string cand = stem + std::to_string(i);
        if (!avoid.count(cand)) return cand;
    }
}

struct Subst {
    const std::string& name;
    const TermPtr& repl;
    const std::set<std::string>& fv_repl;

    TermPtr go(const TermPtr& t) const;

    // Substitute under one binder, renaming it if it would capture.
    std::pair<std::string, TermPtr> under_binder(const std::string& binder,
                                                 const TermPtr& body) const {
        if (binder == name) return {binder, body};
        if (fv_repl.count(binder) && free_vars(body).count(name)) {
            std::set<std::string> avoid = fv_repl;
            auto bfv = free_vars(body);
            avoid.insert(bfv.begin(), bfv.end());
            avoid.insert(name);
            std::string fresh = fresh_avoiding(binder, avoid);
            TermPtr renamed = subst_term(body, binder, mk_var(fresh));
            return {fresh, go(renamed)};
        }
        return {binder, go(body)};
    }

    // Two binders scoping over the same body (fix, operation clauses).
    std::tuple<std::string, std::string, TermPtr> under_binder2(
        const std::string& b1, const std::string& b2, const TermPtr& body) const {
        if (b1 == name || b2 == name) return {b1, b2, body};
        std::string n1 = b1, n2 = b2;
        TermPtr cur = body;
        if (fv_repl.count(n1) && free_vars(cur).count(name)) {
            std::set<std::string> avoid = fv_repl;
            auto bfv = free_vars(cur);
            avoid.insert(bfv.begin(), bfv.end());
            avoid.insert(name);
            avoid.insert(n2);
            n1 = fresh_avoiding(b1, avoid);
            cur = subst_term(cur, b1, mk_var(n1));
        }
        if (fv_repl.count(n2) && free_vars(cur).count(name)) {
            std::set<std::string> avoid = fv_repl;
            auto bfv = free_vars(cur);
            avoid.insert(bfv.begin(), bfv.end());
            avoid.insert(name);
            avoid.insert(n1);
            n2 = fresh_avoiding(b2, avoid);
            cur = subst_term(cur, b2, mk_var(n2));
        }
        return {n1, n2, go(cur)};
    }
};

TermPtr Subst::go(const TermPtr& t) const {
    return std::visit(
        [&](const auto& n) -> TermPtr {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TVar>) {
                return n.name == name ? repl : t;
            } else if constexpr (std::is_same_v<N, TConst> || std::is_same_v<N, TNil>) {
                return t;
            } else if constexpr (std::is_same_v<N, TAbs>) {
                auto [b, body] = under_binder(n.binder, n.body);
                return mk_abs(b, body, t->span, n.binder_ann);
            } else if constexpr (std::is_same_v<N, TApp>) {
                return mk_app(go(n.fn), go(n.arg), t->span);
            } else if constexpr (std::is_same_v<N, TOpCall>) {
                return mk_opcall(n.op, go(n.arg), t->span);
            } else if constexpr (std::is_same_v<N, THandle>) {
                Handler h;
                auto [rb, rbody] = under_binder(n.handler->return_binder,
                                                n.handler->return_body);
                h.return_binder = rb;
                h.return_body = rbody;
                for (const auto& cl : n.handler->op_clauses) {
                    auto [a, k, body] = under_binder2(cl.arg_binder, cl.cont_binder, cl.body);
                    h.op_clauses.push_back(OpClause{cl.op, a, k, body});
                }
                return mk_handle(go(n.body), std::make_shared<Handler>(std::move(h)),
                                 t->span);
            } else if constexpr (std::is_same_v<N, TLet>) {
                auto [b, body] = under_binder(n.binder, n.body);
                return mk_let(b, go(n.bound), body, t->span, n.ann);
            } else if constexpr (std::is_same_v<N, TPair>) {
                return mk_pair(go(n.left), go(n.right), t->span);
            } else if constexpr (std::is_same_v<N, TProj>) {
                return mk_proj(n.index, go(n.pair), t->span);
            } else if constexpr (std::is_same_v<N, TInl>) {
                return mk_inl(go(n.value), t->span);
            } else if constexpr (std::is_same_v<N, TInr>) {
                return mk_inr(go(n.value), t->span);
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                auto [lb, lbody] = under_binder(n.left_binder, n.left_body);
                auto [rb, rbody] = under_binder(n.right_binder, n.right_body);
                return mk_case_sum(go(n.scrutinee), lb, lbody, rb, rbody, t->span);
            } else if constexpr (std::is_same_v<N, TCons>) {
                return mk_cons(go(n.pair), t->span);
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                auto [cb, cbody] = under_binder(n.cons_binder, n.cons_body);
                return mk_case_list(go(n.scrutinee), go(n.nil_body), cb, cbody, t->span);
            } else if constexpr (std::is_same_v<N, TFix>) {
                auto [f, x, body] = under_binder2(n.fn_binder, n.arg_binder, n.body);
                return mk_fix(f, x, body, t->span);
            } else {
                static_assert(std::is_same_v<N, TIf>);
                return mk_if(go(n.cond), go(n.then_branch), go(n.else_branch), t->span);
            }
        },
        t->node);
}

}  // namespace

TermPtr subst_term(const TermPtr& t, const std::string& name, const TermPtr& replacement) {
    std::set<std::string> fvr = free_vars(replacement);
    Subst s{name, replacement, fvr};
    return s.go(t);
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

bool is_value(const TermPtr& t) {
    return std::visit(
        [&](const auto& n) -> bool {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TConst> || std::is_same_v<N, TAbs> ||
                          std::is_same_v<N, TNil>) {
                return true;
            } else if constexpr (std::is_same_v<N, TPair>) {
                return is_value(n.left) && is_value(n.right);
            } else if constexpr (std::is_same_v<N, TInl> || std::is_same_v<N, TInr>) {
                return is_value(n.value);
            } else if constexpr (std::is_same_v<N, TCons>) {
                return is_value(n.pair);
            } else {
                return false;
            }
        },
        t->node);
}

// ---------------------------------------------------------------------------
// Alpha equivalence
// ---------------------------------------------------------------------------

namespace {

struct AlphaEnv {
    std::map<std::string, int> left, right;
    int next = 0;

    AlphaEnv bind(const std::string& a, const std::string& b) const {
        AlphaEnv e = *this;
        e.left[a] = e.right[b] = e.next;
        ++e.next;
        return e;
    }

    bool var_eq(const std::string& a, const std::string& b) const {
        auto la = left.find(a);
        auto rb = right.find(b);
        if (la != left.end() || rb != right.end())
            return la != left.end() && rb != right.end() && la->second == rb->second;
        return a == b;   // both free
    }
};

bool aeq(const TermPtr& a, const TermPtr& b, const AlphaEnv& env);

bool aeq_handler(const Handler& a, const Handler& b, const AlphaEnv& env) {
    if (a.op_clauses.size() != b.op_clauses.size()) return false;
    if (!aeq(a.return_body, b.return_body, env.bind(a.return_binder, b.return_binder)))
        return false;
    for (std::size_t i = 0; i < a.op_clauses.size(); ++i) {
        const auto& ca = a.op_clauses[i];
        const auto& cb = b.op_clauses[i];
        if (ca.op != cb.op) return false;
        AlphaEnv e = env.bind(ca.arg_binder, cb.arg_binder)
                         .bind(ca.cont_binder, cb.cont_binder);
        if (!aeq(ca.body, cb.body, e)) return false;
    }
    return true;
}

bool aeq(const TermPtr& a, const TermPtr& b, const AlphaEnv& env) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using N = std::decay_t<decltype(na)>;
            const auto& nb = std::get<N>(b->node);
            if constexpr (std::is_same_v<N, TVar>) {
                return env.var_eq(na.name, nb.name);
            } else if constexpr (std::is_same_v<N, TConst>) {
                return na.c == nb.c;
            } else if constexpr (std::is_same_v<N, TNil>) {
                return true;
            } else if constexpr (std::is_same_v<N, TAbs>) {
                return aeq(na.body, nb.body, env.bind(na.binder, nb.binder));
            } else if constexpr (std::is_same_v<N, TApp>) {
                return aeq(na.fn, nb.fn, env) && aeq(na.arg, nb.arg, env);
            } else if constexpr (std::is_same_v<N, TOpCall>) {
                return na.op == nb.op && aeq(na.arg, nb.arg, env);
            } else if constexpr (std::is_same_v<N, THandle>) {
                return aeq(na.body, nb.body, env) &&
                       aeq_handler(*na.handler, *nb.handler, env);
            } else if constexpr (std::is_same_v<N, TLet>) {
                return aeq(na.bound, nb.bound, env) &&
                       aeq(na.body, nb.body, env.bind(na.binder, nb.binder));
            } else if constexpr (std::is_same_v<N, TPair>) {
                return aeq(na.left, nb.left, env) && aeq(na.right, nb.right, env);
            } else if constexpr (std::is_same_v<N, TProj>) {
                return na.index == nb.index && aeq(na.pair, nb.pair, env);
            } else if constexpr (std::is_same_v<N, TInl> || std::is_same_v<N, TInr>) {
                return aeq(na.value, nb.value, env);
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                return aeq(na.scrutinee, nb.scrutinee, env) &&
                       aeq(na.left_body, nb.left_body,
                           env.bind(na.left_binder, nb.left_binder)) &&
                       aeq(na.right_body, nb.right_body,
                           env.bind(na.right_binder, nb.right_binder));
            } else if constexpr (std::is_same_v<N, TCons>) {
                return aeq(na.pair, nb.pair, env);
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                return aeq(na.scrutinee, nb.scrutinee, env) &&
                       aeq(na.nil_body, nb.nil_body, env) &&
                       aeq(na.cons_body, nb.cons_body,
                           env.bind(na.cons_binder, nb.cons_binder));
            } else if constexpr (std::is_same_v<N, TFix>) {
                AlphaEnv e = env.bind(na.fn_binder, nb.fn_binder)
                                 .bind(na.arg_binder, nb.arg_binder);
                return aeq(na.body, nb.body, e);
            } else {
                static_assert(std::is_same_v<N, TIf>);
                return aeq(na.cond, nb.cond, env) &&
                       aeq(na.then_branch, nb.then_branch, env) &&
                       aeq(na.else_branch, nb.else_branch, env);
            }
        },
        a->node);
}

bool teq(const TypePtr& a, const TypePtr& b, const std::map<int, int>* var_map) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using N = std::decay_t<decltype(na)>;
            const auto& nb = std::get<N>(b->node);
            if constexpr (std::is_same_v<N, TyVar>) {
                if (var_map) {
                    auto it = var_map->find(na.id);
                    if (it != var_map->end()) return it->second == nb.id;
                }
                return na.id == nb.id;
            } else if constexpr (std::is_same_v<N, TyBase>) {
                return na.base == nb.base;
            } else if constexpr (std::is_same_v<N, TyArrow>) {
                return na.eff == nb.eff && teq(na.dom, nb.dom, var_map) &&
                       teq(na.cod, nb.cod, var_map);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                return teq(na.left, nb.left, var_map) && teq(na.right, nb.right, var_map);
            } else {
                return teq(na.elem, nb.elem, var_map);
            }
        },
        a->node);
}

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) { return aeq(a, b, AlphaEnv{}); }

bool alpha_eq(const TypePtr& a, const TypePtr& b) { return teq(a, b, nullptr); }

bool alpha_eq(const Scheme& a, const Scheme& b) {
    if (a.quantified.size() != b.quantified.size()) return false;
    std::map<int, int> m;
    for (std::size_t i = 0; i < a.quantified.size(); ++i)
        m[a.quantified[i]] = b.quantified[i];
    return teq(a.body, b.body, &m);
}

bool type_eq(const TypePtr& a, const TypePtr& b) { return teq(a, b, nullptr); }

bool term_eq(const TermPtr& a, const TermPtr& b) {
    // Syntactic equality: alpha with no free renaming is exactly aeq with
    // equal binder names required; simplest is to compare pretty-independent
    // structure directly.
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using N = std::decay_t<decltype(na)>;
            const auto& nb = std::get<N>(b->node);
            if constexpr (std::is_same_v<N, TVar>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<N, TConst>) {
                return na.c == nb.c;
            } else if constexpr (std::is_same_v<N, TNil>) {
                return true;
            } else if constexpr (std::is_same_v<N, TAbs>) {
                return na.binder == nb.binder && term_eq(na.body, nb.body);
            } else if constexpr (std::is_same_v<N, TApp>) {
                return term_eq(na.fn, nb.fn) && term_eq(na.arg, nb.arg);
            } else if constexpr (std::is_same_v<N, TOpCall>) {
                return na.op == nb.op && term_eq(na.arg, nb.arg);
            } else if constexpr (std::is_same_v<N, THandle>) {
                if (!term_eq(na.body, nb.body)) return false;
                const Handler& ha = *na.handler;
                const Handler& hb = *nb.handler;
                if (ha.return_binder != hb.return_binder ||
                    !term_eq(ha.return_body, hb.return_body) ||
                    ha.op_clauses.size() != hb.op_clauses.size())
                    return false;
                for (std::size_t i = 0; i < ha.op_clauses.size(); ++i) {
                    const auto& ca = ha.op_clauses[i];
                    const auto& cb = hb.op_clauses[i];
                    if (ca.op != cb.op || ca.arg_binder != cb.arg_binder ||
                        ca.cont_binder != cb.cont_binder || !term_eq(ca.body, cb.body))
                        return false;
                }
                return true;
            } else if constexpr (std::is_same_v<N, TLet>) {
                return na.binder == nb.binder && term_eq(na.bound, nb.bound) &&
                       term_eq(na.body, nb.body);
            } else if constexpr (std::is_same_v<N, TPair>) {
                return term_eq(na.left, nb.left) && term_eq(na.right, nb.right);
            } else if constexpr (std::is_same_v<N, TProj>) {
                return na.index == nb.index && term_eq(na.pair, nb.pair);
            } else if constexpr (std::is_same_v<N, TInl> || std::is_same_v<N, TInr>) {
                return term_eq(na.value, nb.value);
            } else if constexpr (std::is_same_v<N, TCaseSum>) {
                return na.left_binder == nb.left_binder &&
                       na.right_binder == nb.right_binder &&
                       term_eq(na.scrutinee, nb.scrutinee) &&
                       term_eq(na.left_body, nb.left_body) &&
                       term_eq(na.right_body, nb.right_body);
            } else if constexpr (std::is_same_v<N, TCons>) {
                return term_eq(na.pair, nb.pair);
            } else if constexpr (std::is_same_v<N, TCaseList>) {
                return na.cons_binder == nb.cons_binder &&
                       term_eq(na.scrutinee, nb.scrutinee) &&
                       term_eq(na.nil_body, nb.nil_body) &&
                       term_eq(na.cons_body, nb.cons_body);
            } else if constexpr (std::is_same_v<N, TFix>) {
                return na.fn_binder == nb.fn_binder && na.arg_binder == nb.arg_binder &&
                       term_eq(na.body, nb.body);
            } else {
                static_assert(std::is_same_v<N, TIf>);
                return term_eq(na.cond, nb.cond) &&
                       term_eq(na.then_branch, nb.then_branch) &&
                       term_eq(na.else_branch, nb.else_branch);
            }
        },
        a->node);
}

}  // namespace eff
