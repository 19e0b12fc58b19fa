#include "eff/pretty.hpp"

#include <map>
#include <sstream>

#include "eff/diagnostics.hpp"

namespace eff {

namespace {

// Levels: 0 any form, 1 comparison, 2 additive, 3 multiplicative,
// 4 application, 5 atom. Right-open forms (fun, let, if, case, handle, fix)
// parenthesize at level >= 1.

struct TypePrinter {
    const std::map<int, std::string>* rename = nullptr;

    std::string var_name(const TyVar& v) const {
        if (rename) {
            auto it = rename->find(v.id);
            if (it != rename->end()) return it->second;
        }
        if (!v.hint.empty()) return v.hint;
        return (v.rigid ? "r" : "t") + std::to_string(v.id);
    }

    // levels: 0 arrow, 1 sum, 2 prod, 3 postfix/atom
    std::string go(const TypePtr& t, int level) const {
        return std::visit(
            [&](const auto& n) -> std::string {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, TyVar>) {
                    return var_name(n);
                } else if constexpr (std::is_same_v<N, TyBase>) {
                    switch (n.base) {
                        case BaseType::Bool: return "bool";
                        case BaseType::Int: return "int";
                        case BaseType::Unit: return "unit";
                        case BaseType::Str: return "str";
                    }
                    return "?";
                } else if constexpr (std::is_same_v<N, TyArrow>) {
                    std::string arrow = "->";
                    if (n.eff && !n.eff->empty()) {
                        arrow = "-{";
                        bool fst = true;
                        for (const auto& op : *n.eff) {
                            if (!fst) arrow += ",";
                            arrow += op;
                            fst = false;
                        }
                        arrow += "}->";
                    }
                    std::string s = go(n.dom, 1) + " " + arrow + " " + go(n.cod, 0);
                    return level > 0 ? "(" + s + ")" : s;
                } else if constexpr (std::is_same_v<N, TySum>) {
                    std::string s = go(n.left, 1) + " + " + go(n.right, 2);
                    return level > 1 ? "(" + s + ")" : s;
                } else if constexpr (std::is_same_v<N, TyProd>) {
                    std::string s = go(n.left, 2) + " * " + go(n.right, 3);
                    return level > 2 ? "(" + s + ")" : s;
                } else {
                    return go(n.elem, 3) + " list";
                }
            },
            t->node);
    }
};

void collect_vars_in_order(const TypePtr& t, std::vector<int>& order,
                           std::set<int>& seen) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyVar>) {
                if (seen.insert(n.id).second) order.push_back(n.id);
            } else if constexpr (std::is_same_v<N, TyArrow>) {
                collect_vars_in_order(n.dom, order, seen);
                collect_vars_in_order(n.cod, order, seen);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                collect_vars_in_order(n.left, order, seen);
                collect_vars_in_order(n.right, order, seen);
            } else if constexpr (std::is_same_v<N, TyList>) {
                collect_vars_in_order(n.elem, order, seen);
            }
        },
        t->node);
}

std::string nth_name(std::size_t i) {
    std::string s(1, static_cast<char>('a' + i % 26));
    if (i >= 26) s += std::to_string(i / 26);
    return s;
}

bool right_open(const TermPtr& t) {
    return std::holds_alternative<TAbs>(t->node) || std::holds_alternative<TLet>(t->node) ||
           std::holds_alternative<TIf>(t->node) || std::holds_alternative<TCaseSum>(t->node) ||
           std::holds_alternative<TCaseList>(t->node) ||
           std::holds_alternative<THandle>(t->node) || std::holds_alternative<TFix>(t->node);
}

bool is_infix_prim(const Constant& c, int& level) {
    if (c.tag != Constant::Tag::Prim || !c.args.empty()) return false;
    if (c.prim == "=" || c.prim == "<") {
        level = 1;
        return true;
    }
    if (c.prim == "+" || c.prim == "-") {
        level = 2;
        return true;
    }
    if (c.prim == "*" || c.prim == "mod") {
        level = 3;
        return true;
    }
    return false;
}

struct TermPrinter {
    std::string go(const TermPtr& t, int level) const {
        if (right_open(t)) {
            std::string s = open_form(t);
            return level >= 1 ? "(" + s + ")" : s;
        }
        return std::visit(
            [&](const auto& n) -> std::string {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, TVar>) {
                    return n.name;
                } else if constexpr (std::is_same_v<N, TConst>) {
                    return show_constant(n.c);
                } else if constexpr (std::is_same_v<N, TNil>) {
                    return "nil";
                } else if constexpr (std::is_same_v<N, TApp>) {
                    // infix primitive applications print as operators
                    if (const auto* inner = std::get_if<TApp>(&n.fn->node)) {
                        if (const auto* cst = std::get_if<TConst>(&inner->fn->node)) {
                            int op_level = 0;
                            if (is_infix_prim(cst->c, op_level)) {
                                int lhs = op_level == 1 ? op_level + 1 : op_level;
                                std::string s = go(inner->arg, lhs) + " " + cst->c.prim +
                                                " " + go(n.arg, op_level + 1);
                                return level > op_level ? "(" + s + ")" : s;
                            }
                        }
                    }
                    std::string s = go(n.fn, 4) + " " + go(n.arg, 5);
                    return level > 4 ? "(" + s + ")" : s;
                } else if constexpr (std::is_same_v<N, TOpCall>) {
                    return "#" + n.op + "(" + go(n.arg, 0) + ")";
                } else if constexpr (std::is_same_v<N, TPair>) {
                    return "(" + go(n.left, 0) + ", " + go(n.right, 0) + ")";
                } else if constexpr (std::is_same_v<N, TProj>) {
                    std::string s = (n.index == 1 ? "fst " : "snd ") + go(n.pair, 5);
                    return level > 4 ? "(" + s + ")" : s;
                } else if constexpr (std::is_same_v<N, TInl>) {
                    std::string s = "inl " + go(n.value, 5);
                    return level > 4 ? "(" + s + ")" : s;
                } else if constexpr (std::is_same_v<N, TInr>) {
                    std::string s = "inr " + go(n.value, 5);
                    return level > 4 ? "(" + s + ")" : s;
                } else if constexpr (std::is_same_v<N, TCons>) {
                    std::string s = "cons " + go(n.pair, 5);
                    return level > 4 ? "(" + s + ")" : s;
                } else {
                    return "?";
                }
            },
            t->node);
    }

    std::string open_form(const TermPtr& t) const {
        return std::visit(
            [&](const auto& n) -> std::string {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, TAbs>) {
                    std::string param = n.binder;
                    if (n.binder_ann)
                        param = "(" + n.binder + " : " + pretty(*n.binder_ann) + ")";
                    return "fun " + param + " -> " + go(n.body, 0);
                } else if constexpr (std::is_same_v<N, TLet>) {
                    std::string ann;
                    if (n.ann) ann = " : " + pretty(*n.ann);
                    return "let " + n.binder + ann + " = " + go(n.bound, 1) + " in " +
                           go(n.body, 0);
                } else if constexpr (std::is_same_v<N, TIf>) {
                    return "if " + go(n.cond, 1) + " then " + go(n.then_branch, 1) +
                           " else " + go(n.else_branch, 0);
                } else if constexpr (std::is_same_v<N, TCaseSum>) {
                    return "case " + go(n.scrutinee, 1) + " of inl " + n.left_binder +
                           " -> " + go(n.left_body, 1) + " | inr " + n.right_binder +
                           " -> " + go(n.right_body, 0);
                } else if constexpr (std::is_same_v<N, TCaseList>) {
                    return "case " + go(n.scrutinee, 1) + " of nil -> " +
                           go(n.nil_body, 1) + " | cons " + n.cons_binder + " -> " +
                           go(n.cons_body, 0);
                } else if constexpr (std::is_same_v<N, THandle>) {
                    std::string s = "handle " + go(n.body, 1) + " with return " +
                                    n.handler->return_binder + " -> ";
                    bool last = n.handler->op_clauses.empty();
                    s += go(n.handler->return_body, last ? 0 : 1);
                    for (std::size_t i = 0; i < n.handler->op_clauses.size(); ++i) {
                        const auto& cl = n.handler->op_clauses[i];
                        bool lastc = i + 1 == n.handler->op_clauses.size();
                        s += " | " + cl.op + "(" + cl.arg_binder + ", " + cl.cont_binder +
                             ") -> " + go(cl.body, lastc ? 0 : 1);
                    }
                    return s;
                } else {
                    const auto& n2 = std::get<TFix>(t->node);
                    return "fix " + n2.fn_binder + " " + n2.arg_binder + " -> " +
                           go(n2.body, 0);
                }
            },
            t->node);
    }
};

}  // namespace

std::string pretty(const TermPtr& t) { return TermPrinter{}.go(t, 0); }

std::string pretty(const TypePtr& t) { return TypePrinter{}.go(t, 0); }

std::string pretty(const Scheme& s) { return pretty_normalized(s); }

std::string pretty_normalized(const Scheme& s) {
    std::map<int, std::string> names;
    std::size_t next = 0;
    for (int id : s.quantified) names[id] = nth_name(next++);
    std::vector<int> order;
    std::set<int> seen;
    collect_vars_in_order(s.body, order, seen);
    for (int id : order)
        if (!names.count(id)) names[id] = nth_name(next++);
    TypePrinter tp;
    tp.rename = &names;
    if (s.quantified.empty()) return tp.go(s.body, 0);
    std::string out = "forall";
    for (int id : s.quantified) out += " " + names[id];
    out += ". " + tp.go(s.body, 0);
    return out;
}

std::string pretty(const OpSignature& sig) {
    std::map<int, std::string> names;
    std::size_t next = 0;
    for (int id : sig.quantified) names[id] = nth_name(next++);
    TypePrinter tp;
    tp.rename = &names;
    std::string out;
    if (!sig.quantified.empty()) {
        out = "forall";
        for (int id : sig.quantified) out += " " + names[id];
        out += ". ";
    }
    out += tp.go(sig.dom, 1) + " ~> " + tp.go(sig.cod, 0);
    return out;
}

namespace {

bool list_elements(const TermPtr& v, std::vector<TermPtr>& out) {
    TermPtr cur = v;
    while (true) {
        if (std::holds_alternative<TNil>(cur->node)) return true;
        const auto* cons = std::get_if<TCons>(&cur->node);
        if (!cons) return false;
        const auto* pair = std::get_if<TPair>(&cons->pair->node);
        if (!pair) return false;
        out.push_back(pair->left);
        cur = pair->right;
    }
}

std::string show_value_at(const TermPtr& v, bool atom) {
    std::vector<TermPtr> elems;
    if (std::holds_alternative<TNil>(v->node) ||
        (std::holds_alternative<TCons>(v->node) && list_elements(v, elems))) {
        if (std::holds_alternative<TNil>(v->node)) return "[]";
        std::string out = "[";
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (i) out += "; ";
            out += show_value_at(elems[i], false);
        }
        return out + "]";
    }
    return std::visit(
        [&](const auto& n) -> std::string {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TConst>) {
                return show_constant(n.c);
            } else if constexpr (std::is_same_v<N, TAbs> || std::is_same_v<N, TFix>) {
                return "<fun>";
            } else if constexpr (std::is_same_v<N, TPair>) {
                return "(" + show_value_at(n.left, false) + ", " +
                       show_value_at(n.right, false) + ")";
            } else if constexpr (std::is_same_v<N, TInl>) {
                std::string s = "inl " + show_value_at(n.value, true);
                return atom ? "(" + s + ")" : s;
            } else if constexpr (std::is_same_v<N, TInr>) {
                std::string s = "inr " + show_value_at(n.value, true);
                return atom ? "(" + s + ")" : s;
            } else if constexpr (std::is_same_v<N, TCons>) {
                std::string s = "cons " + show_value_at(n.pair, true);
                return atom ? "(" + s + ")" : s;
            } else {
                return pretty(v);
            }
        },
        v->node);
}

}  // namespace

std::string show_value(const TermPtr& v) { return show_value_at(v, false); }

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::Lexer: return "lex";
        case Phase::Parser: return "parse";
        case Phase::Desugar: return "desugar";
        case Phase::SignatureRestriction: return "signature restriction";
        case Phase::Type: return "type";
        case Phase::EffectType: return "effect type";
        case Phase::EffectGate: return "effect generalization";
        case Phase::Io: return "io";
    }
    return "?";
}

std::string render(const Diagnostic& d) {
    std::ostringstream out;
    out << (d.severity == Severity::Error ? "error" : "warning");
    if (!d.span.synthetic()) out << " at " << d.span.line << ":" << d.span.column;
    out << " [" << phase_name(d.phase) << "]: " << d.message;
    if (!d.detail.empty()) out << "\n  " << d.detail;
    return out.str();
}

}  // namespace eff
