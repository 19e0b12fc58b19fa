#include "eff/unify.hpp"

#include "eff/pretty.hpp"

namespace eff {

TypePtr Substitution::resolve(const TypePtr& t) const {
    const auto* v = std::get_if<TyVar>(&t->node);
    if (!v) return t;
    auto it = map_.find(v->id);
    return it == map_.end() ? t : it->second;
}

void Substitution::bind(int var, const TypePtr& t) {
    TypeSubstMap single{{var, t}};
    for (auto& [k, img] : map_) img = subst_type(img, single);
    map_[var] = t;
}

namespace {

[[noreturn]] void unify_fail(const std::string& msg, const TypePtr& a, const TypePtr& b,
                             Span sp) {
    Diagnostic d;
    d.phase = Phase::Type;
    d.span = sp;
    d.message = msg;
    d.detail = "cannot unify " + pretty(a) + " with " + pretty(b);
    throw CheckError(std::move(d));
}

std::string effect_text(const Effect& e) {
    std::string s = "{";
    bool first = true;
    for (const auto& op : e) {
        if (!first) s += ",";
        s += op;
        first = false;
    }
    return s + "}";
}

}  // namespace

void unify(Substitution& sub, const TypePtr& ta, const TypePtr& tb, Span sp) {
    TypePtr a = sub.resolve(ta);
    TypePtr b = sub.resolve(tb);

    const auto* va = std::get_if<TyVar>(&a->node);
    const auto* vb = std::get_if<TyVar>(&b->node);

    if (va && vb && va->id == vb->id) return;

    if (va && !va->rigid) {
        TypePtr image = sub.apply(b);
        if (ftv(image).count(va->id))
            unify_fail("occurs check failed: the type would be infinite", a, b, sp);
        sub.bind(va->id, image);
        return;
    }
    if (vb && !vb->rigid) {
        unify(sub, b, a, sp);
        return;
    }
    if (va && va->rigid) {
        // rigid variables unify only with themselves
        if (vb && vb->rigid)
            unify_fail("rigid type variables differ", a, b, sp);
        unify_fail("rigid type variable cannot equal a concrete type", a, b, sp);
    }
    if (vb && vb->rigid)
        unify_fail("rigid type variable cannot equal a concrete type", a, b, sp);

    if (a->node.index() != b->node.index())
        unify_fail("type constructor mismatch", a, b, sp);

    std::visit(
        [&](const auto& na) {
            using N = std::decay_t<decltype(na)>;
            const auto& nb = std::get<N>(b->node);
            if constexpr (std::is_same_v<N, TyBase>) {
                if (na.base != nb.base)
                    unify_fail("base type mismatch", a, b, sp);
            } else if constexpr (std::is_same_v<N, TyArrow>) {
                if (na.eff != nb.eff) {
                    std::string da = na.eff ? effect_text(*na.eff) : "(none)";
                    std::string db = nb.eff ? effect_text(*nb.eff) : "(none)";
                    unify_fail("arrow effects differ: " + da + " vs " + db, a, b, sp);
                }
                unify(sub, na.dom, nb.dom, sp);
                unify(sub, na.cod, nb.cod, sp);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                unify(sub, na.left, nb.left, sp);
                unify(sub, na.right, nb.right, sp);
            } else if constexpr (std::is_same_v<N, TyList>) {
                unify(sub, na.elem, nb.elem, sp);
            }
        },
        a->node);
}

}  // namespace eff
