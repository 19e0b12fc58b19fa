#include "doctest.h"

#include "eff/pretty.hpp"
#include "eff/syntax.hpp"

using namespace eff;

TEST_CASE("ftv of plain types") {
    TypePtr a = ty_var(0, true, "a");
    TypePtr b = ty_var(1, true, "b");
    CHECK(ftv(ty_arrow(ty_list(a), a)) == std::set<int>{0});
    CHECK(ftv(ty_int()) == std::set<int>{});

    Scheme s{{0}, ty_arrow(a, b)};
    CHECK(ftv(s) == std::set<int>{1});
}

TEST_CASE("subst_type substitutes simultaneously and ignores unmapped vars") {
    TypePtr a = ty_var(0, false, "a");
    TypePtr b = ty_var(1, false, "b");
    TypeSubstMap m{{0, ty_int()}};
    CHECK(type_eq(subst_type(ty_arrow(ty_list(a), a), m),
                  ty_arrow(ty_list(ty_int()), ty_int())));
    CHECK(type_eq(subst_type(ty_unit(), m), ty_unit()));

    // (a -> b)[b/a] = b -> b, not applied twice
    TypeSubstMap swap{{0, b}};
    CHECK(type_eq(subst_type(ty_arrow(a, b), swap), ty_arrow(b, b)));
}

TEST_CASE("subst_term basic cases") {
    TermPtr v = mk_var("v");
    // (fun y -> x)[v/x] = fun y -> v
    TermPtr t1 = mk_abs("y", mk_var("x"));
    CHECK(alpha_eq(subst_term(t1, "x", v), mk_abs("y", mk_var("v"))));
    // (fun x -> x)[v/x] = fun x -> x (shadowing)
    TermPtr t2 = mk_abs("x", mk_var("x"));
    CHECK(alpha_eq(subst_term(t2, "x", v), t2));
    // (fun y -> y x)[y/x]: capture avoidance forces a rename
    TermPtr t3 = mk_abs("y", mk_app(mk_var("y"), mk_var("x")));
    TermPtr r3 = subst_term(t3, "x", mk_var("y"));
    CHECK(alpha_eq(r3, mk_abs("z", mk_app(mk_var("z"), mk_var("y")))));
}

TEST_CASE("subst_term only replaces the named free variable") {
    TermPtr body = mk_app(mk_var("f"), mk_pair(mk_var("x"), mk_var("g")));
    TermPtr r = subst_term(body, "x", mk_int(1));
    auto fv = free_vars(r);
    CHECK(fv == std::set<std::string>{"f", "g"});
}

TEST_CASE("alpha_eq on terms") {
    CHECK(alpha_eq(mk_abs("x", mk_var("x")), mk_abs("y", mk_var("y"))));
    CHECK_FALSE(alpha_eq(mk_abs("x", mk_abs("y", mk_var("x"))),
                         mk_abs("a", mk_abs("b", mk_var("b")))));
    // free variables must match by name
    CHECK_FALSE(alpha_eq(mk_var("x"), mk_var("y")));
    CHECK(alpha_eq(mk_var("x"), mk_var("x")));
}

TEST_CASE("alpha_eq on schemes") {
    TypePtr a = ty_var(0, true, "a");
    TypePtr b = ty_var(7, true, "b");
    Scheme s1{{0}, ty_arrow(a, a)};
    Scheme s2{{7}, ty_arrow(b, b)};
    CHECK(alpha_eq(s1, s2));
    Scheme s3{{0}, ty_arrow(a, ty_int())};
    CHECK_FALSE(alpha_eq(s1, s3));
}

TEST_CASE("constant table: types and denotations") {
    Constant plus = Constant::prim_op("+");
    CHECK(type_eq(const_type(plus, false),
                  ty_arrow(ty_int(), ty_arrow(ty_int(), ty_int()))));

    auto partial = zeta(plus, Constant::of_int(2));
    REQUIRE(partial.has_value());
    CHECK(type_eq(const_type(*partial, false), ty_arrow(ty_int(), ty_int())));
    auto five = zeta(*partial, Constant::of_int(3));
    REQUIRE(five.has_value());
    CHECK(five->int_val == 5);

    // zeta is undefined on a type mismatch and on mod-by-zero
    CHECK_FALSE(zeta(plus, Constant::of_bool(true)).has_value());
    Constant m = Constant::prim_op("mod");
    auto m7 = zeta(m, Constant::of_int(7));
    REQUIRE(m7.has_value());
    CHECK_FALSE(zeta(*m7, Constant::of_int(0)).has_value());

    Constant first = Constant::prim_op("first");
    Constant last = Constant::prim_op("last");
    CHECK(zeta(first, Constant::of_str("abc"))->str_val == "a");
    CHECK(zeta(last, Constant::of_str("abc"))->str_val == "bc");
    CHECK(zeta(Constant::prim_op("length"), Constant::of_str("abc"))->int_val == 3);
}

TEST_CASE("zeta totality: defined on every domain-matching pair except mod 0") {
    std::vector<Constant> firsts;
    for (const auto& name : prim_names()) firsts.push_back(Constant::prim_op(name));
    std::vector<Constant> seconds = {Constant::of_int(-3), Constant::of_int(0),
                                     Constant::of_int(11), Constant::of_bool(false),
                                     Constant::of_bool(true), Constant::of_str(""),
                                     Constant::of_str("xy"), Constant::unit()};
    // include the partially applied binary primitives
    std::vector<Constant> fns = firsts;
    for (const auto& f : firsts)
        for (const auto& s : seconds)
            if (auto r = zeta(f, s); r && r->tag == Constant::Tag::Prim)
                fns.push_back(*r);

    for (const auto& fn : fns) {
        TypePtr fn_ty = const_type(fn, false);
        const auto* arrow = std::get_if<TyArrow>(&fn_ty->node);
        REQUIRE(arrow != nullptr);
        for (const auto& arg : seconds) {
            if (!type_eq(const_type(arg, false), arrow->dom)) {
                CHECK_FALSE(zeta(fn, arg).has_value());
                continue;
            }
            bool mod_by_zero = fn.tag == Constant::Tag::Prim && fn.prim == "mod" &&
                               fn.args.size() == 1 && arg.int_val == 0;
            auto r = zeta(fn, arg);
            if (mod_by_zero) {
                CHECK_FALSE(r.has_value());
                continue;
            }
            REQUIRE(r.has_value());
            CHECK(type_eq(const_type(*r, false), arrow->cod));
        }
    }
}

TEST_CASE("values") {
    CHECK(is_value(mk_int(1)));
    CHECK(is_value(mk_abs("x", mk_var("x"))));
    CHECK(is_value(mk_cons(mk_pair(mk_int(1), mk_nil()))));
    CHECK_FALSE(is_value(mk_app(mk_abs("x", mk_var("x")), mk_int(1))));
    CHECK_FALSE(is_value(mk_fix("f", "x", mk_var("x"))));
    CHECK_FALSE(is_value(mk_pair(mk_int(1), mk_opcall("op", mk_unit()))));
}

TEST_CASE("value printing uses list literals") {
    CHECK(show_value(mk_int_list({3, 5})) == "[3; 5]");
    CHECK(show_value(mk_nil()) == "[]");
    CHECK(show_value(mk_pair(mk_int(1), mk_bool(true))) == "(1, true)");
    CHECK(show_value(mk_inl(mk_str("a"))) == "inl \"a\"");
}
