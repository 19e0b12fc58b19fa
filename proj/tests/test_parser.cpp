#include "doctest.h"

#include "eff/parser.hpp"
#include "eff/pretty.hpp"

using namespace eff;

TEST_CASE("operation declarations elaborate to closed signatures") {
    auto r = parse_program("effect fail : forall a. unit ~> a");
    REQUIRE(r.ok());
    REQUIRE(r.program->decls.size() == 1);
    const OpSignature& sig = r.program->decls[0].sig;
    CHECK(sig.name == "fail");
    CHECK(sig.quantified.size() == 1);
    CHECK(type_eq(sig.dom, ty_unit()));
    CHECK(alpha_eq(sig.cod, ty_var(sig.quantified[0], true, "a")));
    CHECK(ftv(sig).empty());
}

TEST_CASE("signatures must be closed") {
    auto r = parse_program("effect op : forall a. a list ~> b");
    CHECK_FALSE(r.ok());
    REQUIRE(!r.diagnostics.empty());
    CHECK(r.diagnostics[0].message.find("unbound type variable") != std::string::npos);
}

TEST_CASE("duplicate operation declarations are rejected") {
    auto r = parse_program("effect f : unit ~> unit\neffect f : unit ~> int");
    CHECK_FALSE(r.ok());
    CHECK(r.diagnostics[0].message.find("duplicate operation") != std::string::npos);
}

TEST_CASE("top-level let bindings desugar parameters") {
    auto r = parse_program("let id = fun x -> x");
    REQUIRE(r.ok());
    REQUIRE(r.program->bindings.size() == 1);
    CHECK(alpha_eq(r.program->bindings[0].term, mk_abs("x", mk_var("x"))));

    auto r2 = parse_program("let f x y = x");
    REQUIRE(r2.ok());
    CHECK(alpha_eq(r2.program->bindings[0].term,
                   mk_abs("x", mk_abs("y", mk_var("x")))));
}

TEST_CASE("let rec desugars to fix") {
    auto r = parse_program("let rec loop x = loop x\nloop ()");
    REQUIRE(r.ok());
    TermPtr expected = mk_fix("loop", "x", mk_app(mk_var("loop"), mk_var("x")));
    CHECK(alpha_eq(r.program->bindings[0].term, expected));
}

TEST_CASE("malformed input produces a spanned diagnostic") {
    std::string src = "effect select : forall a. a list ~> a\n#select([1;2)";
    auto r = parse_program(src);
    CHECK_FALSE(r.ok());
    REQUIRE(!r.diagnostics.empty());
    const Diagnostic& d = r.diagnostics[0];
    CHECK(d.span.line == 2);
    CHECK(d.span.begin < src.size());
    CHECK(d.span.end <= src.size());
}

TEST_CASE("list literals expand to cons chains over pairs") {
    auto r = parse_program("[3; 5; 10]");
    REQUIRE(r.ok());
    CHECK(alpha_eq(*r.program->main, mk_int_list({3, 5, 10})));
    auto r2 = parse_program("[]");
    REQUIRE(r2.ok());
    CHECK(alpha_eq(*r2.program->main, mk_nil()));
}

TEST_CASE("resume desugars to continuation application") {
    std::string src =
        "effect select : forall a. a list ~> a\n"
        "handle #select([1]) with\n"
        "  return z -> z\n"
        "| select l -> concat (map l (fun y -> resume y))";
    auto r = parse_program(src);
    REQUIRE(r.ok());
    const auto* h = std::get_if<THandle>(&(*r.program->main)->node);
    REQUIRE(h != nullptr);
    REQUIRE(h->handler->op_clauses.size() == 1);
    const OpClause& cl = h->handler->op_clauses[0];
    CHECK(cl.arg_binder == "l");
    // resume y became an application of the continuation binder
    TermPtr expected = mk_app(
        mk_var("concat"),
        mk_app(mk_app(mk_var("map"), mk_var("l")),
               mk_abs("y", mk_app(mk_var(cl.cont_binder), mk_var("y")))));
    CHECK(alpha_eq(cl.body, expected));
}

TEST_CASE("explicit continuation clause form") {
    std::string src =
        "effect get : unit ~> int\n"
        "handle #get() with return x -> x | get(u, k) -> k 7";
    auto r = parse_program(src);
    REQUIRE(r.ok());
    const auto* h = std::get_if<THandle>(&(*r.program->main)->node);
    const OpClause& cl = h->handler->op_clauses[0];
    CHECK(cl.arg_binder == "u");
    CHECK(cl.cont_binder == "k");
    CHECK(alpha_eq(cl.body, mk_app(mk_var("k"), mk_int(7))));
}

TEST_CASE("resume outside an operation clause is an error") {
    auto r = parse_program("resume 1");
    CHECK_FALSE(r.ok());
    CHECK(r.diagnostics[0].message.find("resume") != std::string::npos);

    // also illegal in a return clause
    auto r2 = parse_program(
        "effect f : unit ~> unit\nhandle () with return x -> resume x");
    CHECK_FALSE(r2.ok());
}

TEST_CASE("handler clause order is normalized and duplicates rejected") {
    std::string src =
        "effect a : unit ~> unit\n"
        "effect b : unit ~> unit\n"
        "handle () with a x -> () | return x -> x | b x -> ()";
    auto r = parse_program(src);
    REQUIRE(r.ok());
    const auto* h = std::get_if<THandle>(&(*r.program->main)->node);
    CHECK(h->handler->return_binder == "x");
    REQUIRE(h->handler->op_clauses.size() == 2);
    CHECK(h->handler->op_clauses[0].op == "a");
    CHECK(h->handler->op_clauses[1].op == "b");

    auto r2 = parse_program(
        "effect a : unit ~> unit\nhandle () with return x -> x | a x -> () | a y -> ()");
    CHECK_FALSE(r2.ok());
    CHECK(r2.diagnostics[0].message.find("duplicate clause") != std::string::npos);
}

TEST_CASE("comments and strings lex") {
    std::string src =
        "-- line comment\n"
        "(* block (* nested *) comment *)\n"
        "let s = \"he\\\"llo\\n\"\n"
        "length s";
    auto r = parse_program(src);
    REQUIRE(r.ok());
    CHECK(r.program->bindings.size() == 1);
}

TEST_CASE("effect-annotated arrows parse in type annotations") {
    auto r = parse_program(
        "effect get_id : forall a. unit ~> a -> a\n"
        "let f : forall a. a -{get_id}-> a = fun x -> #get_id () x");
    REQUIRE(r.ok());
    const TopBinding& b = r.program->bindings[0];
    REQUIRE(b.ann.has_value());
    const auto* arrow = std::get_if<TyArrow>(&b.ann->body->node);
    REQUIRE(arrow != nullptr);
    REQUIRE(arrow->eff.has_value());
    CHECK(*arrow->eff == Effect{"get_id"});
}

TEST_CASE("operator precedence is application > mul > add > cmp") {
    TermPtr t = parse_expr_or_throw("f 1 + 2 * 3 < 10");
    // ((f 1) + (2 * 3)) < 10
    TermPtr f1 = mk_app(mk_var("f"), mk_int(1));
    TermPtr mul = mk_app(mk_app(mk_const(Constant::prim_op("*")), mk_int(2)), mk_int(3));
    TermPtr add = mk_app(mk_app(mk_const(Constant::prim_op("+")), f1), mul);
    TermPtr expected = mk_app(mk_app(mk_const(Constant::prim_op("<")), add), mk_int(10));
    CHECK(alpha_eq(t, expected));
}

TEST_CASE("pretty output reparses to an alpha-equivalent term") {
    const char* samples[] = {
        "fun x -> x",
        "let f = fun x -> #op(x) in f 1",
        "handle #op(()) with return x -> [x] | op(v, k) -> k v",
        "if 1 < 2 then inl (1, [2; 3]) else inr ()",
        "case xs of nil -> 0 | cons p -> fst p",
        "fix f x -> case x of inl a -> f (inr a) | inr b -> b",
        "(fun x -> x) (fun y -> y y)",
        "not (1 = 2)",
        "let g = fun x -> fun y -> x * y - 3 mod y in g 4 5",
    };
    for (const char* s : samples) {
        CAPTURE(s);
        TermPtr t = parse_expr_or_throw(s);
        std::string printed = pretty(t);
        CAPTURE(printed);
        TermPtr back = parse_expr_or_throw(printed);
        CHECK(alpha_eq(t, back));
    }
}

TEST_CASE("pretty prints types with standard precedence") {
    auto r = parse_program("effect satisfy : forall a. (str -> (a * str) + unit) ~> a");
    REQUIRE(r.ok());
    CHECK(pretty(r.program->decls[0].sig) ==
          "forall a. (str -> a * str + unit) ~> a");
}

TEST_CASE("desugaring introduces no free variables") {
    std::string src =
        "effect select : forall a. a list ~> a\n"
        "let pick l = handle #select(l) with return x -> [x] | select l -> resume []\n"
        "pick [[1]; [2]]";
    auto r = parse_program(src);
    REQUIRE(r.ok());
    for (const auto& b : r.program->bindings) CHECK(free_vars(b.term).empty());
    // main references the binding, nothing else
    CHECK(free_vars(*r.program->main) == std::set<std::string>{"pick"});
}
