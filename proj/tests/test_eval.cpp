#include "doctest.h"

#include "eff/bigstep.hpp"
#include "eff/eval.hpp"
#include "eff/parser.hpp"
#include "eff/pretty.hpp"
#include "eff/session.hpp"

using namespace eff;

namespace {

// Evaluation is independent of typing: parse, link, run.
Outcome run_src(const std::string& src, long long fuel = 100000,
                std::vector<std::string>* trace = nullptr) {
    auto p = parse_program(src);
    CAPTURE(src);
    if (!p.ok())
        for (const auto& d : p.diagnostics) MESSAGE(render(d));
    REQUIRE(p.ok());
    return run(link_program(*p.program), fuel, trace);
}

}  // namespace

TEST_CASE("decompose: leftmost-innermost application") {
    // ((fun x -> x) 1) 2 decomposes into context ([] 2) around (fun x -> x) 1
    TermPtr id = mk_abs("x", mk_var("x"));
    TermPtr m = mk_app(mk_app(id, mk_int(1)), mk_int(2));
    Decomposition d = decompose(m);
    REQUIRE(d.kind == Decomposition::Kind::Redex);
    CHECK(term_eq(d.redex, mk_app(id, mk_int(1))));
    REQUIRE(d.context.size() == 1);
    CHECK(std::holds_alternative<FrAppFn>(d.context[0].node));
    CHECK(term_eq(fill(d.context, d.redex), m));
}

TEST_CASE("decompose: handle with an op-free hole is one redex") {
    std::string src =
        "effect fail : forall a. unit ~> a\n"
        "handle #fail() with return x -> [x] | fail z -> []";
    auto p = parse_program(src);
    REQUIRE(p.ok());
    TermPtr m = *p.program->main;
    Decomposition d = decompose(m);
    REQUIRE(d.kind == Decomposition::Kind::Redex);
    CHECK(d.context.empty());
    CHECK(term_eq(d.redex, m));
}

TEST_CASE("decompose: innermost matching handler wins") {
    std::string src =
        "effect a : unit ~> int\n"
        "effect b : unit ~> int\n"
        "handle (handle #a() with return x -> x | a(u, k) -> k 1)\n"
        "with return y -> y | a(u, k) -> k 2";
    auto p = parse_program(src);
    REQUIRE(p.ok());
    Decomposition d = decompose(*p.program->main);
    REQUIRE(d.kind == Decomposition::Kind::Redex);
    // redex is the inner handle; the outer handle frame stays in the context
    REQUIRE(d.context.size() == 1);
    CHECK(std::holds_alternative<FrHandle>(d.context[0].node));
    Outcome o = run(*p.program->main, 1000);
    REQUIRE(o.is_value());
    CHECK(show_value(o.value) == "1");
}

TEST_CASE("decompose: non-matching inner handler passes through") {
    std::string src =
        "effect a : unit ~> int\n"
        "effect b : unit ~> int\n"
        "handle (handle #b() with return x -> x | a(u, k) -> k 1)\n"
        "with return y -> y | b(u, k) -> k 9";
    Outcome o = run_src(src);
    REQUIRE(o.is_value());
    CHECK(show_value(o.value) == "9");
}

TEST_CASE("decompose: unhandled operation surfaces with its argument") {
    std::string src = "effect select : forall a. a list ~> a\n#select([1])";
    auto p = parse_program(src);
    REQUIRE(p.ok());
    Decomposition d = decompose(*p.program->main);
    REQUIRE(d.kind == Decomposition::Kind::Unhandled);
    CHECK(d.op == "select");
    CHECK(d.context.empty());
    CHECK(alpha_eq(d.op_arg, mk_int_list({1})));
}

TEST_CASE("contract: R-Handle builds the deep continuation") {
    std::string src =
        "effect get : unit ~> int\n"
        "handle #get() + 1 with return x -> x | get(u, k) -> k 5";
    auto p = parse_program(src);
    REQUIRE(p.ok());
    Decomposition d = decompose(*p.program->main);
    REQUIRE(d.kind == Decomposition::Kind::Redex);
    Contraction c = contract(d.redex);
    REQUIRE_FALSE(c.stuck);
    CHECK(c.tag == RuleTag::Handle);
    // contractum is k 5 with k = fun y -> handle y + 1 with H
    const auto* app = std::get_if<TApp>(&c.term->node);
    REQUIRE(app != nullptr);
    const auto* k = std::get_if<TAbs>(&app->fn->node);
    REQUIRE(k != nullptr);
    CHECK(std::holds_alternative<THandle>(k->body->node));
    Outcome o = run(*p.program->main, 1000);
    REQUIRE(o.is_value());
    CHECK(show_value(o.value) == "6");
}

TEST_CASE("continuations are multi-shot") {
    std::string src =
        "effect get : unit ~> int\n"
        "handle #get() * 10 with return x -> x | get(u, k) -> (k 1) + (k 2)";
    Outcome o = run_src(src);
    REQUIRE(o.is_value());
    CHECK(show_value(o.value) == "30");
}

TEST_CASE("beta and const chains") {
    Outcome o = run_src("(fun x -> x + 1) 2");
    REQUIRE(o.is_value());
    CHECK(show_value(o.value) == "3");
    CHECK(o.steps == 3);   // beta, partial +, final +

    Outcome id42 = run_src("(fun x -> x) 42");
    CHECK(show_value(id42.value) == "42");
}

TEST_CASE("stuck states") {
    Outcome o1 = run_src("true 1");
    CHECK(o1.kind == Outcome::Kind::Stuck);

    Outcome o2 = run_src("1 + true");
    CHECK(o2.kind == Outcome::Kind::Stuck);
    CHECK(o2.stuck_reason.find("undefined") != std::string::npos);

    Outcome o3 = run_src("fst 3");
    CHECK(o3.kind == Outcome::Kind::Stuck);

    Outcome o4 = run_src("10 mod 0");
    CHECK(o4.kind == Outcome::Kind::Stuck);

    Outcome o5 = run_src("if 3 then 1 else 2");
    CHECK(o5.kind == Outcome::Kind::Stuck);
}

TEST_CASE("divergence runs out of fuel") {
    Outcome o = run_src("let rec loop x = loop x in loop ()", 1000);
    CHECK(o.kind == Outcome::Kind::OutOfFuel);
}

TEST_CASE("projection, case, fix, if rules") {
    CHECK(show_value(run_src("fst (1, true)").value) == "1");
    CHECK(show_value(run_src("snd (1, true)").value) == "true");
    CHECK(show_value(run_src("case inl 3 of inl x -> x + 1 | inr y -> 0").value) == "4");
    CHECK(show_value(run_src("case inr 3 of inl x -> 0 | inr y -> y * 2").value) == "6");
    CHECK(show_value(run_src("case [] of nil -> 7 | cons p -> fst p").value) == "7");
    CHECK(show_value(run_src("case [8; 9] of nil -> 0 | cons p -> fst p").value) == "8");
    CHECK(show_value(
              run_src("let rec fact n = if n < 1 then 1 else n * fact (n - 1) in fact 5")
                  .value) == "120");
    CHECK(show_value(run_src("if true then 1 else 2").value) == "1");
    CHECK(show_value(run_src("if false then 1 else 2").value) == "2");
}

TEST_CASE("trace lines follow the stable format") {
    std::vector<std::string> trace;
    Outcome o = run_src("(fun x -> x) 42", 100, &trace);
    REQUIRE(o.is_value());
    REQUIRE(trace.size() == 1);
    CHECK(trace[0] == "step 1: [Beta] (fun x -> x) 42 ↝ 42");

    trace.clear();
    run_src("fst (1, 2)", 100, &trace);
    CHECK(trace[0] == "step 1: [Proj1] fst (1, 2) ↝ 1");
}

TEST_CASE("context-fill law holds after each step") {
    std::string src =
        "effect fail : forall a. unit ~> a\n"
        "handle (fun x -> if x then 1 else #fail()) false\n"
        "with return z -> [z] | fail z -> []";
    auto p = parse_program(src);
    REQUIRE(p.ok());
    TermPtr cur = link_program(*p.program);
    for (int i = 0; i < 100; ++i) {
        Decomposition d = decompose(cur);
        if (d.kind != Decomposition::Kind::Redex) break;
        CHECK(term_eq(fill(d.context, d.redex), cur));
        Contraction c = contract(d.redex);
        REQUIRE_FALSE(c.stuck);
        cur = fill(d.context, c.term);
    }
    CHECK(show_value(run_src(src).value) == "[]");
}

TEST_CASE("bigstep oracle agrees on the running examples") {
    const char* programs[] = {
        "(fun x -> x + 1) 2",
        "fst (snd (1, (2, 3)))",
        "effect get : unit ~> int\n"
        "handle #get() * 10 with return x -> x | get(u, k) -> (k 1) + (k 2)",
        "effect fail : forall a. unit ~> a\n"
        "handle if false then 1 else #fail() with return z -> [z] | fail z -> []",
        "effect select : forall a. a list ~> a\n#select([1])",
        "true 1",
        "let rec fact n = if n < 1 then 1 else n * fact (n - 1) in fact 6",
    };
    for (const char* src : programs) {
        CAPTURE(src);
        auto p = parse_program(src);
        REQUIRE(p.ok());
        TermPtr whole = link_program(*p.program);
        Outcome small = run(whole, 100000);
        Outcome big = bigstep_oracle(whole, 1000000);
        CHECK(small.kind == big.kind);
        if (small.kind == Outcome::Kind::Value) CHECK(alpha_eq(small.value, big.value));
        if (small.kind == Outcome::Kind::UnhandledOp) {
            CHECK(small.op == big.op);
            CHECK(alpha_eq(small.op_arg, big.op_arg));
        }
    }
}

TEST_CASE("the get_id counterexample reaches the documented stuck state") {
    std::string src =
        "effect get_id : forall a. unit ~> a -> a\n"
        "handle\n"
        "  let f = #get_id () in\n"
        "  if f true then (f 0) + 1 else 2\n"
        "with\n"
        "  return x -> x\n"
        "| get_id x -> resume (fun z1 -> let _ = resume (fun z2 -> z1) in z1)";
    Outcome o = run_src(src);
    REQUIRE(o.kind == Outcome::Kind::Stuck);
    // an integer primitive applied to `true`
    CHECK(pretty(o.stuck_redex).find("true") != std::string::npos);
    CHECK(pretty(o.stuck_redex).find("+") != std::string::npos);

    Outcome big = bigstep_oracle(link_program(*parse_program(src).program), 100000);
    CHECK(big.kind == Outcome::Kind::Stuck);
}
