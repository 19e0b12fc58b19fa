#include "doctest.h"

#include "eff/infer.hpp"
#include "eff/pretty.hpp"
#include "eff/session.hpp"

using namespace eff;

namespace {

Scheme scheme_of(const std::string& src, const std::string& name) {
    CheckOutput out = check_source(src, SessionConfig{});
    CAPTURE(src);
    if (!out.ok)
        for (const auto& d : out.diagnostics) MESSAGE(render(d));
    REQUIRE(out.ok);
    auto parse = parse_program(src);
    InferenceState st;
    std::vector<Diagnostic> diags;
    auto checked = check_program(st, *parse.program, diags);
    REQUIRE(checked.has_value());
    for (const auto& [n, s] : checked->bindings)
        if (n == name) return st.sub.apply(s);
    REQUIRE(checked->main_scheme.has_value());
    return st.sub.apply(*checked->main_scheme);
}

std::string scheme_text(const std::string& src, const std::string& name = "") {
    return pretty_normalized(scheme_of(src, name));
}

std::vector<Diagnostic> reject(const std::string& src, bool sr_enabled = true) {
    SessionConfig cfg;
    cfg.sr_enabled = sr_enabled;
    CheckOutput out = check_source(src, cfg);
    CAPTURE(src);
    REQUIRE_FALSE(out.ok);
    REQUIRE(!out.diagnostics.empty());
    return out.diagnostics;
}

}  // namespace

TEST_CASE("unify basics") {
    InferenceState st;
    TypePtr u = st.fresh_uvar();
    unify(st.sub, u, ty_list(ty_int()), Span{});
    CHECK(type_eq(st.sub.apply(u), ty_list(ty_int())));

    // constructor clash
    InferenceState st2;
    TypePtr v = st2.fresh_uvar();
    CHECK_THROWS_AS(unify(st2.sub, ty_arrow(v, v), ty_arrow(ty_int(), ty_bool()), Span{}),
                    CheckError);

    // occurs check
    InferenceState st3;
    TypePtr w = st3.fresh_uvar();
    CHECK_THROWS_AS(unify(st3.sub, w, ty_list(w), Span{}), CheckError);

    // rigid variables unify only with themselves
    InferenceState st4;
    TypePtr r1 = st4.fresh_rigid("a");
    TypePtr r2 = st4.fresh_rigid("b");
    CHECK_THROWS_AS(unify(st4.sub, r1, r2, Span{}), CheckError);
    CHECK_THROWS_AS(unify(st4.sub, r1, ty_int(), Span{}), CheckError);
    unify(st4.sub, r1, r1, Span{});   // fine
}

TEST_CASE("substitution stays idempotent across extensions") {
    InferenceState st;
    TypePtr a = st.fresh_uvar(), b = st.fresh_uvar(), c = st.fresh_uvar();
    unify(st.sub, a, ty_arrow(b, c), Span{});
    unify(st.sub, b, ty_list(c), Span{});
    unify(st.sub, c, ty_int(), Span{});
    for (const auto& [var, img] : st.sub.raw()) {
        CHECK(type_eq(st.sub.apply(img), img));
        (void)var;
    }
    CHECK(type_eq(st.sub.apply(a), ty_arrow(ty_list(ty_int()), ty_int())));
}

TEST_CASE("instantiate gives fresh shared variables for signatures") {
    InferenceState st;
    auto parse = parse_program("effect select : forall a. a list ~> a");
    const OpSignature& sig = parse.program->decls[0].sig;
    auto [dom1, cod1] = instantiate(st, sig);
    // one shared fresh variable across domain and codomain
    const auto* lst = std::get_if<TyList>(&dom1->node);
    REQUIRE(lst != nullptr);
    CHECK(type_eq(lst->elem, cod1));
    // a second instantiation is independent
    auto [dom2, cod2] = instantiate(st, sig);
    CHECK_FALSE(type_eq(cod1, cod2));
    unify(st.sub, cod1, ty_int(), Span{});
    unify(st.sub, cod2, ty_bool(), Span{});   // both legal
}

TEST_CASE("generalize quantifies exactly the context-free variables") {
    InferenceState st;
    TypingContext ctx;
    TypePtr a = st.fresh_uvar("a");
    Scheme s = generalize(st, ctx, ty_arrow(ty_list(a), a));
    CHECK(pretty_normalized(s) == "forall a. a list -> a");

    // a context occurrence blocks quantification
    InferenceState st2;
    TypingContext ctx2;
    TypePtr b = st2.fresh_uvar("b");
    ctx2.push("x", mono(b));
    Scheme s2 = generalize(st2, ctx2, ty_arrow(b, ty_int()));
    CHECK(s2.quantified.empty());

    InferenceState st3;
    TypingContext ctx3;
    Scheme s3 = generalize(st3, ctx3, ty_int());
    CHECK(s3.quantified.empty());
}

TEST_CASE("instantiate of generalize unifies with the original") {
    InferenceState st;
    TypingContext ctx;
    TypePtr a = st.fresh_uvar();
    TypePtr t = ty_arrow(a, ty_prod(a, ty_list(a)));
    // keep the original type alive under a separate variable
    TypePtr probe = st.fresh_uvar();
    unify(st.sub, probe, t, Span{});
    Scheme s = generalize(st, ctx, t);
    TypePtr inst = instantiate(st, s);
    unify(st.sub, inst, st.sub.apply(probe), Span{});   // must succeed
}

TEST_CASE("inferred schemes for classic programs") {
    CHECK(scheme_text("let id = fun x -> x", "id") == "forall a. a -> a");
    CHECK(scheme_text("let k = fun x -> fun y -> x", "k") ==
          "forall a b. a -> b -> a");
    CHECK(scheme_text("effect select : forall a. a list ~> a\n"
                      "let sel = fun x -> #select(x)",
                      "sel") == "forall a. a list -> a");
    CHECK(scheme_text("effect fail : forall a. unit ~> a\n#fail() + 1") == "int");
}

TEST_CASE("let-polymorphism without a value restriction") {
    // an effectful binding still generalizes (SR makes this sound)
    std::string src =
        "effect select : forall a. a list ~> a\n"
        "let f = #select([fun x -> x])\n"
        "(f 1, f true)";
    CHECK(scheme_text(src, "f") == "forall a. a -> a");
    CHECK(scheme_text(src) == "int * bool");
}

TEST_CASE("the counterexample typechecks only without SR") {
    std::string src =
        "effect get_id : forall a. unit ~> a -> a\n"
        "handle\n"
        "  let f = #get_id () in\n"
        "  if f true then (f 0) + 1 else 2\n"
        "with\n"
        "  return x -> x\n"
        "| get_id x -> resume (fun z1 -> let _ = resume (fun z2 -> z1) in z1)";
    auto diags = reject(src, true);
    CHECK(diags[0].phase == Phase::SignatureRestriction);
    CHECK(diags[0].message.find("get_id") != std::string::npos);
    CHECK(diags[0].detail.find("negative") != std::string::npos);
    CHECK(diags[0].detail.find("codomain") != std::string::npos);

    SessionConfig cfg;
    cfg.sr_enabled = false;
    CheckOutput ok = check_source(src, cfg);
    REQUIRE(ok.ok);
    CHECK(pretty_normalized(*ok.main_scheme) == "int");
}

TEST_CASE("handler typing: filter returns int list") {
    std::string src =
        "effect select : int list ~> int\n"
        "effect fail : unit ~> unit\n"
        "let rec append a b = case a of nil -> b | cons (x, xs) -> cons (x, append xs b)\n"
        "let rec concat ls = case ls of nil -> nil | cons (l, r) -> append l (concat r)\n"
        "let rec map l f = case l of nil -> nil | cons (x, xs) -> cons (f x, map xs f)\n"
        "let filter l f =\n"
        "  handle\n"
        "    let x = #select(l) in\n"
        "    let _ = if f x then () else #fail() in x\n"
        "  with\n"
        "    return z -> [z]\n"
        "  | fail z -> []\n"
        "  | select l -> concat (map l (fun y -> resume y))";
    CHECK(scheme_text(src, "filter") == "int list -> (int -> bool) -> int list");
}

TEST_CASE("handler clause bodies all unify with the output type") {
    // fail clause returns [] and return clause [z]: both at int list
    std::string src =
        "effect fail : forall a. unit ~> a\n"
        "handle #fail() with return z -> [z + 1] | fail u -> []";
    CHECK(scheme_text(src) == "int list");
}

TEST_CASE("rigid escape from a handler clause is rejected") {
    // leak into the handler output type: the clause forces the (otherwise
    // unconstrained) output to be the operation's own type variable
    std::string src =
        "effect fail : forall a. unit ~> a\n"
        "effect id_op : forall a. a ~> a\n"
        "handle #id_op(1) with return x -> #fail() | id_op(x, k) -> x";
    auto diags = reject(src);
    CHECK(diags[0].message.find("leak") != std::string::npos);
    CHECK(diags[0].message.find("id_op") != std::string::npos);

    // leak into the enclosing context through a lambda binder
    std::string src2 =
        "effect id_op : forall a. a ~> a\n"
        "fun y -> handle #id_op(y) with return x -> x | id_op(x, k) -> x";
    auto diags2 = reject(src2);
    CHECK(diags2[0].message.find("leak") != std::string::npos);
}

TEST_CASE("clause for an undeclared operation is rejected") {
    auto diags = reject("handle 1 with return x -> x | nope u -> 0");
    CHECK(diags[0].message.find("undeclared") != std::string::npos);
}

TEST_CASE("unbound variables and operations are rejected with spans") {
    auto d1 = reject("foo 1");
    CHECK(d1[0].message.find("unbound variable") != std::string::npos);
    CHECK(d1[0].span.line == 1);
    auto d2 = reject("#nope(1)");
    CHECK(d2[0].message.find("not declared") != std::string::npos);
}

TEST_CASE("let ascriptions check and restrict") {
    CHECK(scheme_text("let id : forall a. a -> a = fun x -> x", "id") ==
          "forall a. a -> a");
    CHECK(scheme_text("let inc : int -> int = fun x -> x + 1", "inc") == "int -> int");
    // too-polymorphic annotation on a monomorphic body
    auto diags = reject("let bad : forall a. a -> a = fun x -> x + 1");
    CHECK(diags[0].phase == Phase::Type);
}

TEST_CASE("inference is deterministic up to alpha equivalence") {
    std::string src =
        "effect select : forall a. a list ~> a\n"
        "let pair = fun x -> fun y -> (x, y)\n"
        "let swap = fun p -> (snd p, fst p)\n"
        "let pick = fun l -> #select(l)";
    auto parse = parse_program(src);
    REQUIRE(parse.ok());
    InferenceState st1, st2;
    std::vector<Diagnostic> d1, d2;
    auto c1 = check_program(st1, *parse.program, d1);
    auto c2 = check_program(st2, *parse.program, d2);
    REQUIRE(c1);
    REQUIRE(c2);
    // rerun a few times to exercise different fresh-variable numbering
    for (std::size_t i = 0; i < c1->bindings.size(); ++i)
        CHECK(alpha_eq(st1.sub.apply(c1->bindings[i].second),
                       st2.sub.apply(c2->bindings[i].second)));
}

TEST_CASE("sequential top-level bindings see earlier generalized schemes") {
    std::string src =
        "let id = fun x -> x\n"
        "let both = (id 1, id true)";
    CHECK(scheme_text(src, "both") == "int * bool");
}
