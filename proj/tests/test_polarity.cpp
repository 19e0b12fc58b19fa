#include "doctest.h"

#include "eff/infer.hpp"
#include "eff/parser.hpp"
#include "eff/polarity.hpp"

using namespace eff;

namespace {

OpSignature sig_of(const std::string& decl) {
    auto r = parse_program(decl);
    REQUIRE(r.ok());
    REQUIRE(r.program->decls.size() >= 1);
    return r.program->decls.back().sig;
}

}  // namespace

TEST_CASE("occurrences: a in a list is strictly positive") {
    TypePtr a = ty_var(0, true, "a");
    auto rep = occurrences(0, ty_list(a));
    CHECK(rep.occurs_positive);
    CHECK(rep.occurs_strictly_positive);
    CHECK_FALSE(rep.occurs_negative);
}

TEST_CASE("occurrences: a in a -> a") {
    TypePtr a = ty_var(0, true, "a");
    auto rep = occurrences(0, ty_arrow(a, a));
    CHECK(rep.occurs_positive);
    CHECK(rep.occurs_negative);
    CHECK(rep.occurs_strictly_positive);   // the codomain occurrence
    REQUIRE(rep.all.size() == 2);
    CHECK(rep.all[0].polarity == Polarity::Negative);
    CHECK(rep.all[0].path == "d");
    CHECK(rep.all[1].polarity == Polarity::Positive);
    CHECK(rep.all[1].strictly_positive);
    CHECK(rep.all[1].path == "c");
}

TEST_CASE("occurrences: a in (a -> int) -> a") {
    // Both occurrences are positive (the inner one flips twice); only the
    // codomain one is strictly positive. Hand-derived from the polarity
    // definitions before implementation.
    TypePtr a = ty_var(0, true, "a");
    TypePtr t = ty_arrow(ty_arrow(a, ty_int()), a);
    auto rep = occurrences(0, t);
    CHECK(rep.occurs_positive);
    CHECK_FALSE(rep.occurs_negative);
    CHECK(rep.occurs_strictly_positive);
    REQUIRE(rep.all.size() == 2);
    CHECK(rep.all[0].path == "dd");
    CHECK(rep.all[0].polarity == Polarity::Positive);
    CHECK_FALSE(rep.all[0].strictly_positive);
    CHECK(rep.all[1].path == "c");
    CHECK(rep.all[1].strictly_positive);
}

TEST_CASE("occurrences: absent variable has no flags") {
    auto rep = occurrences(42, ty_arrow(ty_int(), ty_list(ty_bool())));
    CHECK_FALSE(rep.occurs_positive);
    CHECK_FALSE(rep.occurs_negative);
    CHECK_FALSE(rep.occurs_strictly_positive);
    CHECK(rep.all.empty());
}

TEST_CASE("occurrences: products, sums and lists preserve polarity") {
    TypePtr a = ty_var(0, true, "a");
    // a occurs in the domain of an arrow inside a product: negative
    TypePtr t = ty_prod(ty_arrow(a, ty_int()), ty_sum(a, ty_list(a)));
    auto rep = occurrences(0, t);
    CHECK(rep.occurs_negative);
    CHECK(rep.occurs_positive);
    CHECK(rep.occurs_strictly_positive);
    REQUIRE(rep.all.size() == 3);
    CHECK(rep.all[0].path == "ld");
    CHECK(rep.all[1].path == "rl");
    CHECK(rep.all[2].path == "rre");
}

TEST_CASE("signature table verdicts match the paper") {
    CHECK(check_sr(sig_of("effect fail : forall a. unit ~> a")).pass);
    CHECK(check_sr(sig_of("effect raise : forall a. unit ~> a")).pass);
    CHECK(check_sr(sig_of("effect select : forall a. a list ~> a")).pass);
    CHECK(check_sr(
              sig_of("effect satisfy : forall a. (str -> (a * str) + unit) ~> a"))
              .pass);

    SrVerdict get_id = check_sr(sig_of("effect get_id : forall a. unit ~> a -> a"));
    CHECK_FALSE(get_id.pass);
    REQUIRE(get_id.violations.size() == 1);
    CHECK(get_id.violations[0].side == SrSide::Codomain);
    CHECK(get_id.violations[0].offending == "negative");
    CHECK(get_id.violations[0].path == "d");

    SrVerdict remark = check_sr(sig_of("effect op : forall a. ((a -> int) -> a) ~> a"));
    CHECK_FALSE(remark.pass);
    REQUIRE(remark.violations.size() == 1);
    CHECK(remark.violations[0].side == SrSide::Domain);
    CHECK(remark.violations[0].offending == "positive but not strictly positive");
    CHECK(remark.violations[0].path == "dd");
}

TEST_CASE("monomorphic signatures trivially pass") {
    CHECK(check_sr(sig_of("effect put : int ~> unit")).pass);
    CHECK(check_sr(sig_of("effect select : int list ~> int")).pass);
}

TEST_CASE("check_sr is independent of quantifier order") {
    auto s1 = sig_of("effect p : forall a b. (a -> b) ~> b");
    OpSignature s2 = s1;
    std::swap(s2.quantified[0], s2.quantified[1]);
    CHECK(check_sr(s1).pass == check_sr(s2).pass);
}

namespace {

// Effect-mode signature environment: unannotated arrows default to latent {}.
SignatureEnv env_of(const std::string& decls) {
    auto r = parse_program(decls);
    REQUIRE(r.ok());
    SignatureEnv env;
    for (const auto& d : r.program->decls) {
        OpSignature sig = d.sig;
        sig.dom = with_default_effects(sig.dom);
        sig.cod = with_default_effects(sig.cod);
        env[d.name] = sig;
    }
    return env;
}

}  // namespace

TEST_CASE("SR(eps) basics") {
    SignatureEnv env = env_of(
        "effect select : forall a. a list ~> a\n"
        "effect get_id : forall a. unit ~> a -> a");
    SrEffectChecker sr(env);
    CHECK(sr.sr_effect(Effect{}));
    CHECK(sr.sr_effect(Effect{"select"}));
    CHECK_FALSE(sr.sr_effect(Effect{"get_id"}));
    CHECK_FALSE(sr.sr_effect(Effect{"select", "get_id"}));
    CHECK_THROWS_AS(sr.sr_effect(Effect{"nope"}), CheckError);
}

TEST_CASE("SR(eps) third clause: nested effects at strictly positive arrows") {
    // ask's domain holds a function returning the quantified a; that
    // function's latent effect must itself satisfy SR.
    SignatureEnv env = env_of(
        "effect bad : forall a. unit ~> a -> a\n"
        "effect ask : forall a. (unit -{bad}-> a) ~> a\n"
        "effect pure_ask : forall a. (unit -> a) ~> a\n"
        "effect shielded : forall a. ((unit -{bad}-> int) -> a) ~> a");
    SrEffectChecker sr(env);
    CHECK_FALSE(sr.sr_op("ask"));
    CHECK(sr.sr_op("pure_ask"));
    // the bad-latent arrow sits in a domain (not strictly positive) and its
    // codomain does not mention the quantified variable
    CHECK(sr.sr_op("shielded"));
}

TEST_CASE("SR(eps) is coinductive on cyclic signature environments") {
    SignatureEnv env = env_of(
        "effect ping : forall a. (unit -{pong}-> a) ~> a\n"
        "effect pong : forall a. (unit -{ping}-> a) ~> a");
    SrEffectChecker sr(env);
    // greatest fixpoint: assuming both hold is consistent
    CHECK(sr.sr_op("ping"));
    CHECK(sr.sr_op("pong"));

    SignatureEnv env2 = env_of(
        "effect bad : forall a. unit ~> a -> a\n"
        "effect ping : forall a. (unit -{pong}-> a) ~> a\n"
        "effect pong : forall a. (unit -{ping,bad}-> a) ~> a");
    SrEffectChecker sr2(env2);
    CHECK_FALSE(sr2.sr_op("ping"));
    CHECK_FALSE(sr2.sr_op("pong"));
}

TEST_CASE("SR monotone under subset on corpus signatures") {
    SignatureEnv env = env_of(
        "effect select : forall a. a list ~> a\n"
        "effect fail : forall a. unit ~> a\n"
        "effect get_id : forall a. unit ~> a -> a\n"
        "effect put : int ~> unit");
    SrEffectChecker sr(env);
    std::vector<std::string> names = {"select", "fail", "get_id", "put"};
    // every subset pair e' <= e with SR(e) must give SR(e')
    for (unsigned big = 0; big < 16; ++big) {
        Effect e;
        for (unsigned i = 0; i < 4; ++i)
            if (big & (1u << i)) e.insert(names[i]);
        if (!sr.sr_effect(e)) continue;
        for (unsigned small = 0; small < 16; ++small) {
            if ((small & big) != small) continue;
            Effect e2;
            for (unsigned i = 0; i < 4; ++i)
                if (small & (1u << i)) e2.insert(names[i]);
            CHECK(sr.sr_effect(e2));
        }
    }
}
