#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eff/infer.hpp"

namespace eff {

bool subeffect(const Effect& e1, const Effect& e2);
std::string effect_to_string(const Effect& e);

// Checking-direction realization of the type-and-effect system: synthesizes a
// type and a (minimal sound) effect bottom-up, pushes annotation types into
// lambdas (subeffecting at latent positions), operation-call arguments,
// branches and data constructors. Generalization at let is gated by SR(eps)
// unless the bound expression is a syntactic value.
class EffectChecker {
  public:
    // st.effect_mode must be true and st.sigs must hold effect-normalized
    // signatures.
    explicit EffectChecker(InferenceState& st) : st_(st), sr_(st.sigs) {}

    std::pair<TypePtr, Effect> infer(TypingContext& ctx, const TermPtr& m);

    // Checks m against an expected type; returns the synthesized effect.
    Effect check_against(TypingContext& ctx, const TermPtr& m, const TypePtr& expected);

    // Spec operation: m checks at type a with effect budget eps.
    void check_eff(TypingContext& ctx, const TermPtr& m, const TypePtr& a,
                   const Effect& eps);

    // Spec operation: handler checking with all four indices given.
    void check_eff_handler(TypingContext& ctx, const Handler& h, const TypePtr& in,
                           const Effect& in_eff, const TypePtr& out,
                           const Effect& out_eff, Span sp);

    // let binding with the Te-Gen gate; returns the binding's scheme and the
    // bound expression's effect.
    std::pair<Scheme, Effect> check_binding(TypingContext& ctx, const std::string& name,
                                            const std::optional<Scheme>& ann,
                                            const TermPtr& bound, Span sp);

    SrEffectChecker& sr() { return sr_; }

  private:
    InferenceState& st_;
    SrEffectChecker sr_;

    std::pair<TypePtr, Effect> infer_handle(TypingContext& ctx, const THandle& n,
                                            Span sp);
    Effect run_clauses(TypingContext& ctx, const Handler& h, const TypePtr& in,
                       const TypePtr& out, const Effect& out_eff, Span sp,
                       std::vector<std::pair<std::string, int>>* skolems);
};

struct EffCheckedProgram {
    std::vector<std::pair<std::string, Scheme>> bindings;
    std::vector<Effect> binding_effects;
    std::optional<TypePtr> main_type;
    Effect main_effect;
    Effect program_effect;
};

std::optional<EffCheckedProgram> check_program_effects(InferenceState& st,
                                                       const Program& p,
                                                       std::vector<Diagnostic>& diags);

}  // namespace eff
