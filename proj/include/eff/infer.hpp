#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eff/parser.hpp"
#include "eff/polarity.hpp"
#include "eff/unify.hpp"

namespace eff {

struct CtxBinding {
    std::string name;
    Scheme scheme;
};

class TypingContext {
  public:
    void push(std::string name, Scheme s) {
        bindings_.push_back(CtxBinding{std::move(name), std::move(s)});
    }
    void pop(std::size_t n = 1) { bindings_.resize(bindings_.size() - n); }
    const Scheme* lookup(const std::string& name) const {
        for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it)
            if (it->name == name) return &it->scheme;
        return nullptr;
    }
    std::set<int> free_type_vars(const Substitution& sub) const {
        std::set<int> out;
        for (const auto& b : bindings_) {
            std::set<int> f = ftv(sub.apply(b.scheme.body));
            for (int q : b.scheme.quantified) f.erase(q);
            out.insert(f.begin(), f.end());
        }
        return out;
    }
    const std::vector<CtxBinding>& bindings() const { return bindings_; }

  private:
    std::vector<CtxBinding> bindings_;
};

// One state per checking session: fresh-variable supply, accumulated
// substitution, signature environment, mode flags.
struct InferenceState {
    VarSupply supply;
    Substitution sub;
    SignatureEnv sigs;
    bool sr_enabled = true;
    bool effect_mode = false;

    TypePtr fresh_uvar(std::string hint = "") {
        int id = supply.fresh();
        return ty_var(id, false, std::move(hint));
    }
    TypePtr fresh_rigid(std::string hint) {
        int id = supply.fresh();
        return ty_var(id, true, std::move(hint));
    }
};

Scheme mono(TypePtr t);

TypePtr instantiate(InferenceState& st, const Scheme& s);
// Domain and codomain instantiated simultaneously with shared fresh variables.
std::pair<TypePtr, TypePtr> instantiate(InferenceState& st, const OpSignature& sig);

// Quantifies the unification variables free in t but not in ctx, promoting
// them to rigid variables (no value restriction).
Scheme generalize(InferenceState& st, const TypingContext& ctx, TypePtr t);

TypePtr infer_term(InferenceState& st, TypingContext& ctx, const TermPtr& m);
TypePtr infer_handler(InferenceState& st, TypingContext& ctx, const Handler& h,
                      TypePtr input, Span sp);

// let binding: infer, optionally check a scheme ascription (skolemize +
// unify + escape check), generalize.
Scheme infer_binding(InferenceState& st, TypingContext& ctx, const std::string& name,
                     const std::optional<Scheme>& ann, const TermPtr& bound, Span sp);

struct CheckedProgram {
    std::vector<std::pair<std::string, Scheme>> bindings;
    std::optional<Scheme> main_scheme;
};

// SR mode checks every declaration against the signature restriction before
// any inference runs; SR violations are batched.
std::optional<CheckedProgram> check_program(InferenceState& st, const Program& p,
                                            std::vector<Diagnostic>& diags);

// Appearance-ordered, deduplicated variable occurrences of a type.
std::vector<TyVar> collect_tyvars(const TypePtr& t);

// Rejects effect-annotated arrows outside effect mode.
void ensure_plain(const TypePtr& t, Span sp);

// Fills in latent effect {} on every unannotated arrow (effect mode).
TypePtr with_default_effects(const TypePtr& t);

}  // namespace eff
