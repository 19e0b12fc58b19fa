#pragma once

#include "eff/diagnostics.hpp"
#include "eff/syntax.hpp"

namespace eff {

// Idempotent substitution from unification variables to types: no mapped
// variable occurs in any image, so applying twice equals applying once.
class Substitution {
  public:
    TypePtr apply(const TypePtr& t) const { return subst_type(t, map_); }
    Scheme apply(const Scheme& s) const { return Scheme{s.quantified, apply(s.body)}; }

    // Root resolution: follows a variable to its image (images are fully
    // applied, so a single lookup suffices).
    TypePtr resolve(const TypePtr& t) const;

    bool maps(int var) const { return map_.count(var) > 0; }
    const TypeSubstMap& raw() const { return map_; }

    // Composes {var -> t}; t must be fully applied and pass the occurs check.
    void bind(int var, const TypePtr& t);

  private:
    TypeSubstMap map_;
};

// Extends `sub` with a most general unifier of a and b. Occurs check
// enforced; rigid variables unify only with themselves; arrow effects must be
// equal as sets. Throws CheckError on failure.
void unify(Substitution& sub, const TypePtr& a, const TypePtr& b, Span sp);

}  // namespace eff
