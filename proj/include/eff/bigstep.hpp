#pragma once

#include "eff/eval.hpp"
#include "eff/syntax.hpp"

namespace eff {

// Independent big-step evaluator for differential testing: recursive
// evaluation where operation requests bubble upward carrying a term-building
// continuation; at a handle node the continuation is reified as a real term
// fun y -> handle C[y] with H. No evaluation-context data structure, no
// op-free search.
Outcome bigstep_oracle(const TermPtr& m, long long fuel);

}  // namespace eff
