#pragma once

#include <string>

#include "eff/syntax.hpp"

namespace eff {

// Surface-syntax printers; output re-parses to an alpha-equivalent term/type.
std::string pretty(const TermPtr& t);
std::string pretty(const TypePtr& t);
std::string pretty(const Scheme& s);
std::string pretty(const OpSignature& sig);

// Scheme/type printing with quantified and remaining variables renamed to
// a, b, c, ... in order of appearance (used for user-facing schemes).
std::string pretty_normalized(const Scheme& s);

// Result-value printing: lists print in literal syntax [v1; v2; ...],
// functions print as <fun>.
std::string show_value(const TermPtr& v);

}  // namespace eff
