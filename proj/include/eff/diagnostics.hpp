#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "eff/syntax.hpp"

namespace eff {

enum class Severity { Error, Warning };

// Phases double as the structured reason tag, e.g. SR violations carry
// Phase::SignatureRestriction plus the formatted violation detail.
enum class Phase {
    Lexer,
    Parser,
    Desugar,
    SignatureRestriction,
    Type,
    EffectType,
    EffectGate,
    Io,
};

struct Diagnostic {
    Severity severity = Severity::Error;
    Phase phase = Phase::Parser;
    Span span;
    std::string message;
    std::string detail;    // optional structured reason (SR violation etc.)
};

std::string phase_name(Phase p);
std::string render(const Diagnostic& d);

// Internal unwinding for checker errors; caught at phase boundaries and
// converted to Diagnostic lists.
struct CheckError : std::runtime_error {
    Diagnostic diag;
    explicit CheckError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

}  // namespace eff
