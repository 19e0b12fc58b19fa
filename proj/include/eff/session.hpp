#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eff/effects.hpp"
#include "eff/eval.hpp"
#include "eff/infer.hpp"
#include "eff/parser.hpp"

namespace eff {

struct SessionConfig {
    bool sr_enabled = true;
    bool effects_mode = false;
    long long max_steps = 1000000;
    bool trace = false;
};

struct CheckOutput {
    bool ok = false;
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> lines;          // "name : scheme" per binding (+ main)
    std::optional<Scheme> main_scheme;       // plain mode
    std::optional<TypePtr> main_type;        // effect mode
    Effect main_effect;                      // effect mode
    Effect program_effect;                   // effect mode
    std::optional<Program> program;
};

struct RunOutput {
    CheckOutput check;
    std::optional<Outcome> outcome;
    std::vector<std::string> trace_lines;
};

// Wraps top-level bindings around main: let b1 = e1 in ... main.
TermPtr link_program(const Program& p);

// Drops every effect annotation (signatures, let ascriptions, lambda binder
// annotations), yielding a plain-mode program.
Program erase_effect_annotations(const Program& p);

CheckOutput check_source(const std::string& src, const SessionConfig& cfg);
RunOutput run_source(const std::string& src, const SessionConfig& cfg);

// Interactive session: accumulated declarations and evaluated bindings.
// Declarations and bindings entered one at a time produce the same schemes as
// the equivalent batch program.
class Session {
  public:
    explicit Session(SessionConfig cfg);

    struct EntryResult {
        bool ok = false;
        std::vector<Diagnostic> diagnostics;
        std::vector<std::string> output;
    };

    // `effect ...`, `let ...`, or an expression (typecheck + evaluate).
    EntryResult handle_line(const std::string& line);
    // :type — scheme only, no evaluation
    EntryResult type_of(const std::string& expr_src);
    // :trace — evaluate with a printed trace
    EntryResult trace_of(const std::string& expr_src);

    const SessionConfig& config() const { return cfg_; }

  private:
    SessionConfig cfg_;
    InferenceState st_;
    TypingContext ctx_;
    std::vector<std::pair<std::string, TermPtr>> values_;   // evaluated bindings
    std::optional<EffectChecker> eff_;

    EntryResult eval_expr(const TermPtr& expr, bool with_trace);
    TermPtr close_over_bindings(TermPtr expr) const;
    std::optional<Scheme> check_expr(const TermPtr& expr, EntryResult& res,
                                     Effect* eff_out);
};

}  // namespace eff
