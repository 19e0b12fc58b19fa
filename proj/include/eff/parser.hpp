#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eff/diagnostics.hpp"
#include "eff/syntax.hpp"

namespace eff {

struct OpDecl {
    std::string name;
    OpSignature sig;
    Span span;
};

struct TopBinding {
    std::string name;
    std::optional<Scheme> ann;
    TermPtr term;
    Span span;
};

// A program: operation declarations + top-level let bindings + an optional
// main expression. Terms are fully desugared.
struct Program {
    std::vector<OpDecl> decls;
    std::vector<TopBinding> bindings;
    std::optional<TermPtr> main;
};

struct ParseResult {
    std::optional<Program> program;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return program.has_value(); }
};

ParseResult parse_program(const std::string& src);

// One REPL input line: a declaration, a binding, or a bare expression.
struct ReplEntry {
    enum class Kind { Decl, Binding, Expr } kind;
    OpDecl decl;
    TopBinding binding;
    TermPtr expr;
};

struct ReplParseResult {
    std::optional<ReplEntry> entry;
    std::vector<Diagnostic> diagnostics;
};

ReplParseResult parse_repl_entry(const std::string& src);

// Parses a bare expression (test convenience).
TermPtr parse_expr_or_throw(const std::string& src);

}  // namespace eff
