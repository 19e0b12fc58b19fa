#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "eff/pretty.hpp"
#include "eff/session.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatic = 1;
constexpr int kExitIo = 2;
constexpr int kExitStuck = 3;
constexpr int kExitFuel = 4;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

void print_diagnostics(const std::vector<eff::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << eff::render(d) << "\n";
}

int cmd_check(const std::vector<std::string>& files, const eff::SessionConfig& cfg) {
    int status = kExitOk;
    for (const auto& path : files) {
        std::string src;
        if (!read_file(path, src)) {
            std::cerr << "error [io]: cannot read '" << path << "'\n";
            return kExitIo;
        }
        eff::CheckOutput out = eff::check_source(src, cfg);
        if (!out.ok) {
            print_diagnostics(out.diagnostics);
            status = kExitStatic;
            continue;
        }
        for (const auto& line : out.lines) std::cout << line << "\n";
    }
    return status;
}

int cmd_run(const std::vector<std::string>& files, const eff::SessionConfig& cfg) {
    for (const auto& path : files) {
        std::string src;
        if (!read_file(path, src)) {
            std::cerr << "error [io]: cannot read '" << path << "'\n";
            return kExitIo;
        }
        eff::RunOutput out = eff::run_source(src, cfg);
        if (!out.check.ok) {
            print_diagnostics(out.check.diagnostics);
            return kExitStatic;
        }
        for (const auto& line : out.trace_lines) std::cout << line << "\n";
        if (!out.outcome) continue;
        std::cout << eff::outcome_text(*out.outcome) << "\n";
        switch (out.outcome->kind) {
            case eff::Outcome::Kind::Stuck: return kExitStuck;
            case eff::Outcome::Kind::OutOfFuel: return kExitFuel;
            default: break;
        }
    }
    return kExitOk;
}

int cmd_repl(const eff::SessionConfig& cfg) {
    eff::Session session(cfg);
    bool tty = isatty(fileno(stdin));
    std::string line;
    while (true) {
        if (tty) std::cout << "> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        std::string trimmed = line;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
            trimmed.erase(trimmed.begin());
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        if (trimmed.empty()) continue;
        if (trimmed == ":quit" || trimmed == ":q") break;

        eff::Session::EntryResult res;
        if (trimmed.rfind(":type ", 0) == 0) {
            res = session.type_of(trimmed.substr(6));
        } else if (trimmed.rfind(":trace ", 0) == 0) {
            res = session.trace_of(trimmed.substr(7));
        } else if (!trimmed.empty() && trimmed[0] == ':') {
            std::cerr << "unknown command '" << trimmed << "'\n";
            continue;
        } else {
            res = session.handle_line(trimmed);
        }
        print_diagnostics(res.diagnostics);
        for (const auto& out : res.output) std::cout << out << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"interpreter and typechecker for a small language with "
                 "polymorphic algebraic effects and handlers"};
    app.require_subcommand(1);

    bool no_sr = false;
    bool effects = false;
    bool trace = false;
    long long max_steps = 1000000;
    if (const char* env = std::getenv("EFFLANG_MAX_STEPS")) {
        try {
            max_steps = std::stoll(env);
        } catch (...) {
        }
    }
    std::vector<std::string> files;

    app.add_flag("--no-sr", no_sr,
                 "do not enforce the signature restriction at declarations");
    app.add_flag("--effects", effects, "check the effect-annotated type system");
    app.add_flag("--trace", trace, "print one line per evaluation step");
    app.add_option("--max-steps", max_steps, "evaluation fuel");

    CLI::App* check = app.add_subcommand("check", "typecheck files");
    check->add_option("files", files, "input .eff files")->required();
    CLI::App* run_cmd = app.add_subcommand("run", "typecheck and evaluate files");
    run_cmd->add_option("files", files, "input .eff files")->required();
    CLI::App* repl = app.add_subcommand("repl", "interactive session");

    CLI11_PARSE(app, argc, argv);

    eff::SessionConfig cfg;
    cfg.sr_enabled = !no_sr;
    cfg.effects_mode = effects;
    cfg.trace = trace;
    cfg.max_steps = max_steps;

    if (check->parsed()) return cmd_check(files, cfg);
    if (run_cmd->parsed()) return cmd_run(files, cfg);
    if (repl->parsed()) return cmd_repl(cfg);
    return kExitOk;
}
