#include "eff/parser.hpp"

#include <cctype>
#include <map>

namespace eff {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
    Ident,
    IntLit,
    StringLit,
    // keywords
    KwEffect, KwHandle, KwWith, KwReturn, KwResume, KwLet, KwRec, KwFun,
    KwIf, KwThen, KwElse, KwCase, KwOf, KwInl, KwInr, KwNil, KwCons,
    KwForall, KwIn, KwTrue, KwFalse, KwNot, KwMod, KwFst, KwSnd, KwFix,
    KwList, KwBool, KwInt, KwUnit, KwStr,
    // symbols
    Arrow,      // ->
    SigArrow,   // ~>
    EffLBrace,  // -{
    Plus, Minus, Star, Eq, Lt,
    LParen, RParen, LBracket, RBracket, RBrace,
    Comma, Semi, Colon, Bar, Dot, Hash,
    Eof,
};

struct Token {
    Tok kind;
    std::string text;
    long long int_val = 0;
    Span span;
};

const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> kw = {
        {"effect", Tok::KwEffect}, {"handle", Tok::KwHandle}, {"with", Tok::KwWith},
        {"return", Tok::KwReturn}, {"resume", Tok::KwResume}, {"let", Tok::KwLet},
        {"rec", Tok::KwRec},       {"fun", Tok::KwFun},       {"if", Tok::KwIf},
        {"then", Tok::KwThen},     {"else", Tok::KwElse},     {"case", Tok::KwCase},
        {"of", Tok::KwOf},         {"inl", Tok::KwInl},       {"inr", Tok::KwInr},
        {"nil", Tok::KwNil},       {"cons", Tok::KwCons},     {"forall", Tok::KwForall},
        {"in", Tok::KwIn},         {"true", Tok::KwTrue},     {"false", Tok::KwFalse},
        {"not", Tok::KwNot},       {"mod", Tok::KwMod},       {"fst", Tok::KwFst},
        {"snd", Tok::KwSnd},       {"fix", Tok::KwFix},       {"list", Tok::KwList},
        {"bool", Tok::KwBool},     {"int", Tok::KwInt},       {"unit", Tok::KwUnit},
        {"str", Tok::KwStr},
    };
    return kw;
}

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& msg, Span sp) {
        Diagnostic d;
        d.phase = Phase::Lexer;
        d.span = sp;
        d.message = msg;
        throw CheckError(std::move(d));
    }

    Span here() const {
        Span sp;
        sp.line = line;
        sp.column = col;
        sp.begin = sp.end = pos;
        return sp;
    }

    bool done() const { return pos >= src.size(); }
    char peek(std::size_t k = 0) const {
        return pos + k < src.size() ? src[pos + k] : '\0';
    }
    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip_trivia() {
        while (!done()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '-' && peek(1) == '-') {
                while (!done() && peek() != '\n') advance();
            } else if (c == '(' && peek(1) == '*') {
                Span start = here();
                advance();
                advance();
                int depth = 1;
                while (depth > 0) {
                    if (done()) fail("unterminated block comment", start);
                    if (peek() == '(' && peek(1) == '*') {
                        advance();
                        advance();
                        ++depth;
                    } else if (peek() == '*' && peek(1) == ')') {
                        advance();
                        advance();
                        --depth;
                    } else {
                        advance();
                    }
                }
            } else {
                break;
            }
        }
    }

    Token make(Tok kind, Span start, std::string text = {}) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = start;
        t.span.end = pos;
        return t;
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            Span start = here();
            if (done()) {
                out.push_back(make(Tok::Eof, start));
                return out;
            }
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string text;
                while (!done() && std::isdigit(static_cast<unsigned char>(peek())))
                    text += advance();
                Token t = make(Tok::IntLit, start, text);
                t.int_val = std::stoll(text);
                out.push_back(t);
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string text;
                while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                                   peek() == '_' || peek() == '\''))
                    text += advance();
                auto kw = keywords().find(text);
                out.push_back(make(kw == keywords().end() ? Tok::Ident : kw->second,
                                   start, text));
                continue;
            }
            if (c == '"') {
                advance();
                std::string text;
                while (true) {
                    if (done()) fail("unterminated string literal", start);
                    char ch = advance();
                    if (ch == '"') break;
                    if (ch == '\\') {
                        if (done()) fail("unterminated string escape", start);
                        char esc = advance();
                        if (esc == 'n')
                            text += '\n';
                        else if (esc == '"' || esc == '\\')
                            text += esc;
                        else
                            fail("unknown string escape", start);
                    } else {
                        text += ch;
                    }
                }
                out.push_back(make(Tok::StringLit, start, text));
                continue;
            }
            switch (c) {
                case '-':
                    advance();
                    if (peek() == '>') {
                        advance();
                        out.push_back(make(Tok::Arrow, start, "->"));
                    } else if (peek() == '{') {
                        advance();
                        out.push_back(make(Tok::EffLBrace, start, "-{"));
                    } else {
                        out.push_back(make(Tok::Minus, start, "-"));
                    }
                    continue;
                case '~':
                    advance();
                    if (peek() == '>') {
                        advance();
                        out.push_back(make(Tok::SigArrow, start, "~>"));
                        continue;
                    }
                    fail("expected '>' after '~'", start);
                case '+': advance(); out.push_back(make(Tok::Plus, start, "+")); continue;
                case '*': advance(); out.push_back(make(Tok::Star, start, "*")); continue;
                case '=': advance(); out.push_back(make(Tok::Eq, start, "=")); continue;
                case '<': advance(); out.push_back(make(Tok::Lt, start, "<")); continue;
                case '(': advance(); out.push_back(make(Tok::LParen, start, "(")); continue;
                case ')': advance(); out.push_back(make(Tok::RParen, start, ")")); continue;
                case '[': advance(); out.push_back(make(Tok::LBracket, start, "[")); continue;
                case ']': advance(); out.push_back(make(Tok::RBracket, start, "]")); continue;
                case '}': advance(); out.push_back(make(Tok::RBrace, start, "}")); continue;
                case ',': advance(); out.push_back(make(Tok::Comma, start, ",")); continue;
                case ';': advance(); out.push_back(make(Tok::Semi, start, ";")); continue;
                case ':': advance(); out.push_back(make(Tok::Colon, start, ":")); continue;
                case '|': advance(); out.push_back(make(Tok::Bar, start, "|")); continue;
                case '.': advance(); out.push_back(make(Tok::Dot, start, ".")); continue;
                case '#': advance(); out.push_back(make(Tok::Hash, start, "#")); continue;
                default:
                    fail(std::string("unsupported character '") + c + "'", start);
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;
    VarSupply tyvars;
    int clause_counter = 0;

    // innermost continuation binder names; empty string marks a scope (return
    // clause) where resume is illegal
    std::vector<std::string> resume_stack;

    explicit Parser(std::vector<Token> ts) : toks(std::move(ts)) {}

    const Token& peek(std::size_t k = 0) const {
        std::size_t i = pos + k;
        if (i >= toks.size()) i = toks.size() - 1;
        return toks[i];
    }
    bool at(Tok k) const { return peek().kind == k; }
    Token advance() { return toks[pos >= toks.size() ? toks.size() - 1 : pos++]; }

    [[noreturn]] void fail(const std::string& msg, Span sp, Phase phase = Phase::Parser) {
        Diagnostic d;
        d.phase = phase;
        d.span = sp;
        d.message = msg;
        throw CheckError(std::move(d));
    }

    Token expect(Tok k, const std::string& what) {
        if (!at(k)) fail("expected " + what, peek().span);
        return advance();
    }

    std::string expect_ident(const std::string& what) {
        if (!at(Tok::Ident)) fail("expected " + what, peek().span);
        return advance().text;
    }

    // ----- types -----

    struct TyScope {
        std::map<std::string, int> vars;   // surface name -> rigid id
        bool allow_free = false;           // free vars allowed (not for signatures)
    };

    TypePtr parse_type(TyScope& scope) {
        TypePtr left = parse_type_sum(scope);
        if (at(Tok::Arrow)) {
            advance();
            TypePtr right = parse_type(scope);
            return ty_arrow(left, right, std::nullopt);
        }
        if (at(Tok::EffLBrace)) {
            advance();
            Effect eff;
            if (!at(Tok::RBrace)) {
                while (true) {
                    eff.insert(expect_ident("operation name"));
                    if (at(Tok::Comma)) {
                        advance();
                        continue;
                    }
                    break;
                }
            }
            expect(Tok::RBrace, "'}'");
            expect(Tok::Arrow, "'->' after effect annotation");
            TypePtr right = parse_type(scope);
            return ty_arrow(left, right, eff);
        }
        return left;
    }

    TypePtr parse_type_sum(TyScope& scope) {
        TypePtr t = parse_type_prod(scope);
        while (at(Tok::Plus)) {
            advance();
            t = ty_sum(t, parse_type_prod(scope));
        }
        return t;
    }

    TypePtr parse_type_prod(TyScope& scope) {
        TypePtr t = parse_type_postfix(scope);
        while (at(Tok::Star)) {
            advance();
            t = ty_prod(t, parse_type_postfix(scope));
        }
        return t;
    }

    TypePtr parse_type_postfix(TyScope& scope) {
        TypePtr t = parse_type_atom(scope);
        while (at(Tok::KwList)) {
            advance();
            t = ty_list(t);
        }
        return t;
    }

    TypePtr parse_type_atom(TyScope& scope) {
        Span sp = peek().span;
        switch (peek().kind) {
            case Tok::KwBool: advance(); return ty_bool();
            case Tok::KwInt: advance(); return ty_int();
            case Tok::KwUnit: advance(); return ty_unit();
            case Tok::KwStr: advance(); return ty_str();
            case Tok::Ident: {
                std::string name = advance().text;
                auto it = scope.vars.find(name);
                if (it != scope.vars.end()) return ty_var(it->second, true, name);
                if (!scope.allow_free)
                    fail("unbound type variable '" + name + "'", sp);
                int id = tyvars.fresh();
                scope.vars[name] = id;
                return ty_var(id, true, name);
            }
            case Tok::LParen: {
                advance();
                TypePtr t = parse_type(scope);
                expect(Tok::RParen, "')'");
                return t;
            }
            default:
                fail("expected a type", sp);
        }
    }

    // [forall a b .] body
    std::pair<std::vector<int>, TyScope> parse_forall_prefix() {
        TyScope scope;
        std::vector<int> quantified;
        if (at(Tok::KwForall)) {
            advance();
            while (at(Tok::Ident)) {
                std::string name = advance().text;
                if (scope.vars.count(name))
                    fail("duplicate type variable '" + name + "'", peek().span);
                int id = tyvars.fresh();
                scope.vars[name] = id;
                quantified.push_back(id);
            }
            expect(Tok::Dot, "'.' after forall variables");
        }
        return {quantified, scope};
    }

    Scheme parse_scheme() {
        auto [quantified, scope] = parse_forall_prefix();
        TypePtr body = parse_type(scope);
        return Scheme{std::move(quantified), body};
    }

    OpSignature parse_signature(const std::string& op_name) {
        auto [quantified, scope] = parse_forall_prefix();
        // The domain stops at '~>'; arrow-typed domains are parenthesized.
        TypePtr dom = parse_type_sum(scope);
        expect(Tok::SigArrow, "'~>' in operation signature");
        TypePtr cod = parse_type(scope);
        OpSignature sig;
        sig.name = op_name;
        sig.quantified = std::move(quantified);
        sig.dom = dom;
        sig.cod = cod;
        return sig;
    }

    // ----- terms -----

    bool starts_atom() const {
        switch (peek().kind) {
            case Tok::IntLit:
            case Tok::StringLit:
            case Tok::KwTrue:
            case Tok::KwFalse:
            case Tok::KwNil:
            case Tok::KwNot:
            case Tok::Ident:
            case Tok::LParen:
            case Tok::LBracket:
            case Tok::Hash:
                return true;
            default:
                return false;
        }
    }

    TermPtr parse_expr() {
        Span sp = peek().span;
        switch (peek().kind) {
            case Tok::KwFun: {
                advance();
                return parse_fun_tail(sp);
            }
            case Tok::KwFix: {
                advance();
                std::string f = expect_ident("function name after 'fix'");
                std::string x = expect_ident("parameter name in 'fix'");
                expect(Tok::Arrow, "'->'");
                TermPtr body = parse_expr();
                return mk_fix(f, x, body, sp);
            }
            case Tok::KwLet:
                return parse_let_expr();
            case Tok::KwIf: {
                advance();
                TermPtr c = parse_expr();
                expect(Tok::KwThen, "'then'");
                TermPtr t = parse_expr();
                expect(Tok::KwElse, "'else'");
                TermPtr e = parse_expr();
                return mk_if(c, t, e, sp);
            }
            case Tok::KwHandle: {
                advance();
                TermPtr body = parse_expr();
                expect(Tok::KwWith, "'with'");
                HandlerPtr h = parse_handler();
                return mk_handle(body, h, sp);
            }
            case Tok::KwCase:
                return parse_case();
            default:
                return parse_cmp();
        }
    }

    // one or more parameters, each `name` or `(name : type)`
    struct Param {
        std::string name;
        std::optional<TypePtr> ann;
        Span span;
    };

    Param parse_param() {
        Param p;
        p.span = peek().span;
        if (at(Tok::LParen)) {
            advance();
            p.name = expect_ident("parameter name");
            expect(Tok::Colon, "':' in annotated parameter");
            TyScope scope;   // lambda annotations are closed monotypes
            p.ann = parse_type(scope);
            expect(Tok::RParen, "')'");
            return p;
        }
        p.name = expect_ident("parameter name");
        return p;
    }

    TermPtr parse_fun_tail(Span sp) {
        std::vector<Param> params;
        params.push_back(parse_param());
        while (at(Tok::Ident) || at(Tok::LParen)) params.push_back(parse_param());
        expect(Tok::Arrow, "'->' after fun parameters");
        TermPtr body = parse_expr();
        for (auto it = params.rbegin(); it != params.rend(); ++it)
            body = mk_abs(it->name, body, sp, it->ann);
        return body;
    }

    // let [rec] f p1 p2 [: scheme] = e — shared between let-expressions and
    // top-level bindings; returns (name, ann, desugared bound term).
    struct LetHead {
        std::string name;
        std::optional<Scheme> ann;
        TermPtr bound;
        Span span;
    };

    LetHead parse_let_head() {
        Span sp = peek().span;
        expect(Tok::KwLet, "'let'");
        bool is_rec = false;
        if (at(Tok::KwRec)) {
            advance();
            is_rec = true;
        }
        std::string name = expect_ident("binding name");
        std::vector<Param> params;
        while (at(Tok::Ident) || (at(Tok::LParen) && peek(1).kind == Tok::Ident &&
                                  peek(2).kind == Tok::Colon))
            params.push_back(parse_param());
        std::optional<Scheme> ann;
        if (at(Tok::Colon)) {
            advance();
            ann = parse_scheme();
        }
        expect(Tok::Eq, "'=' in let binding");
        TermPtr body = parse_expr();
        if (is_rec) {
            if (params.empty())
                fail("'let rec' requires at least one parameter", sp);
            for (std::size_t i = params.size(); i-- > 1;)
                body = mk_abs(params[i].name, body, sp, params[i].ann);
            body = mk_fix(name, params[0].name, body, sp);
        } else {
            for (std::size_t i = params.size(); i-- > 0;)
                body = mk_abs(params[i].name, body, sp, params[i].ann);
        }
        return LetHead{std::move(name), std::move(ann), body, sp};
    }

    TermPtr parse_let_expr() {
        LetHead head = parse_let_head();
        expect(Tok::KwIn, "'in' after let binding");
        TermPtr rest = parse_expr();
        return mk_let(head.name, head.bound, rest, head.span, head.ann);
    }

    TermPtr parse_case() {
        Span sp = peek().span;
        expect(Tok::KwCase, "'case'");
        TermPtr scrut = parse_expr();
        expect(Tok::KwOf, "'of'");
        if (at(Tok::KwInl)) {
            advance();
            std::string lb = expect_ident("binder after 'inl'");
            expect(Tok::Arrow, "'->'");
            TermPtr lbody = parse_expr();
            expect(Tok::Bar, "'|' between case branches");
            expect(Tok::KwInr, "'inr' branch");
            std::string rb = expect_ident("binder after 'inr'");
            expect(Tok::Arrow, "'->'");
            TermPtr rbody = parse_expr();
            return mk_case_sum(scrut, lb, lbody, rb, rbody, sp);
        }
        if (at(Tok::KwNil)) {
            advance();
            expect(Tok::Arrow, "'->'");
            TermPtr nil_body = parse_expr();
            expect(Tok::Bar, "'|' between case branches");
            expect(Tok::KwCons, "'cons' branch");
            // cons p -> M   or   cons (h, t) -> M
            if (at(Tok::LParen)) {
                Span psp = peek().span;
                advance();
                std::string h = expect_ident("head binder");
                expect(Tok::Comma, "','");
                std::string t = expect_ident("tail binder");
                expect(Tok::RParen, "')'");
                expect(Tok::Arrow, "'->'");
                TermPtr body = parse_expr();
                std::string p = fresh_pair_binder(h, t, body);
                TermPtr expanded =
                    mk_let(h, mk_proj(1, mk_var(p, psp), psp),
                           mk_let(t, mk_proj(2, mk_var(p, psp), psp), body, psp), psp);
                return mk_case_list(scrut, nil_body, p, expanded, sp);
            }
            std::string p = expect_ident("binder after 'cons'");
            expect(Tok::Arrow, "'->'");
            TermPtr body = parse_expr();
            return mk_case_list(scrut, nil_body, p, body, sp);
        }
        fail("expected 'inl' or 'nil' case", peek().span);
    }

    static std::string fresh_pair_binder(const std::string& h, const std::string& t,
                                         const TermPtr& body) {
        std::set<std::string> avoid = free_vars(body);
        avoid.insert(h);
        avoid.insert(t);
        if (!avoid.count("p")) return "p";
        for (int i = 1;; ++i) {
            std::string cand = "p" + std::to_string(i);
            if (!avoid.count(cand)) return cand;
        }
    }

    HandlerPtr parse_handler() {
        std::optional<std::pair<std::string, TermPtr>> ret;
        std::vector<OpClause> clauses;
        Span start = peek().span;
        while (true) {
            if (at(Tok::KwReturn)) {
                Span sp = peek().span;
                advance();
                std::string binder = expect_ident("binder in return clause");
                expect(Tok::Arrow, "'->'");
                resume_stack.push_back("");   // resume illegal here
                TermPtr body = parse_expr();
                resume_stack.pop_back();
                if (ret) fail("duplicate return clause", sp);
                ret = {binder, body};
            } else {
                Span sp = peek().span;
                std::string op = expect_ident("operation name in handler clause");
                std::string arg, cont;
                bool implicit_cont = false;
                if (at(Tok::LParen)) {
                    advance();
                    arg = expect_ident("argument binder");
                    expect(Tok::Comma, "','");
                    cont = expect_ident("continuation binder");
                    expect(Tok::RParen, "')'");
                } else {
                    arg = expect_ident("argument binder");
                    cont = "%resume" + std::to_string(clause_counter++);
                    implicit_cont = true;
                }
                expect(Tok::Arrow, "'->'");
                for (const auto& cl : clauses)
                    if (cl.op == op)
                        fail("duplicate clause for operation '" + op + "'", sp);
                resume_stack.push_back(cont);
                TermPtr body = parse_expr();
                resume_stack.pop_back();
                if (implicit_cont) {
                    // pick a readable continuation name now that the body is known
                    std::set<std::string> avoid = free_vars(body);
                    avoid.insert(arg);
                    std::string k = "k";
                    for (int i = 1; avoid.count(k); ++i) k = "k" + std::to_string(i);
                    body = subst_term(body, cont, mk_var(k));
                    cont = k;
                }
                clauses.push_back(OpClause{op, arg, cont, body});
            }
            if (at(Tok::Bar)) {
                advance();
                continue;
            }
            break;
        }
        if (!ret) fail("handler is missing a return clause", start);
        return mk_handler(ret->first, ret->second, std::move(clauses));
    }

    TermPtr parse_cmp() {
        TermPtr t = parse_add();
        if (at(Tok::Eq) || at(Tok::Lt)) {
            Token op = advance();
            TermPtr rhs = parse_add();
            Constant prim = Constant::prim_op(op.kind == Tok::Eq ? "=" : "<");
            return mk_app(mk_app(mk_const(prim, op.span), t, op.span), rhs, op.span);
        }
        return t;
    }

    TermPtr parse_add() {
        TermPtr t = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            Token op = advance();
            TermPtr rhs = parse_mul();
            Constant prim = Constant::prim_op(op.kind == Tok::Plus ? "+" : "-");
            t = mk_app(mk_app(mk_const(prim, op.span), t, op.span), rhs, op.span);
        }
        return t;
    }

    TermPtr parse_mul() {
        TermPtr t = parse_app();
        while (at(Tok::Star) || at(Tok::KwMod)) {
            Token op = advance();
            TermPtr rhs = parse_app();
            Constant prim = Constant::prim_op(op.kind == Tok::Star ? "*" : "mod");
            t = mk_app(mk_app(mk_const(prim, op.span), t, op.span), rhs, op.span);
        }
        return t;
    }

    TermPtr parse_app() {
        TermPtr head = parse_app_unit();
        // an argument at column 1 starts a new top-level item, never an
        // application continued across lines
        while (starts_atom() && peek().span.column != 1) {
            TermPtr arg = parse_atom();
            head = mk_app(head, arg, head->span);
        }
        return head;
    }

    TermPtr parse_app_unit() {
        Span sp = peek().span;
        switch (peek().kind) {
            case Tok::KwInl: advance(); return mk_inl(parse_atom(), sp);
            case Tok::KwInr: advance(); return mk_inr(parse_atom(), sp);
            case Tok::KwFst: advance(); return mk_proj(1, parse_atom(), sp);
            case Tok::KwSnd: advance(); return mk_proj(2, parse_atom(), sp);
            case Tok::KwCons: advance(); return mk_cons(parse_atom(), sp);
            case Tok::KwResume: {
                advance();
                if (resume_stack.empty() || resume_stack.back().empty())
                    fail("'resume' outside an operation clause", sp, Phase::Desugar);
                TermPtr arg = parse_atom();
                return mk_app(mk_var(resume_stack.back(), sp), arg, sp);
            }
            default:
                return parse_atom();
        }
    }

    TermPtr parse_atom() {
        Span sp = peek().span;
        switch (peek().kind) {
            case Tok::IntLit: {
                Token t = advance();
                return mk_int(t.int_val, sp);
            }
            case Tok::StringLit: {
                Token t = advance();
                return mk_str(t.text, sp);
            }
            case Tok::KwTrue: advance(); return mk_bool(true, sp);
            case Tok::KwFalse: advance(); return mk_bool(false, sp);
            case Tok::KwNil: advance(); return mk_nil(sp);
            case Tok::KwNot: advance(); return mk_const(Constant::prim_op("not"), sp);
            case Tok::Ident: {
                std::string name = advance().text;
                if (auto prim = lookup_prim(name))
                    if (name == "length" || name == "first" || name == "last")
                        return mk_const(*prim, sp);
                return mk_var(name, sp);
            }
            case Tok::Hash: {
                advance();
                std::string op = expect_ident("operation name after '#'");
                expect(Tok::LParen, "'(' in operation call");
                TermPtr arg;
                if (at(Tok::RParen)) {
                    arg = mk_unit(sp);
                } else {
                    arg = parse_expr();
                }
                expect(Tok::RParen, "')'");
                return mk_opcall(op, arg, sp);
            }
            case Tok::LParen: {
                advance();
                if (at(Tok::RParen)) {
                    advance();
                    return mk_unit(sp);
                }
                TermPtr first = parse_expr();
                if (at(Tok::Comma)) {
                    advance();
                    TermPtr second = parse_expr();
                    expect(Tok::RParen, "')'");
                    return mk_pair(first, second, sp);
                }
                expect(Tok::RParen, "')'");
                return first;
            }
            case Tok::LBracket: {
                advance();
                std::vector<TermPtr> elems;
                if (!at(Tok::RBracket)) {
                    while (true) {
                        elems.push_back(parse_expr());
                        if (at(Tok::Semi)) {
                            advance();
                            continue;
                        }
                        break;
                    }
                }
                expect(Tok::RBracket, "']'");
                TermPtr t = mk_nil(sp);
                for (auto it = elems.rbegin(); it != elems.rend(); ++it)
                    t = mk_cons(mk_pair(*it, t, sp), sp);
                return t;
            }
            default:
                fail("expected an expression", sp);
        }
    }

    // ----- top level -----

    Program parse_program_toplevel() {
        Program prog;
        std::set<std::string> op_names;
        while (!at(Tok::Eof)) {
            if (at(Tok::KwEffect)) {
                Span sp = peek().span;
                advance();
                std::string name = expect_ident("operation name");
                if (op_names.count(name))
                    fail("duplicate operation declaration '" + name + "'", sp);
                expect(Tok::Colon, "':' in effect declaration");
                OpSignature sig = parse_signature(name);
                op_names.insert(name);
                prog.decls.push_back(OpDecl{name, std::move(sig), sp});
                continue;
            }
            if (at(Tok::KwLet)) {
                LetHead head = parse_let_head();
                if (at(Tok::KwIn))
                    fail("top-level let binding does not take 'in'", peek().span);
                prog.bindings.push_back(
                    TopBinding{head.name, head.ann, head.bound, head.span});
                continue;
            }
            Span sp = peek().span;
            TermPtr main = parse_expr();
            if (prog.main) fail("program has more than one main expression", sp);
            prog.main = main;
        }
        return prog;
    }

    ReplEntry parse_repl() {
        ReplEntry entry;
        if (at(Tok::KwEffect)) {
            Span sp = peek().span;
            advance();
            std::string name = expect_ident("operation name");
            expect(Tok::Colon, "':' in effect declaration");
            OpSignature sig = parse_signature(name);
            expect(Tok::Eof, "end of input");
            entry.kind = ReplEntry::Kind::Decl;
            entry.decl = OpDecl{name, std::move(sig), sp};
            return entry;
        }
        if (at(Tok::KwLet) && !is_let_expression()) {
            LetHead head = parse_let_head();
            expect(Tok::Eof, "end of input");
            entry.kind = ReplEntry::Kind::Binding;
            entry.binding = TopBinding{head.name, head.ann, head.bound, head.span};
            return entry;
        }
        entry.kind = ReplEntry::Kind::Expr;
        entry.expr = parse_expr();
        expect(Tok::Eof, "end of input");
        return entry;
    }

    // In the REPL, `let x = e` is a binding while `let x = e in b` is an
    // expression; scan ahead for a top-level 'in'.
    bool is_let_expression() const {
        int depth = 0;
        int lets = 1;
        for (std::size_t i = pos + 1; i < toks.size(); ++i) {
            switch (toks[i].kind) {
                case Tok::LParen:
                case Tok::LBracket:
                    ++depth;
                    break;
                case Tok::RParen:
                case Tok::RBracket:
                    --depth;
                    break;
                case Tok::KwLet:
                    if (depth == 0) ++lets;
                    break;
                case Tok::KwIn:
                    if (depth == 0) {
                        --lets;
                        if (lets == 0) return true;
                    }
                    break;
                default:
                    break;
            }
        }
        return false;
    }
};

}  // namespace

ParseResult parse_program(const std::string& src) {
    ParseResult res;
    try {
        Lexer lexer(src);
        Parser parser(lexer.run());
        res.program = parser.parse_program_toplevel();
    } catch (const CheckError& e) {
        res.diagnostics.push_back(e.diag);
    }
    return res;
}

ReplParseResult parse_repl_entry(const std::string& src) {
    ReplParseResult res;
    try {
        Lexer lexer(src);
        Parser parser(lexer.run());
        res.entry = parser.parse_repl();
    } catch (const CheckError& e) {
        res.diagnostics.push_back(e.diag);
    }
    return res;
}

TermPtr parse_expr_or_throw(const std::string& src) {
    Lexer lexer(src);
    Parser parser(lexer.run());
    TermPtr t = parser.parse_expr();
    if (!parser.at(Tok::Eof)) parser.fail("trailing input", parser.peek().span);
    return t;
}

}  // namespace eff
