#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace eff {

// ---------------------------------------------------------------------------
// Source positions
// ---------------------------------------------------------------------------

struct Span {
    int line = 0;             // 1-based; 0 marks a synthetic node
    int column = 0;
    std::size_t begin = 0;    // byte offsets into the source buffer
    std::size_t end = 0;

    bool synthetic() const { return line == 0; }
};

// ---------------------------------------------------------------------------
// Types
//
// Quantifiers never appear inside a Type; polymorphism lives in Scheme and
// OpSignature (prenex discipline). Arrows carry an effect set only when a
// program is processed in effect mode.
// ---------------------------------------------------------------------------

using Effect = std::set<std::string>;

struct Type;
using TypePtr = std::shared_ptr<const Type>;

enum class BaseType { Bool, Int, Unit, Str };

struct TyVar {
    int id = 0;
    bool rigid = false;       // rigid = skolem/quantified; otherwise unification
    std::string hint;         // display name, e.g. "a"
};
struct TyBase {
    BaseType base;
};
struct TyArrow {
    TypePtr dom, cod;
    std::optional<Effect> eff;   // engaged iff effect mode
};
struct TyProd {
    TypePtr left, right;
};
struct TySum {
    TypePtr left, right;
};
struct TyList {
    TypePtr elem;
};

struct Type {
    std::variant<TyVar, TyBase, TyArrow, TyProd, TySum, TyList> node;
};

TypePtr ty_var(int id, bool rigid, std::string hint = {});
TypePtr ty_base(BaseType b);
TypePtr ty_bool();
TypePtr ty_int();
TypePtr ty_unit();
TypePtr ty_str();
TypePtr ty_arrow(TypePtr dom, TypePtr cod, std::optional<Effect> eff = std::nullopt);
TypePtr ty_prod(TypePtr l, TypePtr r);
TypePtr ty_sum(TypePtr l, TypePtr r);
TypePtr ty_list(TypePtr elem);

// A type scheme forall a1 ... an. body; `quantified` holds ids of rigid
// variables occurring in `body`.
struct Scheme {
    std::vector<int> quantified;
    TypePtr body;
};

// Closed signature forall a1 ... an. dom ~> cod of a declared operation.
struct OpSignature {
    std::string name;
    std::vector<int> quantified;   // rigid ids bound in dom/cod
    TypePtr dom, cod;
};

using SignatureEnv = std::map<std::string, OpSignature>;

// ---------------------------------------------------------------------------
// Constants and their table: ty(c) is first-order (iota1 -> ... -> iota_n+1),
// zeta gives the partial denotation on constant pairs. Partially applied
// primitives are themselves constants.
// ---------------------------------------------------------------------------

struct Constant {
    enum class Tag { Int, Bool, Str, Unit, Prim };
    Tag tag = Tag::Unit;
    long long int_val = 0;
    bool bool_val = false;
    std::string str_val;
    std::string prim;                 // primitive name when tag == Prim
    std::vector<Constant> args;       // partial application arguments

    static Constant of_int(long long v);
    static Constant of_bool(bool v);
    static Constant of_str(std::string v);
    static Constant unit();
    static Constant prim_op(std::string name);

    bool operator==(const Constant& other) const;
};

// ty(c); in effect mode arrows carry latent effect {}.
TypePtr const_type(const Constant& c, bool effect_mode);

// zeta(c1, c2): defined iff ty(c1) = iota -> A and ty(c2) = iota.
std::optional<Constant> zeta(const Constant& fn, const Constant& arg);

// Named primitive lookup ("+", "mod", "length", ...).
std::optional<Constant> lookup_prim(const std::string& name);
const std::vector<std::string>& prim_names();

std::string show_constant(const Constant& c);

// ---------------------------------------------------------------------------
// Terms and handlers
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Handler;
using HandlerPtr = std::shared_ptr<const Handler>;

struct TVar {
    std::string name;
};
struct TConst {
    Constant c;
};
struct TAbs {
    std::string binder;
    std::optional<TypePtr> binder_ann;    // closed monotype annotation
    TermPtr body;
};
struct TApp {
    TermPtr fn, arg;
};
struct TOpCall {
    std::string op;
    TermPtr arg;
};
struct THandle {
    TermPtr body;
    HandlerPtr handler;
};
struct TLet {
    std::string binder;
    std::optional<Scheme> ann;            // optional ascription
    TermPtr bound, body;
};
struct TPair {
    TermPtr left, right;
};
struct TProj {
    int index = 1;                        // 1 or 2
    TermPtr pair;
};
struct TInl {
    TermPtr value;
};
struct TInr {
    TermPtr value;
};
struct TCaseSum {
    TermPtr scrutinee;
    std::string left_binder;
    TermPtr left_body;
    std::string right_binder;
    TermPtr right_body;
};
struct TNil {};
struct TCons {
    TermPtr pair;                         // (head, tail)
};
struct TCaseList {
    TermPtr scrutinee;
    TermPtr nil_body;
    std::string cons_binder;              // bound to the (head, tail) pair
    TermPtr cons_body;
};
struct TFix {
    std::string fn_binder;
    std::string arg_binder;
    TermPtr body;
};
struct TIf {
    TermPtr cond, then_branch, else_branch;
};

struct Term {
    std::variant<TVar, TConst, TAbs, TApp, TOpCall, THandle, TLet, TPair, TProj,
                 TInl, TInr, TCaseSum, TNil, TCons, TCaseList, TFix, TIf>
        node;
    Span span;
};

// One return clause plus at most one operation clause per op name.
struct OpClause {
    std::string op;
    std::string arg_binder;
    std::string cont_binder;
    TermPtr body;
};

struct Handler {
    std::string return_binder;
    TermPtr return_body;
    std::vector<OpClause> op_clauses;

    const OpClause* find(const std::string& op) const;
};

HandlerPtr mk_handler(std::string ret_binder, TermPtr ret_body,
                      std::vector<OpClause> clauses);

TermPtr mk_var(std::string name, Span sp = {});
TermPtr mk_const(Constant c, Span sp = {});
TermPtr mk_int(long long v, Span sp = {});
TermPtr mk_bool(bool v, Span sp = {});
TermPtr mk_str(std::string v, Span sp = {});
TermPtr mk_unit(Span sp = {});
TermPtr mk_abs(std::string binder, TermPtr body, Span sp = {},
               std::optional<TypePtr> ann = std::nullopt);
TermPtr mk_app(TermPtr fn, TermPtr arg, Span sp = {});
TermPtr mk_opcall(std::string op, TermPtr arg, Span sp = {});
TermPtr mk_handle(TermPtr body, HandlerPtr h, Span sp = {});
TermPtr mk_let(std::string binder, TermPtr bound, TermPtr body, Span sp = {},
               std::optional<Scheme> ann = std::nullopt);
TermPtr mk_pair(TermPtr l, TermPtr r, Span sp = {});
TermPtr mk_proj(int index, TermPtr pair, Span sp = {});
TermPtr mk_inl(TermPtr v, Span sp = {});
TermPtr mk_inr(TermPtr v, Span sp = {});
TermPtr mk_case_sum(TermPtr scrut, std::string lb, TermPtr lbody,
                    std::string rb, TermPtr rbody, Span sp = {});
TermPtr mk_nil(Span sp = {});
TermPtr mk_cons(TermPtr pair, Span sp = {});
TermPtr mk_case_list(TermPtr scrut, TermPtr nil_body, std::string cons_binder,
                     TermPtr cons_body, Span sp = {});
TermPtr mk_fix(std::string f, std::string x, TermPtr body, Span sp = {});
TermPtr mk_if(TermPtr c, TermPtr t, TermPtr e, Span sp = {});

// Builds the term form of an integer list literal: cons (a, cons (b, nil)).
TermPtr mk_int_list(const std::vector<long long>& xs);

// ---------------------------------------------------------------------------
// Variables, substitution, alpha equivalence
// ---------------------------------------------------------------------------

using TypeSubstMap = std::map<int, TypePtr>;

std::set<int> ftv(const TypePtr& t);
std::set<int> ftv(const Scheme& s);
std::set<int> ftv(const OpSignature& sig);

TypePtr subst_type(const TypePtr& t, const TypeSubstMap& s);

std::set<std::string> free_vars(const TermPtr& t);

// Capture-avoiding substitution of `replacement` for variable `name`.
TermPtr subst_term(const TermPtr& t, const std::string& name,
                   const TermPtr& replacement);

bool is_value(const TermPtr& t);

bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const TypePtr& a, const TypePtr& b);
bool alpha_eq(const Scheme& a, const Scheme& b);

// Structural equality on types (variable ids must match exactly).
bool type_eq(const TypePtr& a, const TypePtr& b);
bool term_eq(const TermPtr& a, const TermPtr& b);

// Fresh id supply for type variables; one per checking session.
class VarSupply {
  public:
    int fresh() { return next_++; }

  private:
    int next_ = 0;
};

}  // namespace eff
