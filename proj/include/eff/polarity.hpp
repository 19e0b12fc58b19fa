#pragma once

#include <map>
#include <string>
#include <vector>

#include "eff/diagnostics.hpp"
#include "eff/syntax.hpp"

namespace eff {

enum class Polarity { Positive, Negative };

// One occurrence of a variable in a type. The path is a string of position
// steps: d = arrow domain, c = arrow codomain, l/r = product or sum
// component, e = list element.
struct Occurrence {
    Polarity polarity;
    bool strictly_positive;   // meaningful only for positive occurrences
    std::string path;
};

struct OccurrenceReport {
    bool occurs_positive = false;
    bool occurs_negative = false;
    bool occurs_strictly_positive = false;
    std::vector<Occurrence> all;

    std::vector<std::string> positive_paths() const;
    std::vector<std::string> negative_paths() const;
    std::vector<std::string> strictly_positive_paths() const;
};

OccurrenceReport occurrences(int var_id, const TypePtr& t);

enum class SrSide { Domain, Codomain };

struct SrViolation {
    int var_id;
    std::string var_name;
    SrSide side;
    std::string offending;   // "negative" or "positive but not strictly positive"
    std::string path;
};

struct SrVerdict {
    bool pass = true;
    std::vector<SrViolation> violations;

    std::string describe() const;
};

// Signature restriction: every quantified variable occurs only negatively or
// strictly positively in the domain and only positively in the codomain.
SrVerdict check_sr(const OpSignature& sig);

// SR(eps) of the effect system: check_sr conditions plus, for every function
// type C ->{eps'} D at a strictly positive position of the domain whose
// codomain D mentions a quantified variable, SR(eps'). Cyclic signature
// references are resolved coinductively (greatest fixpoint), memoized per
// checker.
class SrEffectChecker {
  public:
    explicit SrEffectChecker(const SignatureEnv& env) : env_(env) {}

    // Throws CheckError when eps names an undeclared operation.
    bool sr_effect(const Effect& eps);
    bool sr_op(const std::string& op);

  private:
    const SignatureEnv& env_;
    std::map<std::string, bool> verdicts_;

    void solve_reachable(const std::string& root);
};

}  // namespace eff
