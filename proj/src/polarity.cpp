#include "eff/polarity.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace eff {

namespace {

void walk(int var_id, const TypePtr& t, Polarity pol, bool strict,
          const std::string& path, OccurrenceReport& out) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyVar>) {
                if (n.id != var_id) return;
                Occurrence occ{pol, pol == Polarity::Positive && strict, path};
                if (pol == Polarity::Positive) {
                    out.occurs_positive = true;
                    if (occ.strictly_positive) out.occurs_strictly_positive = true;
                } else {
                    out.occurs_negative = true;
                }
                out.all.push_back(std::move(occ));
            } else if constexpr (std::is_same_v<N, TyArrow>) {
                Polarity flipped = pol == Polarity::Positive ? Polarity::Negative
                                                             : Polarity::Positive;
                walk(var_id, n.dom, flipped, false, path + "d", out);
                walk(var_id, n.cod, pol, strict, path + "c", out);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                walk(var_id, n.left, pol, strict, path + "l", out);
                walk(var_id, n.right, pol, strict, path + "r", out);
            } else if constexpr (std::is_same_v<N, TyList>) {
                walk(var_id, n.elem, pol, strict, path + "e", out);
            }
        },
        t->node);
}

std::string var_display(const TypePtr& t, int id) {
    std::string name;
    std::function<void(const TypePtr&)> find = [&](const TypePtr& u) {
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, TyVar>) {
                    if (n.id == id && name.empty())
                        name = n.hint.empty() ? "a" : n.hint;
                } else if constexpr (std::is_same_v<N, TyArrow>) {
                    find(n.dom);
                    find(n.cod);
                } else if constexpr (std::is_same_v<N, TyProd> ||
                                     std::is_same_v<N, TySum>) {
                    find(n.left);
                    find(n.right);
                } else if constexpr (std::is_same_v<N, TyList>) {
                    find(n.elem);
                }
            },
            u->node);
    };
    find(t);
    return name.empty() ? "a" : name;
}

}  // namespace

std::vector<std::string> OccurrenceReport::positive_paths() const {
    std::vector<std::string> out;
    for (const auto& o : all)
        if (o.polarity == Polarity::Positive) out.push_back(o.path);
    return out;
}
std::vector<std::string> OccurrenceReport::negative_paths() const {
    std::vector<std::string> out;
    for (const auto& o : all)
        if (o.polarity == Polarity::Negative) out.push_back(o.path);
    return out;
}
std::vector<std::string> OccurrenceReport::strictly_positive_paths() const {
    std::vector<std::string> out;
    for (const auto& o : all)
        if (o.strictly_positive) out.push_back(o.path);
    return out;
}

OccurrenceReport occurrences(int var_id, const TypePtr& t) {
    OccurrenceReport out;
    walk(var_id, t, Polarity::Positive, true, "", out);
    return out;
}

std::string SrVerdict::describe() const {
    if (pass) return "pass";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        const auto& v = violations[i];
        if (i) os << "; ";
        os << "'" << v.var_name << "' has a " << v.offending << " occurrence in the "
           << (v.side == SrSide::Domain ? "domain" : "codomain");
        if (!v.path.empty()) os << " at path '" << v.path << "'";
    }
    return os.str();
}

SrVerdict check_sr(const OpSignature& sig) {
    SrVerdict verdict;
    for (int q : sig.quantified) {
        OccurrenceReport dom = occurrences(q, sig.dom);
        for (const auto& occ : dom.all) {
            // domain occurrences must be negative or strictly positive
            if (occ.polarity == Polarity::Positive && !occ.strictly_positive) {
                verdict.violations.push_back(
                    SrViolation{q, var_display(sig.dom, q), SrSide::Domain,
                                "positive but not strictly positive", occ.path});
            }
        }
        OccurrenceReport cod = occurrences(q, sig.cod);
        for (const auto& occ : cod.all) {
            // codomain occurrences must be positive
            if (occ.polarity == Polarity::Negative) {
                verdict.violations.push_back(SrViolation{q, var_display(sig.cod, q),
                                                         SrSide::Codomain, "negative",
                                                         occ.path});
            }
        }
    }
    verdict.pass = verdict.violations.empty();
    return verdict;
}

namespace {

void collect_effects(const TypePtr& t, Effect& out) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyArrow>) {
                if (n.eff) out.insert(n.eff->begin(), n.eff->end());
                collect_effects(n.dom, out);
                collect_effects(n.cod, out);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                collect_effects(n.left, out);
                collect_effects(n.right, out);
            } else if constexpr (std::is_same_v<N, TyList>) {
                collect_effects(n.elem, out);
            }
        },
        t->node);
}

// Every arrow C ->{eps'} D occurring at a strictly positive position of t
// whose codomain D mentions one of `quantified`; collects the eps' sets.
void strictly_positive_arrow_effects(const TypePtr& t, bool strict,
                                     const std::set<int>& quantified,
                                     std::vector<Effect>& out) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TyArrow>) {
                if (strict && n.eff) {
                    std::set<int> fcod = ftv(n.cod);
                    bool hits = std::any_of(quantified.begin(), quantified.end(),
                                            [&](int q) { return fcod.count(q); });
                    if (hits) out.push_back(*n.eff);
                }
                strictly_positive_arrow_effects(n.dom, false, quantified, out);
                strictly_positive_arrow_effects(n.cod, strict, quantified, out);
            } else if constexpr (std::is_same_v<N, TyProd> || std::is_same_v<N, TySum>) {
                strictly_positive_arrow_effects(n.left, strict, quantified, out);
                strictly_positive_arrow_effects(n.right, strict, quantified, out);
            } else if constexpr (std::is_same_v<N, TyList>) {
                strictly_positive_arrow_effects(n.elem, strict, quantified, out);
            }
        },
        t->node);
}

}  // namespace

bool SrEffectChecker::sr_effect(const Effect& eps) {
    for (const auto& op : eps) {
        if (!env_.count(op)) {
            Diagnostic d;
            d.phase = Phase::EffectType;
            d.message = "unknown operation '" + op + "' in effect";
            throw CheckError(std::move(d));
        }
    }
    for (const auto& op : eps)
        if (!sr_op(op)) return false;
    return true;
}

bool SrEffectChecker::sr_op(const std::string& op) {
    auto it = verdicts_.find(op);
    if (it != verdicts_.end()) return it->second;
    solve_reachable(op);
    return verdicts_.at(op);
}

// Greatest fixpoint over the set of operations reachable from `root` through
// effect annotations in signatures: start from "all satisfy SR", repeatedly
// discard operations whose conditions fail under the current assumption.
void SrEffectChecker::solve_reachable(const std::string& root) {
    std::set<std::string> reachable;
    std::vector<std::string> frontier{root};
    while (!frontier.empty()) {
        std::string op = frontier.back();
        frontier.pop_back();
        if (reachable.count(op)) continue;
        reachable.insert(op);
        auto sit = env_.find(op);
        if (sit == env_.end()) continue;   // undeclared; handled below
        Effect mentioned;
        collect_effects(sit->second.dom, mentioned);
        collect_effects(sit->second.cod, mentioned);
        for (const auto& m : mentioned)
            if (!reachable.count(m)) frontier.push_back(m);
    }

    std::set<std::string> holds;
    for (const auto& op : reachable) {
        auto sit = env_.find(op);
        if (sit == env_.end()) continue;                    // unknown never holds
        if (check_sr(sit->second).pass) holds.insert(op);   // clauses (1), (2)
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it2 = holds.begin(); it2 != holds.end();) {
            const OpSignature& sig = env_.at(*it2);
            std::set<int> quantified(sig.quantified.begin(), sig.quantified.end());
            std::vector<Effect> nested;
            strictly_positive_arrow_effects(sig.dom, true, quantified, nested);
            bool ok = true;
            for (const auto& eps : nested)
                for (const auto& m : eps)
                    if (!holds.count(m)) ok = false;
            if (!ok) {
                it2 = holds.erase(it2);
                changed = true;
            } else {
                ++it2;
            }
        }
    }

    for (const auto& op : reachable) verdicts_[op] = holds.count(op) > 0;
}

}  // namespace eff
