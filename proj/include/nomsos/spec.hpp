#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nomsos/alpha.hpp"
#include "nomsos/freshness.hpp"
#include "nomsos/sort_check.hpp"

namespace nomsos {

struct ResidualSignature {
  Signature base;
  NominalSort state_sort;
  NominalSort residual_sort;

  /// State sort is a base sort and the residual sort is (action × state)
  /// with a base action sort.
  bool nts_mode() const {
    return state_sort.is_base() && residual_sort.is_product() &&
           residual_sort.parts().size() == 2 && residual_sort.parts()[0].is_base() &&
           residual_sort.parts()[1] == state_sort;
  }
  std::optional<NominalSort> action_sort() const {
    if (!nts_mode()) return std::nullopt;
    return residual_sort.parts()[0];
  }

  bool operator==(const ResidualSignature&) const = default;
};

struct Formula {
  Term source;
  Term target;

  bool operator==(const Formula&) const = default;
};

inline std::string to_string(const Formula& f) { return to_string(f.source) + " -> " + to_string(f.target); }

/// Action position of an (action, state) residual pattern, if explicit.
inline std::optional<Term> action_of(const Term& residual) {
  if (residual.kind() == Term::Kind::Tuple && residual.items().size() == 2) return residual.items()[0];
  return std::nullopt;
}

/// Transition rule H, ∇ / t → t'. The atoms in `metas` are schematic: the
/// rule stands for all of its instances under arbitrary (not necessarily
/// injective) atom assignments. Variables declared as labels range over
/// ground actions whose head constructor is not listed in `unless`.
struct Rule {
  std::string name;
  std::vector<Atom> metas;
  std::vector<Formula> premises;
  FreshnessEnv env;
  Formula conclusion;
  std::map<Variable, std::set<std::string>> unless;

  bool is_meta(const Atom& a) const { return std::find(metas.begin(), metas.end(), a) != metas.end(); }

  /// Every atom mentioned anywhere in the rule.
  AtomSet atoms() const {
    AtomSet out;
    auto add = [&](const Term& t) {
      auto s = support(t);
      out.insert(s.begin(), s.end());
    };
    for (const auto& p : premises) {
      add(p.source);
      add(p.target);
    }
    for (const auto& f : env) {
      out.insert(f.atom);
      add(f.term);
    }
    add(conclusion.source);
    add(conclusion.target);
    return out;
  }

  VariableSet variables() const {
    VariableSet out;
    auto add = [&](const Term& t) {
      auto s = vars(t);
      out.insert(s.begin(), s.end());
    };
    for (const auto& p : premises) {
      add(p.source);
      add(p.target);
    }
    for (const auto& f : env) add(f.term);
    add(conclusion.source);
    add(conclusion.target);
    return out;
  }

  /// Applies an atom assignment and a substitution to every part of the rule.
  Rule instantiate(const std::map<Atom, Atom>& rho, const Substitution& phi = {}) const {
    Rule out;
    out.name = name;
    out.unless = unless;
    auto inst = [&](const Term& t) { return subst_apply(phi, rename_atoms(t, rho)); };
    AtomSet image;
    for (const auto& m : metas) {
      auto it = rho.find(m);
      Atom a = it == rho.end() ? m : it->second;
      if (image.insert(a).second) out.metas.push_back(a);
    }
    for (const auto& p : premises) out.premises.push_back({inst(p.source), inst(p.target)});
    for (const auto& f : env) {
      auto it = rho.find(f.atom);
      out.env.insert({it == rho.end() ? f.atom : it->second, inst(f.term)});
    }
    out.conclusion = {inst(conclusion.source), inst(conclusion.target)};
    return out;
  }

  bool operator==(const Rule&) const = default;
};

/// Binding-name positions (1-based) per action constructor.
struct BnSpec {
  std::map<std::string, std::set<unsigned>> positions;

  bool operator==(const BnSpec&) const = default;
};

struct AtomConstraint {
  Atom lhs;
  Atom rhs;
  bool equal = false;

  bool operator==(const AtomConstraint&) const = default;
};

struct RecCall {
  Variable var;
  Term label;

  bool operator==(const RecCall&) const = default;
};

/// One line of a stratification table: S(head, label) = measure when the
/// atom constraints hold. All atoms in a case are pattern atoms.
struct StratCase {
  Term head;
  Term label;
  std::vector<AtomConstraint> when;
  std::optional<unsigned> constant;
  std::vector<RecCall> calls;

  bool operator==(const StratCase&) const = default;
};

struct StratSpec {
  std::vector<StratCase> cases;

  bool operator==(const StratSpec&) const = default;
};

struct Spec {
  ResidualSignature signature;
  std::vector<Variable> variables;
  std::vector<Variable> labels;
  std::vector<Rule> rules;
  std::optional<BnSpec> bn;
  std::optional<StratSpec> strat;

  const Rule* find_rule(const std::string& name) const {
    for (const auto& r : rules) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }
  bool is_label(const Variable& v) const {
    return std::find(labels.begin(), labels.end(), v) != labels.end();
  }

  bool operator==(const Spec&) const = default;
};

// ---------------------------------------------------------------------------
// Binding names

namespace detail {
inline std::optional<Atom> atom_at(const Term& t) {
  if (t.is_atom()) return t.atom();
  if (t.kind() == Term::Kind::Susp) {
    auto inner = atom_at(t.body());
    if (inner) return t.perm()(*inner);
  }
  return std::nullopt;
}
}  // namespace detail

/// Atoms at the binding positions of the head constructor of `label`.
inline AtomSet bn_eval(const BnSpec& bn, const Signature& sig, const Term& label) {
  Term l = label;
  while (l.kind() == Term::Kind::Susp && l.body().kind() == Term::Kind::Susp) {
    l = Term::susp(l.perm().compose(l.body().perm()), l.body().body());
  }
  if (l.kind() == Term::Kind::Susp && is_ground(l)) l = normalize(l).term();
  if (l.kind() != Term::Kind::App) throw Error("bn: " + to_string(label) + " is not a constructor application");
  if (!sig.find_function(l.fn())) throw Error("bn: unknown constructor " + l.fn());
  auto it = bn.positions.find(l.fn());
  if (it == bn.positions.end()) return {};
  const Term& arg = l.body();
  AtomSet out;
  for (unsigned pos : it->second) {
    const Term* component = nullptr;
    if (arg.kind() == Term::Kind::Tuple) {
      if (pos >= 1 && pos <= arg.items().size()) component = &arg.items()[pos - 1];
    } else if (pos == 1) {
      component = &arg;
    }
    if (!component) throw Error("bn: position " + std::to_string(pos) + " out of range for " + l.fn());
    auto a = detail::atom_at(*component);
    if (!a) throw Error("bn: position " + std::to_string(pos) + " of " + to_string(l) + " is not an atom");
    out.insert(*a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stratification

enum class MatchOutcome { No, Yes, Maybe };

/// Bindings of a stratification case against a (possibly open) subject.
struct PatternBinding {
  std::map<Atom, Atom> atoms;
  std::map<Variable, Term> vars;
};

/// Syntactic matching of a stratification pattern. Variables of the subject
/// are opaque: wherever the pattern needs structure under a subject variable
/// the outcome is Maybe. Ground subjects never yield Maybe.
inline MatchOutcome pattern_match(const Term& pat, const Term& subj, PatternBinding& b) {
  using K = Term::Kind;
  auto bind_atom = [&](const Atom& p, const Atom& s) {
    if (p.sort != s.sort) return MatchOutcome::No;
    auto [it, inserted] = b.atoms.emplace(p, s);
    return inserted || it->second == s ? MatchOutcome::Yes : MatchOutcome::No;
  };
  if (pat.is_var()) {
    auto [it, inserted] = b.vars.emplace(pat.variable(), subj);
    if (inserted || it->second == subj) return MatchOutcome::Yes;
    return is_ground(it->second) && is_ground(subj) ? MatchOutcome::No : MatchOutcome::Maybe;
  }
  if (subj.is_var() || subj.kind() == K::Susp || pat.kind() == K::Susp) return MatchOutcome::Maybe;
  if (pat.kind() != subj.kind()) return MatchOutcome::No;
  switch (pat.kind()) {
    case K::Atom:
      return bind_atom(pat.atom(), subj.atom());
    case K::Abs: {
      auto r = bind_atom(pat.binder(), subj.binder());
      if (r == MatchOutcome::No) return r;
      return pattern_match(pat.body(), subj.body(), b);
    }
    case K::Tuple: {
      if (pat.items().size() != subj.items().size()) return MatchOutcome::No;
      MatchOutcome acc = MatchOutcome::Yes;
      for (std::size_t i = 0; i < pat.items().size(); ++i) {
        auto r = pattern_match(pat.items()[i], subj.items()[i], b);
        if (r == MatchOutcome::No) return r;
        if (r == MatchOutcome::Maybe) acc = MatchOutcome::Maybe;
      }
      return acc;
    }
    case K::App:
      if (pat.fn() != subj.fn()) return MatchOutcome::No;
      return pattern_match(pat.body(), subj.body(), b);
    default:
      return MatchOutcome::Maybe;
  }
}

/// Matches a case against (head, label): label first, then head, then the
/// atom constraints (which need concrete atoms to be decided).
inline MatchOutcome match_case(const StratCase& c, const Term& head, const Term& label, PatternBinding& b) {
  auto r1 = pattern_match(c.label, label, b);
  if (r1 == MatchOutcome::No) return r1;
  auto r2 = pattern_match(c.head, head, b);
  if (r2 == MatchOutcome::No) return r2;
  if (r1 == MatchOutcome::Maybe || r2 == MatchOutcome::Maybe) return MatchOutcome::Maybe;
  for (const auto& k : c.when) {
    auto l = b.atoms.find(k.lhs);
    auto r = b.atoms.find(k.rhs);
    if (l == b.atoms.end() || r == b.atoms.end()) return MatchOutcome::Maybe;
    if ((l->second == r->second) != k.equal) return MatchOutcome::No;
  }
  return MatchOutcome::Yes;
}

/// Order of a ground (state, action) pair; nullopt stands for ⊥. Inside
/// the measure an undefined recursive call counts as 0.
inline std::optional<unsigned> strat_eval(const StratSpec& strat, const Term& state, const Term& label) {
  Term p = detail::discharge(state);
  Term l = detail::discharge(label);
  for (const auto& c : strat.cases) {
    PatternBinding b;
    if (match_case(c, p, l, b) != MatchOutcome::Yes) continue;
    if (c.constant) return *c.constant;
    unsigned best = 0;
    for (const auto& call : c.calls) {
      auto it = b.vars.find(call.var);
      if (it == b.vars.end()) throw Error("strat: recursion variable " + call.var.name + " unbound");
      auto v = strat_eval(strat, it->second, rename_atoms(call.label, b.atoms));
      best = std::max(best, v.value_or(0));
    }
    return 1 + best;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Validation

struct Issue {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string rule;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const {
    return std::none_of(issues.begin(), issues.end(),
                        [](const Issue& i) { return i.severity == Issue::Severity::Error; });
  }
  bool empty() const { return issues.empty(); }
};

namespace detail {

/// Ordinary variables inside an action term; label variables are allowed
/// only as the whole action.
inline bool action_is_ground(const Spec& spec, const Term& action) {
  if (action.is_var()) return spec.is_label(action.variable());
  return is_ground(action);
}

inline void product_var_in_tuple(const Term& t, std::vector<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Tuple:
      for (const auto& i : t.items()) {
        if (i.is_var() && i.variable().sort.is_product()) out.push_back(i.variable().name);
        product_var_in_tuple(i, out);
      }
      return;
    case Term::Kind::Atom:
    case Term::Kind::Var:
      return;
    default:
      product_var_in_tuple(t.body(), out);
  }
}

}  // namespace detail

/// Checks formula sorts, ground actions, premise schedulability, bn and
/// stratification declarations. Unschedulable rules are warnings: they are
/// well-formed but the derivation engine cannot use them.
inline ValidationReport validate_spec(const Spec& spec) {
  ValidationReport rep;
  auto error = [&](const std::string& rule, const std::string& msg) {
    rep.issues.push_back({Issue::Severity::Error, rule, msg});
  };
  auto warn = [&](const std::string& rule, const std::string& msg) {
    rep.issues.push_back({Issue::Severity::Warning, rule, msg});
  };
  const auto& rsig = spec.signature;
  const auto& sig = rsig.base;
  for (const auto& v : validate_signature(sig)) error("", v);
  if (!sig.well_formed(rsig.state_sort)) error("", "ill-formed state sort " + to_string(rsig.state_sort));
  if (!sig.well_formed(rsig.residual_sort)) error("", "ill-formed residual sort " + to_string(rsig.residual_sort));

  std::set<std::string> names;
  for (const auto& rule : spec.rules) {
    if (!names.insert(rule.name).second) error(rule.name, "duplicate rule name");
    auto check_formula = [&](const Formula& f, const std::string& where) {
      for (const auto& [t, expected, role] :
           {std::tuple{f.source, rsig.state_sort, "source"}, std::tuple{f.target, rsig.residual_sort, "target"}}) {
        try {
          NominalSort got = sort_check(sig, t);
          if (got != expected) {
            error(rule.name, where + " " + role + " has sort " + to_string(got) + ", expected " + to_string(expected));
          }
        } catch (const SortError& e) {
          error(rule.name, where + " " + role + ": " + e.what());
        }
      }
      std::vector<std::string> bad;
      detail::product_var_in_tuple(f.source, bad);
      detail::product_var_in_tuple(f.target, bad);
      for (const auto& v : bad) error(rule.name, "product-sorted variable " + v + " inside a tuple");
      if (rsig.nts_mode()) {
        auto action = action_of(f.target);
        if (!action || !detail::action_is_ground(spec, *action)) {
          error(rule.name, where + ": action must be ground");
        }
      }
    };
    for (std::size_t i = 0; i < rule.premises.size(); ++i) {
      check_formula(rule.premises[i], "premise " + std::to_string(i + 1));
    }
    check_formula(rule.conclusion, "conclusion");
    for (const auto& f : rule.env) {
      try {
        sort_check(sig, f.term);
      } catch (const SortError& e) {
        error(rule.name, "freshness assertion " + to_string(f) + ": " + e.what());
      }
    }

    VariableSet bound = vars(rule.conclusion.source);
    for (std::size_t i = 0; i < rule.premises.size(); ++i) {
      for (const auto& v : vars(rule.premises[i].source)) {
        if (!bound.contains(v)) {
          warn(rule.name, "unschedulable premise " + std::to_string(i + 1) + ": variable " + v.name +
                              " is not bound by the conclusion source or an earlier premise");
        }
      }
      auto t = vars(rule.premises[i].target);
      bound.insert(t.begin(), t.end());
    }
    VariableSet tail = vars(rule.conclusion.target);
    for (const auto& f : rule.env) {
      auto v = vars(f.term);
      tail.insert(v.begin(), v.end());
    }
    for (const auto& v : tail) {
      if (!bound.contains(v)) warn(rule.name, "unbound variable " + v.name + " in target or freshness environment");
    }
    for (const auto& [v, ctors] : rule.unless) {
      if (!spec.is_label(v)) error(rule.name, "unless clause on non-label variable " + v.name);
      for (const auto& c : ctors) {
        if (!sig.find_function(c)) error(rule.name, "unless clause names unknown constructor " + c);
      }
    }
  }

  if (spec.bn) {
    for (const auto& [fn, positions] : spec.bn->positions) {
      const FunctionDecl* f = sig.find_function(fn);
      if (!f) {
        error("", "bn: unknown constructor " + fn);
        continue;
      }
      if (auto act = rsig.action_sort(); act && f->result != act->name()) {
        error("", "bn: " + fn + " does not construct actions");
      }
      std::vector<NominalSort> parts =
          f->arg.is_product() ? f->arg.parts() : std::vector<NominalSort>{f->arg};
      for (unsigned p : positions) {
        if (p < 1 || p > parts.size()) {
          error("", "bn: position " + std::to_string(p) + " out of range for " + fn);
        } else if (!parts[p - 1].is_atom()) {
          error("", "bn: position " + std::to_string(p) + " of " + fn + " has sort " + to_string(parts[p - 1]) +
                        ", not an atom sort");
        }
      }
    }
  }

  if (spec.strat) {
    for (std::size_t i = 0; i < spec.strat->cases.size(); ++i) {
      const auto& c = spec.strat->cases[i];
      std::string where = "order case " + std::to_string(i + 1);
      auto head_vars = vars(c.head);
      AtomSet pattern_atoms = support(c.head);
      auto la = support(c.label);
      pattern_atoms.insert(la.begin(), la.end());
      for (const auto& call : c.calls) {
        if (!head_vars.contains(call.var)) error("", where + ": recursion on " + call.var.name + " which is not an argument variable of the head");
        for (const auto& a : support(call.label)) {
          if (!pattern_atoms.contains(a)) error("", where + ": atom " + atom_name(a) + " in recursive label is not bound by the patterns");
        }
      }
      for (const auto& k : c.when) {
        if (!pattern_atoms.contains(k.lhs) || !pattern_atoms.contains(k.rhs)) {
          error("", where + ": constraint mentions an atom not bound by the patterns");
        }
      }
    }
  }
  return rep;
}

}  // namespace nomsos
