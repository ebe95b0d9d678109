#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nomsos/spec.hpp"

namespace nomsos {

enum class Status { Pass, Fail, Unknown, Skipped };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Unknown: return "unknown";
    case Status::Skipped: return "skipped";
  }
  return "?";
}

struct RuleReport {
  std::string rule;
  Status status = Status::Pass;
  std::string constraint;
  std::string witness;
  /// Head constructors of the conclusion labels for which the rule has a
  /// defined order (stratification check only).
  std::vector<std::string> defined;
};

struct CheckReport {
  std::string check;
  std::vector<RuleReport> rules;
  std::string note;
  bool not_run = false;

  Status status() const {
    if (not_run) return Status::Fail;
    bool unknown = false;
    for (const auto& r : rules) {
      if (r.status == Status::Fail) return Status::Fail;
      if (r.status == Status::Unknown) unknown = true;
    }
    return unknown ? Status::Unknown : Status::Pass;
  }
  bool passed() const { return status() == Status::Pass; }

  const RuleReport* find(const std::string& rule) const {
    for (const auto& r : rules) {
      if (r.rule == rule) return &r;
    }
    return nullptr;
  }
};

namespace detail {

inline void sort_reports(CheckReport& rep) {
  std::stable_sort(rep.rules.begin(), rep.rules.end(),
                   [](const RuleReport& a, const RuleReport& b) { return a.rule < b.rule; });
}

/// Rule instances in which every label variable is replaced by an action
/// constructor applied to new schematic atoms. Empty optional when some
/// label ranges over actions whose arguments are not atoms.
inline std::optional<std::vector<Rule>> expand_labels(const Spec& spec, const Rule& rule) {
  std::vector<Rule> out{rule};
  auto act = spec.signature.action_sort();
  for (const auto& v : rule.variables()) {
    if (!spec.is_label(v) || !act) continue;
    std::vector<Rule> next;
    for (const auto& r : out) {
      AtomSet used = r.atoms();
      used.insert(r.metas.begin(), r.metas.end());
      auto ex = r.unless.find(v);
      for (const auto& f : spec.signature.base.functions) {
        if (f.result != act->name()) continue;
        if (ex != r.unless.end() && ex->second.contains(f.name)) continue;
        std::vector<NominalSort> parts = f.arg.is_product() ? f.arg.parts() : std::vector<NominalSort>{f.arg};
        std::vector<Term> args;
        Rule inst = r;
        for (const auto& p : parts) {
          if (!p.is_atom()) return std::nullopt;
          Atom a = fresh_atom(p.atom_sort(), used);
          used.insert(a);
          inst.metas.push_back(a);
          args.push_back(Term::atom(a));
        }
        Substitution phi;
        phi.bind(v, Term::app(f.name, Term::tuple(args)));
        Rule e = inst.instantiate({}, phi);
        e.metas = inst.metas;
        e.unless.erase(v);
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Sort-respecting set partitions of `metas`, each as a map sending every
/// atom to the first atom of its block.
inline std::vector<std::map<Atom, Atom>> identifications(const std::vector<Atom>& metas) {
  std::vector<std::map<Atom, Atom>> out;
  std::vector<Atom> reps;
  std::map<Atom, Atom> cur;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == metas.size()) {
      out.push_back(cur);
      return;
    }
    const Atom& m = metas[i];
    for (std::size_t k = 0; k < reps.size(); ++k) {
      if (reps[k].sort != m.sort) continue;
      cur[m] = reps[k];
      go(i + 1);
    }
    reps.push_back(m);
    cur[m] = m;
    go(i + 1);
    reps.pop_back();
    cur.erase(m);
  };
  go(0);
  return out;
}

/// Rule instances the stratification and ACR checks range over: label
/// expansions times identification patterns, dropping instances whose
/// freshness environment is inconsistent (they have no applicable instance).
inline std::optional<std::vector<Rule>> rule_instances(const Spec& spec, const Rule& rule) {
  auto expanded = expand_labels(spec, rule);
  if (!expanded) return std::nullopt;
  std::vector<Rule> out;
  for (const auto& r : *expanded) {
    for (const auto& rho : identifications(r.metas)) {
      Rule inst = r.instantiate(rho);
      if (!is_consistent(inst.env)) continue;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

inline std::string describe(const Rule& r) {
  std::string out;
  for (std::size_t i = 0; i < r.premises.size(); ++i) out += (i ? ", " : "") + to_string(r.premises[i]);
  if (!r.env.empty()) out += (out.empty() ? "" : ", ") + to_string(r.env);
  return out.empty() ? to_string(r.conclusion) : out + " / " + to_string(r.conclusion);
}

struct OrderLookup {
  MatchOutcome outcome = MatchOutcome::No;
  const StratCase* c = nullptr;
  PatternBinding binding;
};

inline OrderLookup lookup_order(const StratSpec& strat, const Term& source, const Term& label) {
  for (const auto& c : strat.cases) {
    PatternBinding b;
    auto o = match_case(c, source, label, b);
    if (o == MatchOutcome::No) continue;
    return {o, &c, std::move(b)};
  }
  return {};
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CheckReport check_wellformed(const Spec& spec) {
  CheckReport rep;
  rep.check = "well-formedness";
  auto v = validate_spec(spec);
  std::map<std::string, RuleReport> by_rule;
  for (const auto& r : spec.rules) by_rule[r.name].rule = r.name;
  for (const auto& issue : v.issues) {
    auto& r = by_rule[issue.rule.empty() ? std::string("(spec)") : issue.rule];
    if (r.rule.empty()) r.rule = issue.rule.empty() ? "(spec)" : issue.rule;
    bool error = issue.severity == Issue::Severity::Error;
    if (error && r.status != Status::Fail) {
      r.status = Status::Fail;
      r.constraint = "well-formedness";
      r.witness = issue.message;
    } else if (!error && r.witness.empty()) {
      r.witness = "warning: " + issue.message;
    }
  }
  for (auto& [n, r] : by_rule) rep.rules.push_back(r);
  detail::sort_reports(rep);
  return rep;
}

/// Pass iff every atom of every rule is schematic. Applying π to the
/// instance of a schematic rule under assignment v gives its instance under
/// π∘v, so the denoted rule set is closed under all permutations.
inline CheckReport check_equivariant(const Spec& spec) {
  CheckReport rep;
  rep.check = "equivariant format";
  rep.note = "schematic atoms range over all atoms of their sort; pi applied to an instance under v is the "
             "instance under pi o v";
  for (const auto& rule : spec.rules) {
    RuleReport r;
    r.rule = rule.name;
    for (const auto& a : rule.atoms()) {
      if (rule.is_meta(a)) continue;
      Atom other = fresh_atom(a.sort, {a});
      r.status = Status::Fail;
      r.constraint = "equivariance";
      r.witness = "literal atom " + atom_name(a) + ": the image of the rule under " +
                  to_string(Permutation::swap(a, other)) + " is not in the rule set";
      break;
    }
    rep.rules.push_back(r);
  }
  detail::sort_reports(rep);
  return rep;
}

/// Syntactic sufficient conditions for the stratification: every instance
/// with a binding name in its label has a defined order, and every premise
/// of an instance with defined order is a recursive call of its case.
inline CheckReport check_stratification(const Spec& spec) {
  CheckReport rep;
  rep.check = "stratification";
  StratSpec strat = spec.strat.value_or(StratSpec{});
  BnSpec bn = spec.bn.value_or(BnSpec{});
  const auto& sig = spec.signature.base;
  for (const auto& rule : spec.rules) {
    RuleReport r;
    r.rule = rule.name;
    auto set = [&](Status s, std::string c, std::string w) {
      if (r.status == Status::Fail || (r.status == Status::Unknown && s != Status::Fail)) return;
      r.status = s;
      r.constraint = std::move(c);
      r.witness = std::move(w);
    };
    auto instances = detail::rule_instances(spec, rule);
    if (!instances) {
      set(Status::Unknown, "coverage", "label ranges over actions with non-atom arguments");
      rep.rules.push_back(r);
      continue;
    }
    std::set<std::string> defined;
    for (const auto& inst : *instances) {
      auto label = action_of(inst.conclusion.target);
      if (!label || label->kind() != Term::Kind::App) {
        set(Status::Unknown, "coverage", "conclusion label is not a constructor: " + detail::describe(inst));
        continue;
      }
      AtomSet binders = bn_eval(bn, sig, *label);
      auto found = detail::lookup_order(strat, inst.conclusion.source, *label);
      if (found.outcome == MatchOutcome::Maybe) {
        set(Status::Unknown, "coverage", "order cannot be decided syntactically for " + detail::describe(inst));
        continue;
      }
      if (found.outcome == MatchOutcome::No) {
        if (!binders.empty()) {
          set(Status::Fail, "coverage",
              "no order case covers " + to_string(inst.conclusion.source) + " @ " + to_string(*label));
        }
        continue;
      }
      defined.insert(label->fn());
      const StratCase& c = *found.c;
      for (const auto& p : inst.premises) {
        auto plabel = action_of(p.target);
        if (c.constant) {
          set(Status::Unknown, "(ii)", "constant order with premise " + to_string(p) + " in " + detail::describe(inst));
          continue;
        }
        if (!p.source.is_var()) {
          set(Status::Unknown, "(ii)", "premise source is not a variable: " + to_string(p));
          continue;
        }
        bool ok = false;
        for (const auto& call : c.calls) {
          auto it = found.binding.vars.find(call.var);
          if (it == found.binding.vars.end() || it->second != p.source) continue;
          if (plabel && rename_atoms(call.label, found.binding.atoms) == *plabel) ok = true;
        }
        if (!ok) {
          set(Status::Fail, "(ii)",
              "premise " + to_string(p) + " is not a recursive call of the order case for " +
                  to_string(inst.conclusion.source) + " @ " + to_string(*label));
        }
      }
    }
    r.defined.assign(defined.begin(), defined.end());
    rep.rules.push_back(r);
  }
  detail::sort_reports(rep);
  return rep;
}

/// Smallest atom-free closed term of each inhabited sort.
inline std::optional<Term> closed_term(const Signature& sig, const NominalSort& sort) {
  std::map<std::string, Term> best;
  std::function<std::optional<Term>(const NominalSort&)> build = [&](const NominalSort& s) -> std::optional<Term> {
    switch (s.kind()) {
      case NominalSort::Kind::Base: {
        auto it = best.find(s.name());
        if (it == best.end()) return std::nullopt;
        return it->second;
      }
      case NominalSort::Kind::Atom:
        return std::nullopt;
      case NominalSort::Kind::Abstraction: {
        auto body = build(s.body());
        if (!body) return std::nullopt;
        return Term::abs(Atom{s.atom_sort(), 0}, *body);
      }
      case NominalSort::Kind::Product: {
        std::vector<Term> items;
        for (const auto& p : s.parts()) {
          auto t = build(p);
          if (!t) return std::nullopt;
          items.push_back(*t);
        }
        return s.is_unit() ? Term::unit() : Term::tuple(items);
      }
    }
    return std::nullopt;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& f : sig.functions) {
      auto arg = build(f.arg);
      if (!arg) continue;
      Term t = Term::app(f.name, *arg);
      auto it = best.find(f.result);
      if (it == best.end() || term_size(t) < term_size(it->second)) {
        best.insert_or_assign(f.result, t);
        changed = true;
      }
    }
  }
  return build(sort);
}

/// ACR format over the instances with defined order. Candidate atoms a are
/// the rule atoms outside the excluded set plus `fresh_candidates` fresh
/// atoms per sort.
inline CheckReport check_acr(const Spec& spec, unsigned fresh_candidates = 1) {
  CheckReport rep;
  rep.check = "ACR format";
  StratSpec strat = spec.strat.value_or(StratSpec{});
  BnSpec bn = spec.bn.value_or(BnSpec{});
  const auto& sig = spec.signature.base;
  for (const auto& rule : spec.rules) {
    RuleReport r;
    r.rule = rule.name;
    r.status = Status::Skipped;
    auto fail = [&](Status s, std::string c, std::string w) {
      if (r.status == Status::Fail || (r.status == Status::Unknown && s != Status::Fail)) return;
      r.status = s;
      r.constraint = std::move(c);
      r.witness = std::move(w);
    };
    auto instances = detail::rule_instances(spec, rule);
    if (!instances) {
      fail(Status::Unknown, "", "label ranges over actions with non-atom arguments");
      rep.rules.push_back(r);
      continue;
    }
    for (const auto& inst : *instances) {
      if (r.status == Status::Fail) break;
      auto label = action_of(inst.conclusion.target);
      if (!label || label->kind() != Term::Kind::App) continue;
      auto found = detail::lookup_order(strat, inst.conclusion.source, *label);
      if (found.outcome == MatchOutcome::Maybe) {
        fail(Status::Unknown, "", "order cannot be decided syntactically for " + detail::describe(inst));
        continue;
      }
      if (found.outcome == MatchOutcome::No) continue;
      if (r.status == Status::Skipped) r.status = Status::Pass;

      const Term& t = inst.conclusion.source;
      const Term& tp = inst.conclusion.target;
      VariableSet kept = vars(tp);
      for (const auto& p : inst.premises) {
        for (const auto& side : {p.source, p.target}) {
          auto v = vars(side);
          kept.insert(v.begin(), v.end());
        }
      }
      for (const auto& f : inst.env) {
        auto v = vars(f.term);
        kept.insert(v.begin(), v.end());
      }
      Substitution gamma;
      bool inhabited = true;
      for (const auto& x : vars(t)) {
        if (kept.contains(x)) continue;
        auto c = closed_term(sig, x.sort);
        if (!c) {
          fail(Status::Fail, "gamma", "sort " + to_string(x.sort) + " of dropped variable " + x.name + " is uninhabited");
          inhabited = false;
          break;
        }
        gamma.bind(x, *c);
      }
      if (!inhabited) break;
      Term gt = subst_apply(gamma, t);

      AtomSet atoms = inst.atoms();
      AtomSet cands;
      for (const auto& c : atoms) {
        if (support(t).contains(c) && nf({{c, t}}).all().empty()) continue;
        cands.insert(c);
      }
      for (const auto& s : sig.atom_sorts) {
        for (const auto& a : fresh_atoms(s, atoms, fresh_candidates)) cands.insert(a);
      }
      auto unentailed = [](const FreshnessEnv& l, const FreshnessEnv& rr) {
        return to_string(l) + " does not entail " + to_string(rr);
      };
      for (const auto& a : cands) {
        FreshnessEnv lhs = inst.env;
        lhs.insert({a, tp});
        FreshnessEnv rhs;
        for (const auto& p : inst.premises) rhs.insert({a, p.target});
        if (!entails(lhs, rhs)) {
          fail(Status::Fail, "(i)", "instance " + detail::describe(inst) + ", a = " + atom_name(a) + ": " + unentailed(lhs, rhs));
          break;
        }
        for (const auto& p : inst.premises) lhs.insert({a, p.source});
        FreshnessEnv goal{{a, gt}};
        if (!entails(lhs, goal)) {
          fail(Status::Fail, "(ii)", "instance " + detail::describe(inst) + ", a = " + atom_name(a) + ": " + unentailed(lhs, goal));
          break;
        }
      }
      if (r.status == Status::Fail) break;
      for (const auto& b : bn_eval(bn, sig, *label)) {
        FreshnessEnv lhs = inst.env;
        for (const auto& p : inst.premises) {
          auto pl = action_of(p.target);
          if (pl && pl->kind() == Term::Kind::App && bn_eval(bn, sig, *pl).contains(b)) lhs.insert({b, p.source});
        }
        FreshnessEnv goal{{b, gt}};
        if (!entails(lhs, goal)) {
          fail(Status::Fail, "(iii)", "instance " + detail::describe(inst) + ", b = " + atom_name(b) + ": " + unentailed(lhs, goal));
          break;
        }
      }
    }
    rep.rules.push_back(r);
  }
  detail::sort_reports(rep);
  return rep;
}

/// Well-formedness, equivariant format, stratification and ACR format in
/// that order; the ACR check only runs once the two before it pass.
inline std::vector<CheckReport> run_checks(const Spec& spec, unsigned fresh_candidates = 1) {
  std::vector<CheckReport> out;
  out.push_back(check_wellformed(spec));
  if (!out.back().passed()) {
    for (const char* name : {"equivariant format", "stratification", "ACR format"}) {
      CheckReport r;
      r.check = name;
      r.not_run = true;
      r.note = "not run: the specification is not well-formed";
      out.push_back(r);
    }
    return out;
  }
  out.push_back(check_equivariant(spec));
  out.push_back(check_stratification(spec));
  if (out[1].passed() && out[2].passed()) {
    out.push_back(check_acr(spec, fresh_candidates));
  } else {
    CheckReport r;
    r.check = "ACR format";
    r.not_run = true;
    r.note = "not run: requires the equivariant format and the stratification checks to pass";
    out.push_back(r);
  }
  return out;
}

}  // namespace nomsos
