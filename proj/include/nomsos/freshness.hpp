#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nomsos/alpha.hpp"
#include "nomsos/substitution.hpp"

namespace nomsos {

/// a # t over raw terms.
struct FreshnessAssertion {
  Atom atom;
  Term term;

  auto operator<=>(const FreshnessAssertion&) const = default;
  bool operator==(const FreshnessAssertion&) const = default;
};

inline std::string to_string(const FreshnessAssertion& f) {
  return atom_name(f.atom) + " # " + to_string(f.term);
}

/// Finite set of freshness assertions; duplicates collapse.
using FreshnessEnv = std::set<FreshnessAssertion>;

inline std::string to_string(const FreshnessEnv& env) {
  std::string out = "{";
  bool first = true;
  for (const auto& f : env) {
    if (!first) out += ", ";
    first = false;
    out += to_string(f);
  }
  return out + "}";
}

inline FreshnessEnv act(const Permutation& pi, const FreshnessEnv& env) {
  FreshnessEnv out;
  for (const auto& f : env) out.insert({pi(f.atom), act(pi, f.term)});
  return out;
}

inline FreshnessEnv subst_apply(const Substitution& phi, const FreshnessEnv& env) {
  FreshnessEnv out;
  for (const auto& f : env) out.insert({f.atom, subst_apply(phi, f.term)});
  return out;
}

inline bool is_reduced(const FreshnessAssertion& f) {
  return f.term.is_var() || (f.term.is_atom() && f.term.atom() == f.atom);
}

/// One simplification step on a non-reduced assertion: the assertions that
/// replace it (possibly none).
inline std::vector<FreshnessAssertion> simplify_step(const FreshnessAssertion& f) {
  const Term& t = f.term;
  switch (t.kind()) {
    case Term::Kind::Atom:
      if (t.atom() == f.atom) throw Error("simplify_step: assertion " + to_string(f) + " is reduced");
      return {};
    case Term::Kind::Var:
      throw Error("simplify_step: assertion " + to_string(f) + " is reduced");
    case Term::Kind::Susp:
      return {{t.perm().inverse()(f.atom), t.body()}};
    case Term::Kind::Abs:
      if (t.binder() == f.atom) return {};
      return {{f.atom, t.body()}};
    case Term::Kind::Tuple: {
      std::vector<FreshnessAssertion> out;
      for (const auto& i : t.items()) out.push_back({f.atom, i});
      return out;
    }
    case Term::Kind::App:
      return {{f.atom, t.body()}};
  }
  return {};
}

/// Normal form split into inconsistent (a # a) and consistent (a # x) parts.
struct ReducedEnv {
  FreshnessEnv inconsistent;
  FreshnessEnv consistent;

  FreshnessEnv all() const {
    FreshnessEnv out = inconsistent;
    out.insert(consistent.begin(), consistent.end());
    return out;
  }
  bool operator==(const ReducedEnv&) const = default;
};

/// The unique normal form under simplification, computed innermost-first.
inline ReducedEnv nf(const FreshnessEnv& env) {
  ReducedEnv out;
  std::vector<FreshnessAssertion> work(env.begin(), env.end());
  while (!work.empty()) {
    FreshnessAssertion f = std::move(work.back());
    work.pop_back();
    if (f.term.is_var()) {
      out.consistent.insert(std::move(f));
    } else if (f.term.is_atom() && f.term.atom() == f.atom) {
      out.inconsistent.insert(std::move(f));
    } else {
      auto next = simplify_step(f);
      work.insert(work.end(), std::make_move_iterator(next.begin()),
                  std::make_move_iterator(next.end()));
    }
  }
  return out;
}

inline bool is_consistent(const FreshnessEnv& env) { return nf(env).inconsistent.empty(); }

/// env ⊢ goal: env is inconsistent, or nf(goal) ⊆ nf(env).
inline bool entails(const FreshnessEnv& env, const FreshnessEnv& goal) {
  ReducedEnv lhs = nf(env);
  if (!lhs.inconsistent.empty()) return true;
  ReducedEnv rhs = nf(goal);
  if (!rhs.inconsistent.empty()) return false;
  for (const auto& f : rhs.consistent) {
    if (!lhs.consistent.contains(f)) return false;
  }
  return true;
}

/// a # NT⟦φ(v)⟧ for a ground substitution φ that grounds v.
inline bool holds_ground(const Atom& a, const Term& v, const Substitution& phi) {
  Term instance = subst_apply(phi, v);
  if (!is_ground(instance)) {
    throw GroundnessError("holds_ground: " + to_string(v) + " is not grounded by " + to_string(phi));
  }
  return nt_fresh(a, instance);
}

}  // namespace nomsos
