#pragma once

#include <map>
#include <string>

#include "nomsos/term.hpp"

namespace nomsos {

/// Finite map from variables to raw terms. Variables mapped to themselves
/// are not stored, so the key set is the domain.
class Substitution {
 public:
  Substitution() = default;

  void bind(const Variable& x, Term t) {
    if (t.is_var() && t.variable() == x) {
      map_.erase(x);
    } else {
      map_.insert_or_assign(x, std::move(t));
    }
  }

  Term operator()(const Variable& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? Term::var(x) : it->second;
  }

  const Term* find(const Variable& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? nullptr : &it->second;
  }

  bool is_ground() const {
    for (const auto& [x, t] : map_) {
      if (!nomsos::is_ground(t)) return false;
    }
    return true;
  }

  const std::map<Variable, Term>& mapping() const { return map_; }
  bool empty() const { return map_.empty(); }

  bool operator==(const Substitution&) const = default;

 private:
  std::map<Variable, Term> map_;
};

/// Homomorphic extension to raw terms. Binders are not renamed and
/// suspensions stay suspended; capture is permitted at this layer.
inline Term subst_apply(const Substitution& phi, const Term& t) {
  if (phi.empty()) return t;
  switch (t.kind()) {
    case Term::Kind::Atom:
      return t;
    case Term::Kind::Var:
      return phi(t.variable());
    case Term::Kind::Susp:
      return Term::susp(t.perm(), subst_apply(phi, t.body()));
    case Term::Kind::Abs:
      return Term::abs(t.binder(), subst_apply(phi, t.body()));
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      items.reserve(t.items().size());
      for (const auto& i : t.items()) items.push_back(subst_apply(phi, i));
      return Term::tuple(items);
    }
    case Term::Kind::App:
      return Term::app(t.fn(), subst_apply(phi, t.body()));
  }
  return t;
}

/// (phi ∘ gamma)(x) = phi(gamma(x)).
inline Substitution subst_compose(const Substitution& phi, const Substitution& gamma) {
  Substitution out;
  for (const auto& [x, t] : gamma.mapping()) out.bind(x, subst_apply(phi, t));
  for (const auto& [x, t] : phi.mapping()) {
    if (!gamma.find(x)) out.bind(x, t);
  }
  return out;
}

/// π acting on a substitution; variables have empty support, so only the
/// range moves.
inline Substitution act(const Permutation& pi, const Substitution& phi) {
  Substitution out;
  for (const auto& [x, t] : phi.mapping()) out.bind(x, act(pi, t));
  return out;
}

inline std::string to_string(const Substitution& phi) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : phi.mapping()) {
    if (!first) out += ", ";
    first = false;
    out += x.name + " := " + to_string(t);
  }
  return out + "}";
}

}  // namespace nomsos
