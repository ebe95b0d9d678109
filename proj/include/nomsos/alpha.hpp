#pragma once

#include <compare>
#include <string>

#include "nomsos/sort_check.hpp"
#include "nomsos/term.hpp"

namespace nomsos {

class GroundnessError : public Error {
 public:
  using Error::Error;
};

/// Ground term in canonical form: no suspensions, and every binder is the
/// least atom of its sort that is not free in its abstraction (chosen
/// outside-in). Two NominalTerms are equal iff their preimages are
/// alpha-equivalent.
class NominalTerm {
 public:
  NominalTerm() = default;

  const Term& term() const { return term_; }

  friend std::strong_ordering operator<=>(const NominalTerm& a, const NominalTerm& b) {
    return compare(a.term_, b.term_);
  }
  friend bool operator==(const NominalTerm& a, const NominalTerm& b) { return a.term_ == b.term_; }

 private:
  explicit NominalTerm(Term t) : term_(std::move(t)) {}
  friend NominalTerm normalize(const Term& p);

  Term term_;
};

inline std::string to_string(const NominalTerm& t) { return to_string(t.term()); }

namespace detail {

inline void require_ground(const Term& p, const char* what) {
  if (!is_ground(p)) throw GroundnessError(std::string(what) + ": term " + to_string(p) + " is not ground");
}

/// Pushes every suspension into its body; ground input only.
inline Term discharge(const Term& p) {
  switch (p.kind()) {
    case Term::Kind::Atom:
    case Term::Kind::Var:
      return p;
    case Term::Kind::Susp:
      return act(p.perm(), discharge(p.body()));
    case Term::Kind::Abs:
      return Term::abs(p.binder(), discharge(p.body()));
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      for (const auto& i : p.items()) items.push_back(discharge(i));
      return Term::tuple(items);
    }
    case Term::Kind::App:
      return Term::app(p.fn(), discharge(p.body()));
  }
  return p;
}

/// Free atoms of a suspension-free term.
inline void collect_free(const Term& p, AtomSet& out) {
  switch (p.kind()) {
    case Term::Kind::Atom:
      out.insert(p.atom());
      return;
    case Term::Kind::Var:
      return;
    case Term::Kind::Susp:
      collect_free(discharge(p), out);
      return;
    case Term::Kind::Abs: {
      AtomSet inner;
      collect_free(p.body(), inner);
      inner.erase(p.binder());
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Term::Kind::Tuple:
      for (const auto& i : p.items()) collect_free(i, out);
      return;
    case Term::Kind::App:
      collect_free(p.body(), out);
      return;
  }
}

inline AtomSet free_atoms(const Term& p) {
  AtomSet out;
  collect_free(p, out);
  return out;
}

inline Term canonicalize(const Term& p) {
  switch (p.kind()) {
    case Term::Kind::Atom:
    case Term::Kind::Var:
      return p;
    case Term::Kind::Susp:
      return canonicalize(discharge(p));
    case Term::Kind::Abs: {
      const Atom& b = p.binder();
      Atom d = fresh_atom(b.sort, free_atoms(p));
      Term body = d == b ? p.body() : act(Permutation::swap(d, b), p.body());
      return Term::abs(d, canonicalize(body));
    }
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      for (const auto& i : p.items()) items.push_back(canonicalize(i));
      return Term::tuple(items);
    }
    case Term::Kind::App:
      return Term::app(p.fn(), canonicalize(p.body()));
  }
  return p;
}

}  // namespace detail

/// Interpretation of a ground term as a nominal term.
inline NominalTerm normalize(const Term& p) {
  detail::require_ground(p, "normalize");
  return NominalTerm(detail::canonicalize(detail::discharge(p)));
}

inline bool alpha_eq(const Term& p, const Term& q) { return normalize(p) == normalize(q); }

/// Sort-checked variant; throws SortError when p and q have different sorts.
inline bool alpha_eq(const Signature& sig, const Term& p, const Term& q) {
  NominalSort sp = sort_check(sig, p);
  NominalSort sq = sort_check(sig, q);
  if (sp != sq) {
    throw SortError("alpha_eq: sorts differ (" + to_string(sp) + " vs " + to_string(sq) + ")");
  }
  return alpha_eq(p, q);
}

/// Support of the nominal term: its free atoms.
inline AtomSet nt_support(const Term& p) {
  detail::require_ground(p, "nt_support");
  return detail::free_atoms(detail::discharge(p));
}

inline AtomSet nt_support(const NominalTerm& p) { return detail::free_atoms(p.term()); }

inline bool nt_fresh(const Atom& a, const Term& p) { return !nt_support(p).contains(a); }
inline bool nt_fresh(const Atom& a, const NominalTerm& p) { return !nt_support(p).contains(a); }

/// π acting on a nominal term, re-canonicalized.
inline NominalTerm act(const Permutation& pi, const NominalTerm& p) { return normalize(act(pi, p.term())); }

}  // namespace nomsos
