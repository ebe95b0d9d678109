#pragma once

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nomsos/atom.hpp"
#include "nomsos/permutation.hpp"
#include "nomsos/sort.hpp"

namespace nomsos {

struct Variable {
  std::string name;
  NominalSort sort;

  auto operator<=>(const Variable&) const = default;
};

using VariableSet = std::set<Variable>;

class Term;

namespace detail {
struct SuspNode;
struct AbsNode;
struct TupleNode;
struct AppNode;
}  // namespace detail

/// Immutable raw term over a nominal signature: variables, atoms,
/// suspensions π·t, abstractions [a]t, tuples and constructor applications.
/// Nodes are shared; copying a Term is cheap.
class Term {
 public:
  enum class Kind { Atom, Var, Susp, Abs, Tuple, App };

  Term();

  static Term var(Variable v);
  static Term atom(Atom a);
  static Term susp(Permutation p, Term body);
  static Term abs(Atom binder, Term body);
  static Term unit();
  /// Nested tuple items are spliced, mirroring associativity of products.
  static Term tuple(const std::vector<Term>& items);
  static Term app(std::string fn, Term arg);

  Kind kind() const;
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_var() const { return kind() == Kind::Var; }

  const Atom& atom() const;
  const Variable& variable() const;
  const Permutation& perm() const;
  const Atom& binder() const;
  const std::vector<Term>& items() const;
  const std::string& fn() const;

  /// Body of a suspension or abstraction, argument of an application.
  const Term& body() const;

  bool same_node(const Term& o) const { return node_.get() == o.node_.get(); }

  friend std::strong_ordering compare(const Term& x, const Term& y);
  friend bool operator==(const Term& x, const Term& y) { return compare(x, y) == 0; }
  friend std::strong_ordering operator<=>(const Term& x, const Term& y) { return compare(x, y); }

 private:
  using Node = std::variant<Atom, Variable, detail::SuspNode, detail::AbsNode, detail::TupleNode, detail::AppNode>;

  template <class T>
  static Term make(T&& payload) {
    Term t(0);
    t.node_ = std::make_shared<const Node>(std::forward<T>(payload));
    return t;
  }
  explicit Term(int) {}

  std::shared_ptr<const Node> node_;
};

namespace detail {
struct SuspNode {
  Permutation perm;
  Term body;
};
struct AbsNode {
  Atom binder;
  Term body;
};
struct TupleNode {
  std::vector<Term> items;
};
struct AppNode {
  std::string fn;
  Term arg;
};
}  // namespace detail

inline Term::Term() : node_(std::make_shared<const Node>(detail::TupleNode{})) {}
inline Term Term::var(Variable v) { return make(std::move(v)); }
inline Term Term::atom(Atom a) { return make(std::move(a)); }
inline Term Term::susp(Permutation p, Term body) { return make(detail::SuspNode{std::move(p), std::move(body)}); }
inline Term Term::abs(Atom binder, Term body) { return make(detail::AbsNode{std::move(binder), std::move(body)}); }
inline Term Term::unit() { return make(detail::TupleNode{}); }
inline Term Term::tuple(const std::vector<Term>& items) {
  std::vector<Term> flat;
  for (const auto& t : items) {
    if (t.kind() == Kind::Tuple) {
      flat.insert(flat.end(), t.items().begin(), t.items().end());
    } else {
      flat.push_back(t);
    }
  }
  if (flat.size() == 1) return flat.front();
  return make(detail::TupleNode{std::move(flat)});
}
inline Term Term::app(std::string fn, Term arg) { return make(detail::AppNode{std::move(fn), std::move(arg)}); }

inline Term::Kind Term::kind() const { return static_cast<Kind>(node_->index()); }
inline const Atom& Term::atom() const { return std::get<Atom>(*node_); }
inline const Variable& Term::variable() const { return std::get<Variable>(*node_); }
inline const Permutation& Term::perm() const { return std::get<detail::SuspNode>(*node_).perm; }
inline const Atom& Term::binder() const { return std::get<detail::AbsNode>(*node_).binder; }
inline const std::vector<Term>& Term::items() const { return std::get<detail::TupleNode>(*node_).items; }
inline const std::string& Term::fn() const { return std::get<detail::AppNode>(*node_).fn; }
inline const Term& Term::body() const {
  switch (kind()) {
    case Kind::Susp: return std::get<detail::SuspNode>(*node_).body;
    case Kind::Abs: return std::get<detail::AbsNode>(*node_).body;
    case Kind::App: return std::get<detail::AppNode>(*node_).arg;
    default: throw Error("term has no body");
  }
}

inline std::strong_ordering compare(const Term& x, const Term& y) {
  if (x.node_ == y.node_) return std::strong_ordering::equal;
  if (auto c = x.kind() <=> y.kind(); c != 0) return c;
  switch (x.kind()) {
    case Term::Kind::Atom:
      return x.atom() <=> y.atom();
    case Term::Kind::Var:
      return x.variable() <=> y.variable();
    case Term::Kind::Susp:
      if (auto c = x.perm() <=> y.perm(); c != 0) return c;
      return compare(x.body(), y.body());
    case Term::Kind::Abs:
      if (auto c = x.binder() <=> y.binder(); c != 0) return c;
      return compare(x.body(), y.body());
    case Term::Kind::Tuple: {
      const auto& a = x.items();
      const auto& b = y.items();
      if (auto c = a.size() <=> b.size(); c != 0) return c;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (auto c = compare(a[i], b[i]); c != 0) return c;
      }
      return std::strong_ordering::equal;
    }
    case Term::Kind::App:
      if (auto c = x.fn() <=> y.fn(); c != 0) return c;
      return compare(x.body(), y.body());
  }
  return std::strong_ordering::equal;
}

/// Permutation action: variables are fixed, suspended permutations are
/// conjugated, everything else is structural.
inline Term act(const Permutation& pi, const Term& t) {
  if (pi.is_identity()) return t;
  switch (t.kind()) {
    case Term::Kind::Atom:
      return Term::atom(pi(t.atom()));
    case Term::Kind::Var:
      return t;
    case Term::Kind::Susp:
      return Term::susp(pi.conjugate(t.perm()), act(pi, t.body()));
    case Term::Kind::Abs:
      return Term::abs(pi(t.binder()), act(pi, t.body()));
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      items.reserve(t.items().size());
      for (const auto& i : t.items()) items.push_back(act(pi, i));
      return Term::tuple(items);
    }
    case Term::Kind::App:
      return Term::app(t.fn(), act(pi, t.body()));
  }
  return t;
}

namespace detail {
inline void collect_support(const Term& t, AtomSet& out) {
  switch (t.kind()) {
    case Term::Kind::Atom:
      out.insert(t.atom());
      return;
    case Term::Kind::Var:
      return;
    case Term::Kind::Susp: {
      auto s = t.perm().support();
      out.insert(s.begin(), s.end());
      collect_support(t.body(), out);
      return;
    }
    case Term::Kind::Abs:
      out.insert(t.binder());
      collect_support(t.body(), out);
      return;
    case Term::Kind::Tuple:
      for (const auto& i : t.items()) collect_support(i, out);
      return;
    case Term::Kind::App:
      collect_support(t.body(), out);
      return;
  }
}

inline void collect_vars(const Term& t, VariableSet& out) {
  switch (t.kind()) {
    case Term::Kind::Atom:
      return;
    case Term::Kind::Var:
      out.insert(t.variable());
      return;
    case Term::Kind::Tuple:
      for (const auto& i : t.items()) collect_vars(i, out);
      return;
    default:
      collect_vars(t.body(), out);
  }
}
}  // namespace detail

/// Raw support: every atom occurring in t, binders and suspensions included.
inline AtomSet support(const Term& t) {
  AtomSet out;
  detail::collect_support(t, out);
  return out;
}

inline VariableSet vars(const Term& t) {
  VariableSet out;
  detail::collect_vars(t, out);
  return out;
}

inline bool is_ground(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Atom:
      return true;
    case Term::Kind::Var:
      return false;
    case Term::Kind::Tuple:
      for (const auto& i : t.items()) {
        if (!is_ground(i)) return false;
      }
      return true;
    default:
      return is_ground(t.body());
  }
}

inline std::size_t term_size(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Atom:
    case Term::Kind::Var:
      return 1;
    case Term::Kind::Tuple: {
      std::size_t n = 1;
      for (const auto& i : t.items()) n += term_size(i);
      return n;
    }
    default:
      return 1 + term_size(t.body());
  }
}

/// Instantiates atoms through a possibly non-injective renaming. Unmapped
/// atoms are kept. Suspended permutations are renamed transposition by
/// transposition along their canonical decomposition.
inline Term rename_atoms(const Term& t, const std::map<Atom, Atom>& rho) {
  auto ren = [&](const Atom& a) {
    auto it = rho.find(a);
    return it == rho.end() ? a : it->second;
  };
  switch (t.kind()) {
    case Term::Kind::Atom:
      return Term::atom(ren(t.atom()));
    case Term::Kind::Var:
      return t;
    case Term::Kind::Susp: {
      std::vector<std::pair<Atom, Atom>> swaps;
      for (const auto& [a, b] : t.perm().transpositions()) swaps.emplace_back(ren(a), ren(b));
      return Term::susp(Permutation::from_transpositions(swaps), rename_atoms(t.body(), rho));
    }
    case Term::Kind::Abs:
      return Term::abs(ren(t.binder()), rename_atoms(t.body(), rho));
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      for (const auto& i : t.items()) items.push_back(rename_atoms(i, rho));
      return Term::tuple(items);
    }
    case Term::Kind::App:
      return Term::app(t.fn(), rename_atoms(t.body(), rho));
  }
  return t;
}

inline std::string to_string(const Term& t);

namespace detail {
inline void print(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Atom:
      out += atom_name(t.atom());
      return;
    case Term::Kind::Var:
      out += t.variable().name;
      return;
    case Term::Kind::Susp:
      out += t.perm().is_identity() ? std::string("id") : to_string(t.perm());
      out += "*";
      print(t.body(), out);
      return;
    case Term::Kind::Abs:
      out += "[" + atom_name(t.binder()) + "]";
      print(t.body(), out);
      return;
    case Term::Kind::Tuple:
      out += "(";
      for (std::size_t i = 0; i < t.items().size(); ++i) {
        if (i) out += ", ";
        print(t.items()[i], out);
      }
      out += ")";
      return;
    case Term::Kind::App: {
      out += t.fn();
      const Term& arg = t.body();
      if (arg.kind() == Term::Kind::Tuple) {
        if (arg.items().empty()) return;
        out += "(";
        for (std::size_t i = 0; i < arg.items().size(); ++i) {
          if (i) out += ",";
          print(arg.items()[i], out);
        }
        out += ")";
      } else {
        out += "(";
        print(arg, out);
        out += ")";
      }
      return;
    }
  }
}
}  // namespace detail

inline std::string to_string(const Term& t) {
  std::string out;
  detail::print(t, out);
  return out;
}

}  // namespace nomsos
