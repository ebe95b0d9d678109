#pragma once

// Shared fixtures: the corpus, random pi-calculus terms, and independent
// reference implementations used as oracles.

#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "nomsos/nomsos.hpp"

namespace nomsos::testing {

inline std::string corpus_path(const std::string& file) { return std::string(NOMSOS_CORPUS_DIR) + "/" + file; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const Spec& pi() {
  static const Spec spec = load_spec(corpus_path("pi.spec"));
  return spec;
}

inline const AtomSort CH{"ch"};
inline const NominalSort PR = NominalSort::base("pr");

inline Atom ch(std::uint32_t i) { return Atom{CH, i}; }
inline Term at(std::uint32_t i) { return Term::atom(ch(i)); }
inline Variable pvar(const std::string& name) { return Variable{name, PR}; }

inline Term fn(const std::string& f, std::vector<Term> args = {}) { return Term::app(f, Term::tuple(args)); }
inline Term null() { return fn("null"); }
inline Term tau(Term p) { return Term::app("tau", p); }
inline Term rep(Term p) { return Term::app("rep", p); }
inline Term par(Term p, Term q) { return fn("par", {p, q}); }
inline Term sum(Term p, Term q) { return fn("sum", {p, q}); }
inline Term out(std::uint32_t a, std::uint32_t b, Term p) { return fn("out", {at(a), at(b), p}); }
inline Term in(std::uint32_t a, std::uint32_t b, Term p) { return fn("in", {at(a), Term::abs(ch(b), p)}); }
inline Term nu(std::uint32_t b, Term p) { return Term::app("new", Term::abs(ch(b), p)); }

inline Term parse(const std::string& text) { return parse_term(pi(), text); }
inline NominalTerm nt(const std::string& text) { return normalize(parse(text)); }

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

/// Runs the CLI with a shell-quoted argument string; stdout and stderr merged.
inline CommandResult run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + NOMSOS_CLI + "\" " + args + " 2>&1";
  CommandResult r;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.output.append(buf.data(), n);
  int status = pclose(f);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

// ---------------------------------------------------------------------------
// Random terms over the pi-calculus signature.

class Gen {
 public:
  explicit Gen(std::uint32_t seed, std::uint32_t atoms = 3) : rng_(seed), atoms_(atoms) {}

  std::mt19937& rng() { return rng_; }
  unsigned below(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }
  bool coin(unsigned percent = 50) { return below(100) < percent; }
  std::uint32_t atom_index() { return below(atoms_); }

  /// Random process of depth at most `depth`. With `vars` non-empty, variables
  /// and suspended variables of sort pr appear at the leaves; `suspensions`
  /// also wraps inner subterms in suspensions.
  Term process(unsigned depth, const std::vector<Variable>& vars = {}, bool suspensions = false) {
    if (depth <= 1) return leaf(vars);
    auto sub = [&] { return process(depth - 1, vars, suspensions); };
    Term t;
    switch (below(9)) {
      case 0: t = leaf(vars); break;
      case 1: t = tau(sub()); break;
      case 2: t = in(atom_index(), atom_index(), sub()); break;
      case 3: t = out(atom_index(), atom_index(), sub()); break;
      case 4: t = par(sub(), sub()); break;
      case 5: t = sum(sub(), sub()); break;
      case 6: t = rep(sub()); break;
      default: t = nu(atom_index(), sub()); break;
    }
    if (suspensions && coin(15)) t = Term::susp(perm(), t);
    return t;
  }

  Permutation perm(unsigned max_swaps = 3) {
    Permutation p;
    unsigned n = below(max_swaps + 1);
    for (unsigned i = 0; i < n; ++i) p = Permutation::swap(ch(atom_index()), ch(atom_index())).compose(p);
    return p;
  }

  Permutation transposition() {
    std::uint32_t a = atom_index();
    std::uint32_t b = atom_index();
    while (b == a) b = atom_index();
    return Permutation::swap(ch(a), ch(b));
  }

  Substitution substitution(const std::vector<Variable>& vars, unsigned depth, const std::vector<Variable>& range = {}) {
    Substitution phi;
    for (const auto& x : vars) {
      if (coin(80)) phi.bind(x, process(depth, range, true));
    }
    return phi;
  }

  /// Random raw term of any shape the freshness rules touch.
  Term any(unsigned depth, const std::vector<Variable>& vars) {
    if (depth <= 1) return coin(30) ? at(atom_index()) : leaf(vars);
    switch (below(6)) {
      case 0: return at(atom_index());
      case 1: return Term::abs(ch(atom_index()), any(depth - 1, vars));
      case 2: return Term::tuple({any(depth - 1, vars), any(depth - 1, vars)});
      case 3: return Term::susp(perm(), any(depth - 1, vars));
      default: return process(depth, vars, true);
    }
  }

  FreshnessEnv env(unsigned size, unsigned depth, const std::vector<Variable>& vars) {
    FreshnessEnv e;
    for (unsigned i = 0; i < size; ++i) e.insert({ch(atom_index()), any(depth, vars)});
    return e;
  }

 private:
  Term leaf(const std::vector<Variable>& vars) {
    if (!vars.empty() && coin(60)) {
      Term x = Term::var(vars[below(static_cast<unsigned>(vars.size()))]);
      return coin(40) ? Term::susp(perm(), x) : x;
    }
    return null();
  }

  std::mt19937 rng_;
  std::uint32_t atoms_;
};

// ---------------------------------------------------------------------------
// Oracles. These deliberately avoid the library's canonical forms.

namespace oracle {

/// Permutation action by direct recursion; suspensions over non-variables are
/// pushed inward, those over variables are composed.
inline Term apply(const Permutation& p, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Atom: return Term::atom(p(t.atom()));
    case Term::Kind::Var: return Term::susp(p, t);
    case Term::Kind::Susp:
      if (t.body().is_var()) return Term::susp(p.compose(t.perm()), t.body());
      return apply(p, apply(t.perm(), t.body()));
    case Term::Kind::Abs: return Term::abs(p(t.binder()), apply(p, t.body()));
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      for (const auto& i : t.items()) items.push_back(apply(p, i));
      return Term::tuple(items);
    }
    case Term::Kind::App: return Term::app(t.fn(), apply(p, t.body()));
  }
  return t;
}

inline Term swap(const Atom& a, const Atom& b, const Term& t) { return apply(Permutation::swap(a, b), t); }

inline void atoms_of(const Term& t, AtomSet& out) {
  switch (t.kind()) {
    case Term::Kind::Atom: out.insert(t.atom()); break;
    case Term::Kind::Var: break;
    case Term::Kind::Susp:
      for (const auto& a : t.perm().support()) out.insert(a);
      atoms_of(t.body(), out);
      break;
    case Term::Kind::Abs:
      out.insert(t.binder());
      atoms_of(t.body(), out);
      break;
    case Term::Kind::Tuple:
      for (const auto& i : t.items()) atoms_of(i, out);
      break;
    case Term::Kind::App: atoms_of(t.body(), out); break;
  }
}

/// Alpha-equivalence of ground suspension-free terms by rebinding: two
/// abstractions agree when swapping both binders with a common fresh atom
/// makes the bodies agree.
inline bool alpha(const Term& p, const Term& q) {
  if (p.kind() != q.kind()) return false;
  switch (p.kind()) {
    case Term::Kind::Atom: return p.atom() == q.atom();
    case Term::Kind::Var: return p.variable() == q.variable();
    case Term::Kind::Susp: return false;
    case Term::Kind::Abs: {
      if (p.binder().sort != q.binder().sort) return false;
      AtomSet used;
      atoms_of(p, used);
      atoms_of(q, used);
      Atom c = p.binder();
      c.index = 0;
      while (used.contains(c)) ++c.index;
      return alpha(swap(p.binder(), c, p.body()), swap(q.binder(), c, q.body()));
    }
    case Term::Kind::Tuple: {
      if (p.items().size() != q.items().size()) return false;
      for (std::size_t i = 0; i < p.items().size(); ++i) {
        if (!alpha(p.items()[i], q.items()[i])) return false;
      }
      return true;
    }
    case Term::Kind::App: return p.fn() == q.fn() && alpha(p.body(), q.body());
  }
  return false;
}

/// Free atoms of a ground suspension-free term.
inline AtomSet free_atoms(const Term& t) {
  AtomSet out;
  switch (t.kind()) {
    case Term::Kind::Atom: out.insert(t.atom()); break;
    case Term::Kind::Abs:
      out = free_atoms(t.body());
      out.erase(t.binder());
      break;
    case Term::Kind::Tuple:
      for (const auto& i : t.items()) {
        auto s = free_atoms(i);
        out.insert(s.begin(), s.end());
      }
      break;
    case Term::Kind::App: out = free_atoms(t.body()); break;
    default: break;
  }
  return out;
}

/// Normal form of a # t by structural recursion: the residual a' # x facts,
/// with a # a recorded as an atom-atom fact.
inline void nf(const Atom& a, const Term& t, FreshnessEnv& out) {
  switch (t.kind()) {
    case Term::Kind::Atom:
      if (t.atom() == a) out.insert({a, t});
      break;
    case Term::Kind::Var: out.insert({a, t}); break;
    case Term::Kind::Susp: nf(t.perm().inverse()(a), t.body(), out); break;
    case Term::Kind::Abs:
      if (t.binder() != a) nf(a, t.body(), out);
      break;
    case Term::Kind::Tuple:
      for (const auto& i : t.items()) nf(a, i, out);
      break;
    case Term::Kind::App: nf(a, t.body(), out); break;
  }
}

inline FreshnessEnv nf(const FreshnessEnv& env) {
  FreshnessEnv out;
  for (const auto& f : env) nf(f.atom, f.term, out);
  return out;
}

}  // namespace oracle

}  // namespace nomsos::testing
