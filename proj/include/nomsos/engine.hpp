#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "nomsos/spec.hpp"

namespace nomsos {

struct Budget {
  unsigned depth = 1000;
  unsigned fresh = 2;
};

struct Transition {
  NominalTerm state;
  NominalTerm residual;

  auto operator<=>(const Transition&) const = default;
  bool operator==(const Transition&) const = default;
};

inline std::string to_string(const Transition& t) { return to_string(t.state) + " -> " + to_string(t.residual); }

struct ProofTree {
  Transition root;
  std::string rule;
  std::map<Atom, Atom> atoms;
  Substitution subst;
  std::vector<ProofTree> children;
  std::vector<std::pair<Atom, NominalTerm>> freshness;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
  }
  std::size_t height() const {
    std::size_t h = 0;
    for (const auto& c : children) h = std::max(h, c.height());
    return h + 1;
  }
};

// ---------------------------------------------------------------------------
// Matching

struct MatchResult {
  std::map<Atom, Atom> atoms;
  std::map<Variable, NominalTerm> subst;

  bool operator==(const MatchResult&) const = default;
  auto operator<=>(const MatchResult&) const = default;

  Substitution substitution() const {
    Substitution out;
    for (const auto& [x, v] : subst) out.bind(x, v.term());
    return out;
  }
};

/// Schematic atoms of the pattern and the atoms an unbound one may take
/// besides those forced by the subject.
struct MatchContext {
  AtomSet metas;
  AtomSet candidates;
};

namespace detail {

inline std::optional<Atom> lookup_atom(const Atom& a, const MatchResult& r, const MatchContext& ctx) {
  if (!ctx.metas.contains(a)) return a;
  auto it = r.atoms.find(a);
  if (it == r.atoms.end()) return std::nullopt;
  return it->second;
}

/// Extends r so that every schematic atom of `atoms` is assigned, trying
/// each candidate of the right sort.
inline std::vector<MatchResult> assign_atoms(const AtomSet& atoms, const MatchResult& r, const MatchContext& ctx) {
  std::vector<MatchResult> out{r};
  for (const auto& m : atoms) {
    if (!ctx.metas.contains(m) || r.atoms.contains(m)) continue;
    std::vector<MatchResult> next;
    for (const auto& cur : out) {
      for (const auto& c : ctx.candidates) {
        if (c.sort != m.sort) continue;
        MatchResult e = cur;
        e.atoms[m] = c;
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline void match_into(const Term& pat, const Term& subj, const MatchResult& r, const MatchContext& ctx,
                       std::vector<MatchResult>& out) {
  using K = Term::Kind;
  switch (pat.kind()) {
    case K::Var: {
      NominalTerm v = normalize(subj);
      auto it = r.subst.find(pat.variable());
      if (it != r.subst.end()) {
        if (it->second == v) out.push_back(r);
        return;
      }
      MatchResult e = r;
      e.subst.emplace(pat.variable(), std::move(v));
      out.push_back(std::move(e));
      return;
    }
    case K::Atom: {
      if (!subj.is_atom() || subj.atom().sort != pat.atom().sort) return;
      auto a = lookup_atom(pat.atom(), r, ctx);
      if (a) {
        if (*a == subj.atom()) out.push_back(r);
        return;
      }
      MatchResult e = r;
      e.atoms[pat.atom()] = subj.atom();
      out.push_back(std::move(e));
      return;
    }
    case K::Susp: {
      for (const auto& e : assign_atoms(pat.perm().support(), r, ctx)) {
        Term pi = rename_atoms(Term::susp(pat.perm(), Term::unit()), e.atoms);
        Term moved = normalize(act(pi.perm().inverse(), subj)).term();
        match_into(pat.body(), moved, e, ctx, out);
      }
      return;
    }
    case K::Abs: {
      if (subj.kind() != K::Abs || subj.binder().sort != pat.binder().sort) return;
      const Atom& d = subj.binder();
      const Term& q = subj.body();
      AtomSet fv = free_atoms(subj);
      auto with_binder = [&](const MatchResult& e, const Atom& c) {
        if (c == d) {
          match_into(pat.body(), q, e, ctx, out);
        } else if (!fv.contains(c)) {
          match_into(pat.body(), normalize(act(Permutation::swap(c, d), q)).term(), e, ctx, out);
        }
      };
      if (auto c = lookup_atom(pat.binder(), r, ctx)) {
        with_binder(r, *c);
        return;
      }
      std::set<Atom> choices{d};
      for (const auto& c : ctx.candidates) {
        if (c.sort == d.sort) choices.insert(c);
      }
      for (const auto& c : choices) {
        MatchResult e = r;
        e.atoms[pat.binder()] = c;
        with_binder(e, c);
      }
      return;
    }
    case K::Tuple: {
      if (subj.kind() != K::Tuple || subj.items().size() != pat.items().size()) return;
      std::vector<MatchResult> cur{r};
      for (std::size_t i = 0; i < pat.items().size() && !cur.empty(); ++i) {
        std::vector<MatchResult> next;
        for (const auto& e : cur) match_into(pat.items()[i], subj.items()[i], e, ctx, next);
        cur = std::move(next);
      }
      out.insert(out.end(), cur.begin(), cur.end());
      return;
    }
    case K::App:
      if (subj.kind() != K::App || subj.fn() != pat.fn()) return;
      match_into(pat.body(), subj.body(), r, ctx, out);
      return;
  }
}

}  // namespace detail

/// All extensions of `partial` under which the pattern denotes `subject`.
/// Results are deduplicated and sorted.
inline std::vector<MatchResult> nominal_match(const Term& pattern, const NominalTerm& subject,
                                              const MatchResult& partial, const MatchContext& ctx) {
  std::vector<MatchResult> out;
  detail::match_into(pattern, subject.term(), partial, ctx, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Search

struct Derivation {
  Transition transition;
  ProofTree tree;
  bool representative = false;
};

struct Enumeration {
  std::vector<Derivation> derivations;
  bool truncated = false;
};

struct ProofResult {
  std::optional<ProofTree> tree;
  bool truncated = false;

  bool proved() const { return tree.has_value(); }
};

/// Proof search over a spec. Results are memoised per engine, so one engine
/// should only be used with one budget.
class Engine {
 public:
  Engine(const Spec& spec, Budget budget = {}) : spec_(spec), budget_(budget) {}

  const Budget& budget() const { return budget_; }

  /// Free atoms of the given terms plus `budget.fresh` fresh atoms per sort.
  AtomSet pool(const std::vector<NominalTerm>& terms) const {
    AtomSet used;
    for (const auto& t : terms) {
      auto s = nt_support(t);
      used.insert(s.begin(), s.end());
    }
    AtomSet out = used;
    for (const auto& sort : spec_.signature.base.atom_sorts) {
      for (const auto& a : fresh_atoms(sort, used, budget_.fresh)) out.insert(a);
    }
    return out;
  }

  Enumeration enumerate(const NominalTerm& state) {
    Enumeration out = transitions(state, pool({state}), budget_.depth);
    AtomSet supp = nt_support(state);
    for (auto& d : out.derivations) {
      for (const auto& a : nt_support(d.transition.residual)) {
        if (!supp.contains(a)) d.representative = true;
      }
    }
    return out;
  }

  ProofResult prove(const Transition& claim) {
    Enumeration all = transitions(claim.state, pool({claim.state, claim.residual}), budget_.depth);
    ProofResult out;
    out.truncated = all.truncated;
    for (const auto& d : all.derivations) {
      if (d.transition.residual == claim.residual) {
        out.tree = d.tree;
        break;
      }
    }
    return out;
  }

  /// Every transition of `state` derivable with atoms drawn from `pool` and
  /// the state's own atoms, within `depth` nested rule applications.
  Enumeration transitions(const NominalTerm& state, const AtomSet& pool, unsigned depth) {
    if (depth == 0) return Enumeration{{}, true};
    auto key = std::pair{state, pool};
    if (auto it = memo_.find(key); it != memo_.end()) {
      const auto& [d0, result] = it->second;
      if (d0 == depth || (!result.truncated && depth >= d0)) return result;
    }
    Enumeration out;
    std::map<NominalTerm, Derivation> found;
    for (const auto& rule : spec_.rules) apply(rule, state, pool, depth, out, found);
    std::vector<Derivation> ds;
    for (auto& [r, d] : found) ds.push_back(std::move(d));
    std::stable_sort(ds.begin(), ds.end(), [](const Derivation& x, const Derivation& y) {
      return std::pair{to_string(x.transition.residual), x.transition.residual} <
             std::pair{to_string(y.transition.residual), y.transition.residual};
    });
    out.derivations = std::move(ds);
    memo_[key] = {depth, out};
    return out;
  }

 private:
  struct Partial {
    MatchResult match;
    std::vector<ProofTree> children;
  };

  static Term instantiate(const Term& t, const MatchResult& m) {
    return subst_apply(m.substitution(), rename_atoms(t, m.atoms));
  }

  static bool grounded(const Term& t, const MatchResult& m, const MatchContext& ctx) {
    for (const auto& v : vars(t)) {
      if (!m.subst.contains(v)) return false;
    }
    for (const auto& a : support(t)) {
      if (ctx.metas.contains(a) && !m.atoms.contains(a)) return false;
    }
    return true;
  }

  void apply(const Rule& rule, const NominalTerm& state, const AtomSet& pool, unsigned depth, Enumeration& out,
             std::map<NominalTerm, Derivation>& found) {
    MatchContext ctx;
    ctx.metas = AtomSet(rule.metas.begin(), rule.metas.end());
    ctx.candidates = pool;
    auto raw = support(state.term());
    ctx.candidates.insert(raw.begin(), raw.end());

    std::vector<Partial> cur;
    for (auto& m : nominal_match(rule.conclusion.source, state, {}, ctx)) cur.push_back({std::move(m), {}});

    for (const auto& premise : rule.premises) {
      std::vector<Partial> next;
      for (const auto& p : cur) {
        MatchContext local = ctx;
        for (const auto& [m, a] : p.match.atoms) local.candidates.insert(a);
        for (const auto& v : vars(premise.source)) {
          if (!p.match.subst.contains(v)) return;  // unschedulable
        }
        for (const auto& m : detail::assign_atoms(support(premise.source), p.match, local)) {
          NominalTerm child = normalize(instantiate(premise.source, m));
          AtomSet child_pool = pool;
          for (const auto& [k, a] : m.atoms) child_pool.insert(a);
          Enumeration sub = transitions(child, child_pool, depth - 1);
          out.truncated = out.truncated || sub.truncated;
          for (const auto& d : sub.derivations) {
            for (auto& e : nominal_match(premise.target, d.transition.residual, m, local)) {
              Partial q{std::move(e), p.children};
              q.children.push_back(d.tree);
              next.push_back(std::move(q));
            }
          }
        }
      }
      cur = std::move(next);
    }

    for (const auto& p : cur) {
      MatchContext local = ctx;
      for (const auto& [m, a] : p.match.atoms) local.candidates.insert(a);
      AtomSet rest;
      for (const auto& a : rule.metas) {
        if (!p.match.atoms.contains(a)) rest.insert(a);
      }
      for (const auto& m : detail::assign_atoms(rest, p.match, local)) {
        if (!grounded(rule.conclusion.target, m, ctx)) continue;
        bool ok = true;
        for (const auto& [v, ctors] : rule.unless) {
          auto it = m.subst.find(v);
          if (it == m.subst.end()) {
            ok = false;
          } else if (it->second.term().kind() == Term::Kind::App && ctors.contains(it->second.term().fn())) {
            ok = false;
          }
        }
        if (!ok) continue;
        std::vector<std::pair<Atom, NominalTerm>> checks;
        for (const auto& f : rule.env) {
          if (!grounded(f.term, m, ctx)) {
            ok = false;
            break;
          }
          Atom a = rename_atoms(Term::atom(f.atom), m.atoms).atom();
          NominalTerm v = normalize(instantiate(f.term, m));
          if (!nt_fresh(a, v)) {
            ok = false;
            break;
          }
          checks.emplace_back(a, v);
        }
        if (!ok) continue;
        NominalTerm residual = normalize(instantiate(rule.conclusion.target, m));
        if (found.contains(residual)) continue;
        ProofTree tree;
        tree.root = {state, residual};
        tree.rule = rule.name;
        tree.atoms = m.atoms;
        tree.subst = m.substitution();
        tree.children = p.children;
        tree.freshness = std::move(checks);
        found.emplace(residual, Derivation{tree.root, std::move(tree), false});
      }
    }
  }

  const Spec& spec_;
  Budget budget_;
  std::map<std::pair<NominalTerm, AtomSet>, std::pair<unsigned, Enumeration>> memo_;
};

inline Enumeration enumerate(const Spec& spec, const NominalTerm& state, Budget budget = {}) {
  return Engine(spec, budget).enumerate(state);
}

inline ProofResult prove(const Spec& spec, const Transition& claim, Budget budget = {}) {
  return Engine(spec, budget).prove(claim);
}

// ---------------------------------------------------------------------------
// Replay

/// Re-checks every node of a tree against its rule: the instantiated rule
/// must denote the node's transition and children, and every freshness
/// condition must hold. Returns an empty string on success.
inline std::string replay(const Spec& spec, const ProofTree& tree) {
  const Rule* rule = spec.find_rule(tree.rule);
  if (!rule) return "unknown rule " + tree.rule;
  auto inst = [&](const Term& t) { return subst_apply(tree.subst, rename_atoms(t, tree.atoms)); };
  auto where = tree.rule + " at " + to_string(tree.root);
  try {
    if (!tree.subst.is_ground()) return where + ": substitution not ground";
    if (normalize(inst(rule->conclusion.source)) != tree.root.state) return where + ": source mismatch";
    if (normalize(inst(rule->conclusion.target)) != tree.root.residual) return where + ": target mismatch";
    if (tree.children.size() != rule->premises.size()) return where + ": wrong number of premises";
    for (std::size_t i = 0; i < tree.children.size(); ++i) {
      const auto& c = tree.children[i];
      if (normalize(inst(rule->premises[i].source)) != c.root.state) return where + ": premise source mismatch";
      if (normalize(inst(rule->premises[i].target)) != c.root.residual) return where + ": premise target mismatch";
      if (auto e = replay(spec, c); !e.empty()) return e;
    }
    for (const auto& f : rule->env) {
      Atom a = rename_atoms(Term::atom(f.atom), tree.atoms).atom();
      if (!holds_ground(a, rename_atoms(f.term, tree.atoms), tree.subst)) {
        return where + ": freshness " + to_string(f) + " fails";
      }
    }
    for (const auto& [v, ctors] : rule->unless) {
      const Term* t = tree.subst.find(v);
      if (!t) return where + ": label " + v.name + " unbound";
      if (t->kind() == Term::Kind::App && ctors.contains(t->fn())) return where + ": excluded label";
    }
  } catch (const Error& e) {
    return where + ": " + e.what();
  }
  return {};
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

struct Block {
  std::vector<std::string> lines;
  std::size_t width = 0;
};

inline Block render_block(const ProofTree& t) {
  std::vector<Block> kids;
  for (const auto& c : t.children) kids.push_back(render_block(c));
  Block above;
  const std::string gap = "    ";
  std::size_t rows = 0;
  for (const auto& k : kids) rows = std::max(rows, k.lines.size());
  for (std::size_t r = 0; r < rows; ++r) {
    std::string line;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const auto& k = kids[i];
      std::size_t offset = rows - k.lines.size();
      std::string cell = r >= offset ? k.lines[r - offset] : "";
      cell += std::string(k.width - display_width(cell), ' ');
      if (i) line += gap;
      line += cell;
    }
    above.lines.push_back(line);
  }
  for (std::size_t i = 0; i < kids.size(); ++i) above.width += kids[i].width + (i ? gap.size() : 0);

  std::string conclusion = to_string(t.root);
  std::string label = t.rule;
  for (std::size_t i = 0; i < t.freshness.size(); ++i) {
    label += (i ? ", " : ", as ") + atom_name(t.freshness[i].first) + " # " + to_string(t.freshness[i].second);
  }
  std::size_t bar = std::max(above.width, display_width(conclusion));
  Block out;
  for (auto& l : above.lines) {
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out.lines.push_back(l);
  }
  out.lines.push_back(std::string(bar, '-') + " " + label);
  out.lines.push_back(conclusion);
  for (const auto& l : out.lines) out.width = std::max(out.width, display_width(l));
  return out;
}

}  // namespace detail

/// Inference-tree layout: premises side by side above a rule line carrying
/// the rule name and discharged freshness conditions.
inline std::string render(const ProofTree& t) {
  std::string out;
  for (const auto& l : detail::render_block(t).lines) out += l + "\n";
  return out;
}

}  // namespace nomsos
