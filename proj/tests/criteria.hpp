#pragma once

// Procedures behind the acceptance criteria. The acceptance binary runs them
// at full size; the property suite reruns them with other seeds.

#include <chrono>
#include <functional>
#include <unordered_map>

#include "support.hpp"

namespace nomsos::testing {

struct Outcome {
  bool pass = false;
  std::string detail;
};

inline Outcome outcome(bool pass, std::string detail) { return {pass, std::move(detail)}; }

// 1 ------------------------------------------------------------------------

inline Outcome corpus_check() {
  auto start = std::chrono::steady_clock::now();
  CommandResult r = run_cli("check " + quote(corpus_path("pi.spec")));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool lines = true;
  for (const char* check : {"well-formedness:", "equivariant format:", "stratification:", "ACR format:"}) {
    auto at = r.output.find(check);
    lines = lines && at != std::string::npos && r.output.substr(at, r.output.find('\n', at) - at).ends_with("pass");
  }
  bool summary = r.output.find("4/4 checks passed") != std::string::npos;
  bool library = true;
  for (const auto& rep : run_checks(pi())) library = library && rep.passed();
  std::ostringstream d;
  d << "exit " << r.exit_code << ", " << (summary ? "4/4 checks passed" : "summary missing") << ", " << secs << " s";
  return outcome(r.exit_code == 0 && lines && summary && library && secs < 10.0, d.str());
}

// 2 ------------------------------------------------------------------------

inline Outcome open_over_out() {
  Formula f = parse_formula(pi(), "new([b]out(a,b,null)) -> (boutA(a,b), null)");
  Transition claim{normalize(f.source), normalize(f.target)};
  ProofResult r = prove(pi(), claim);
  if (!r.proved()) return outcome(false, "not provable");
  const ProofTree& root = *r.tree;
  std::vector<std::string> diffs;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) diffs.push_back(what);
  };
  expect(root.rule == "Open", "root rule " + root.rule);
  expect(root.root == claim, "root transition " + to_string(root.root));
  expect(root.children.size() == 1, "root has " + std::to_string(root.children.size()) + " premises");
  if (root.children.size() == 1) {
    const ProofTree& leaf = root.children[0];
    expect(leaf.rule == "Out", "premise rule " + leaf.rule);
    expect(to_string(leaf.root.state) == "out(a,b,null)", "premise state " + to_string(leaf.root.state));
    expect(to_string(leaf.root.residual) == "(outA(a,b), null)", "premise residual " + to_string(leaf.root.residual));
    expect(leaf.children.empty(), "premise is not a leaf");
  }
  CommandResult cli = run_cli("prove " + quote(corpus_path("pi.spec")) + " " +
                              quote("new([b]out(a,b,null)) -> (boutA(a,b), null)"));
  expect(cli.exit_code == 0, "cli exit " + std::to_string(cli.exit_code));
  expect(cli.output == render(root), "cli tree differs");
  std::string d = diffs.empty() ? "Open over Out, 2 nodes" : diffs.front();
  return outcome(diffs.empty() && root.size() == 2, d);
}

// 3 ------------------------------------------------------------------------

inline Outcome entailment_table() {
  struct Row {
    const char* text;
    bool expected;
  };
  const Row rows[] = {
      {"{c # (boutA(a,b), new([c]y)), c # boutA(a,b)} |- {c # (boutA(a,b), y)}", false},
      {"{c # (outA(a,b), x)} |- {c # out(a,b,x)}", true},
      {"{c # (boutA(a,b), y1)} |- {c # (boutA(a,b), y1)}", true},
      {"{c # (boutA(a,b), y1), c # x1} |- {c # sum(x1,null)}", true},
      {"{b # x1} |- {b # sum(x1,null)}", true},
      {"{c # (outA(a,b), y1)} |- {c # (outA(a,b), y1)}", true},
      {"{c # (outA(a,b), y1), c # x1} |- {c # sum(x1,null)}", true},
      {"{c # (boutA(a,b), y), b # a} |- {c # (boutA(a,b), y)}", true},
      {"{c # (boutA(a,b), y), b # a, c # x} |- {c # new([b]x)}", true},
      {"{b # x, b # a} |- {b # new([b]x)}", true},
  };
  int ok = 0, n = 0;
  std::string first_bad;
  for (const auto& row : rows) {
    auto [l, r] = parse_entailment(pi(), row.text);
    ++n;
    if (entails(l, r) == row.expected) ++ok;
    else if (first_bad.empty()) first_bad = row.text;
  }
  bool nf_empty = nf(parse_env(pi(), "{b # new([b]x)}")).all().empty();
  ++n;
  ok += nf_empty;
  std::string d = std::to_string(ok) + "/" + std::to_string(n) + " rows";
  if (!first_bad.empty()) d += "; wrong: " + first_bad;
  if (!nf_empty) d += "; nf({b # new([b]x)}) not empty";
  return outcome(ok == n, d);
}

// 4 ------------------------------------------------------------------------

/// Rewrites in a random order: each step picks a non-reduced assertion of
/// the multiset at random. Nullopt when the step bound is exceeded.
inline std::optional<FreshnessEnv> random_reduction(const FreshnessEnv& env, std::mt19937& rng, std::size_t bound) {
  std::vector<FreshnessAssertion> work(env.begin(), env.end());
  for (std::size_t steps = 0;; ++steps) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (!is_reduced(work[i])) open.push_back(i);
    }
    if (open.empty()) break;
    if (steps > bound) return std::nullopt;
    std::size_t pick = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
    auto next = simplify_step(work[pick]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(pick));
    work.insert(work.end(), next.begin(), next.end());
  }
  return FreshnessEnv(work.begin(), work.end());
}

inline Outcome confluence(std::uint32_t seed, int envs = 200, int orders = 10) {
  Gen g(seed, 4);
  std::vector<Variable> vs{pvar("x"), pvar("y"), pvar("p")};
  int agree = 0, total = 0;
  std::string first_bad;
  for (int i = 0; i < envs; ++i) {
    FreshnessEnv e = g.env(1 + g.below(5), 5, vs);
    FreshnessEnv expected = nf(e).all();
    FreshnessEnv reference = oracle::nf(e);
    std::size_t bound = 0;
    for (const auto& f : e) bound += term_size(f.term) + 1;
    for (int k = 0; k < orders; ++k) {
      ++total;
      auto got = random_reduction(e, g.rng(), bound);
      if (got && *got == expected && expected == reference) ++agree;
      else if (first_bad.empty()) first_bad = to_string(e);
    }
  }
  std::string d = std::to_string(agree) + "/" + std::to_string(total) + " identical normal forms";
  if (!first_bad.empty()) d += "; first disagreement on " + first_bad;
  return outcome(agree == total, d);
}

// 5 ------------------------------------------------------------------------

inline Outcome substitution_lemmas(std::uint32_t seed, int trials = 1000) {
  Gen g(seed, 4);
  std::vector<Variable> vs{pvar("x"), pvar("y"), pvar("p")};
  int failures = 0;
  std::string first_bad;
  for (int i = 0; i < trials; ++i) {
    Term t = g.coin(70) ? g.process(5, vs, true) : g.any(5, vs);
    Substitution phi = g.substitution(vs, 4, vs);
    Permutation p = g.perm();
    Substitution phi_p = act(p, phi);
    // Extension to raw terms is equivariant: (pi . phi)(t) = pi . phi(pi^-1 . t).
    bool ext = subst_apply(phi_p, t) == act(p, subst_apply(phi, act(p.inverse(), t)));
    // Substitution and permutation action: pi . phi(t) = phi^pi(pi . t).
    bool sp = act(p, subst_apply(phi, t)) == subst_apply(phi_p, act(p, t));
    bool pointwise = true;
    for (const auto& [x, u] : phi.mapping()) pointwise = pointwise && phi_p(x) == act(p, u);
    if (!(ext && sp && pointwise)) {
      ++failures;
      if (first_bad.empty()) first_bad = to_string(t) + " under " + to_string(p) + ", " + to_string(phi);
    }
  }
  std::string d = std::to_string(trials) + " triples, " + std::to_string(failures) + " failures";
  if (!first_bad.empty()) d += "; first: " + first_bad;
  return outcome(failures == 0, d);
}

// 6 ------------------------------------------------------------------------

/// Alpha-variant of a ground term: every binder renamed to an atom outside
/// the term, through the oracle's own swapping.
inline Term rebind(Gen& g, const Term& t, std::uint32_t spare) {
  switch (t.kind()) {
    case Term::Kind::Abs: {
      AtomSet used;
      oracle::atoms_of(t, used);
      Atom d = ch(spare + g.below(3));
      while (used.contains(d)) ++d.index;
      Term body = rebind(g, t.body(), spare);
      if (!g.coin(70)) return Term::abs(t.binder(), body);
      return Term::abs(d, oracle::swap(t.binder(), d, body));
    }
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      for (const auto& i : t.items()) items.push_back(rebind(g, i, spare));
      return Term::tuple(items);
    }
    case Term::Kind::App: return Term::app(t.fn(), rebind(g, t.body(), spare));
    default: return t;
  }
}

inline Outcome interpretation_lemma(std::uint32_t seed, int trials = 1000) {
  Gen g(seed, 4);
  int failures = 0;
  std::string first_bad;
  for (int i = 0; i < trials; ++i) {
    Term p = g.process(5, {}, true);
    Permutation pi_ = g.perm();
    Term plain = oracle::apply(Permutation{}, p);  // suspensions discharged
    Term q = g.coin(50) ? rebind(g, plain, 4) : g.process(5, {}, true);
    bool susp = normalize(Term::susp(pi_, p)) == normalize(act(pi_, p));
    bool equiv = normalize(act(pi_, p)) == act(pi_, normalize(p));
    bool alpha = alpha_eq(act(pi_, p), act(pi_, q)) == alpha_eq(p, q);
    AtomSet image;
    for (const auto& a : nt_support(p)) image.insert(pi_(a));
    bool supp = nt_support(act(pi_, p)) == image;
    if (!(susp && equiv && alpha && supp)) {
      ++failures;
      if (first_bad.empty()) first_bad = to_string(p) + " under " + to_string(pi_);
    }
  }
  std::string d = std::to_string(trials) + " pairs, " + std::to_string(failures) + " failures";
  if (!first_bad.empty()) d += "; first: " + first_bad;
  return outcome(failures == 0, d);
}

// 7 ------------------------------------------------------------------------

inline Outcome engine_equivariance(std::uint32_t seed, int trials = 500) {
  Gen g(seed, 3);
  Gen swaps(seed + 1, 4);
  Engine engine(pi());
  int failures = 0;
  std::size_t transitions = 0;
  std::string first_bad;
  for (int i = 0; i < trials; ++i) {
    NominalTerm state = normalize(g.process(4));
    Permutation t = swaps.transposition();
    for (const auto& d : engine.enumerate(state).derivations) {
      ++transitions;
      Transition image{act(t, d.transition.state), act(t, d.transition.residual)};
      if (!engine.prove(image).proved()) {
        ++failures;
        if (first_bad.empty()) first_bad = to_string(image);
      }
    }
  }
  std::string d = std::to_string(trials) + " states, " + std::to_string(transitions) + " transitions, " +
                  std::to_string(failures) + " failures";
  if (!first_bad.empty()) d += "; first: " + first_bad;
  return outcome(failures == 0 && transitions > 0, d);
}

// 8 ------------------------------------------------------------------------

/// Random states with a good chance of a bound output: a restricted output
/// on the restricted name is mixed into random context.
inline Term extruding_state(Gen& g) {
  Term inner = out(g.atom_index(), 3, g.process(2));
  Term ctx = g.process(2);
  Term body;
  switch (g.below(4)) {
    case 0: body = inner; break;
    case 1: body = par(inner, ctx); break;
    case 2: body = sum(ctx, inner); break;
    default: body = rep(inner); break;
  }
  Term s = nu(3, body);
  switch (g.below(3)) {
    case 0: return s;
    case 1: return par(g.process(2), s);
    default: return nu(g.atom_index(), s);
  }
}

inline Outcome acr_alpha(std::uint32_t seed, int states = 100) {
  Gen g(seed, 3);
  Engine engine(pi());
  const auto& sig = pi().signature.base;
  int failures = 0;
  std::size_t checked = 0;
  std::string first_bad;
  for (int i = 0; i < states; ++i) {
    NominalTerm state = normalize(g.coin(70) ? extruding_state(g) : g.process(4));
    for (const auto& d : engine.enumerate(state).derivations) {
      auto label = action_of(d.transition.residual.term());
      if (!label) continue;
      for (const auto& b : bn_eval(*pi().bn, sig, *label)) {
        AtomSet avoid = nt_support(state);
        for (const auto& x : support(d.transition.residual.term())) avoid.insert(x);
        Atom a = fresh_atom(CH, avoid);
        Transition swapped{state, act(Permutation::swap(a, b), d.transition.residual)};
        ++checked;
        if (!engine.prove(swapped).proved()) {
          ++failures;
          if (first_bad.empty()) first_bad = to_string(swapped);
        }
      }
    }
  }
  std::string d = std::to_string(states) + " states, " + std::to_string(checked) + " bound outputs, " +
                  std::to_string(failures) + " failures";
  if (!first_bad.empty()) d += "; first: " + first_bad;
  return outcome(failures == 0 && checked > 0, d);
}

// 9 ------------------------------------------------------------------------

inline Outcome broken_control() {
  Spec broken = load_spec(corpus_path("pi-broken.spec"));
  auto acr = check_acr(broken);
  const RuleReport* r = acr.find("ParResL");
  bool library = acr.status() == Status::Fail && r && r->status == Status::Fail && r->constraint == "(iii)";
  CommandResult cli = run_cli("check " + quote(corpus_path("pi-broken.spec")));
  bool names = cli.output.find("ParResL: fail (iii)") != std::string::npos;
  std::string d = "check_acr " + std::string(library ? "fails (iii) on ParResL" : "did not fail (iii) on ParResL") +
                  ", exit " + std::to_string(cli.exit_code);
  return outcome(library && names && cli.exit_code == 1, d);
}

// 10 -----------------------------------------------------------------------

/// Every ground process with at most `size` process constructors over the
/// atoms a and b, binders included.
inline std::vector<std::vector<Term>> processes_by_size(unsigned size) {
  std::vector<std::vector<Term>> by(size + 1);
  if (size >= 1) by[1].push_back(null());
  for (unsigned n = 2; n <= size; ++n) {
    for (const auto& p : by[n - 1]) {
      by[n].push_back(tau(p));
      by[n].push_back(rep(p));
      for (std::uint32_t a = 0; a < 2; ++a) {
        by[n].push_back(nu(a, p));
        for (std::uint32_t b = 0; b < 2; ++b) {
          by[n].push_back(out(a, b, p));
          by[n].push_back(in(a, b, p));
        }
      }
    }
    for (unsigned k = 1; k + 1 < n; ++k) {
      for (const auto& p : by[k]) {
        for (const auto& q : by[n - 1 - k]) {
          by[n].push_back(par(p, q));
          by[n].push_back(sum(p, q));
        }
      }
    }
  }
  return by;
}

/// The term with every atom and binder replaced by one placeholder atom.
inline Term erase_atoms(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Atom: return at(0);
    case Term::Kind::Abs: return Term::abs(ch(0), erase_atoms(t.body()));
    case Term::Kind::Susp: return erase_atoms(oracle::apply(t.perm(), t.body()));
    case Term::Kind::Tuple: {
      std::vector<Term> items;
      for (const auto& i : t.items()) items.push_back(erase_atoms(i));
      return Term::tuple(items);
    }
    case Term::Kind::App: return Term::app(t.fn(), erase_atoms(t.body()));
    default: return t;
  }
}

inline std::string skeleton(const Term& t) { return to_string(erase_atoms(t)); }

/// Pairs with different skeletons are inequivalent for both sides: swapping
/// preserves skeletons (oracle), and canonical forms are checked to keep the
/// skeleton of their term (library). All same-skeleton pairs are compared.
inline Outcome alpha_oracle(unsigned size = 5) {
  std::vector<Term> all;
  for (const auto& level : processes_by_size(size)) all.insert(all.end(), level.begin(), level.end());
  std::unordered_map<std::string, std::vector<std::size_t>> buckets;
  std::vector<NominalTerm> canon;
  canon.reserve(all.size());
  std::size_t skeleton_mismatch = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    canon.push_back(normalize(all[i]));
    std::string sk = skeleton(all[i]);
    if (skeleton(canon.back().term()) != sk) ++skeleton_mismatch;
    buckets[sk].push_back(i);
  }
  std::size_t pairs = 0, disagreements = 0, equivalent = 0;
  std::string first_bad;
  for (const auto& [sk, members] : buckets) {
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x; y < members.size(); ++y) {
        const Term& p = all[members[x]];
        const Term& q = all[members[y]];
        bool lib = alpha_eq(p, q);
        bool ref = oracle::alpha(p, q);
        ++pairs;
        equivalent += ref;
        if (lib != ref) {
          ++disagreements;
          if (first_bad.empty()) first_bad = to_string(p) + " vs " + to_string(q);
        }
      }
    }
  }
  std::ostringstream d;
  d << all.size() << " terms, " << pairs << " same-skeleton pairs (" << equivalent << " equivalent), "
    << disagreements << " disagreements";
  if (skeleton_mismatch) d << ", " << skeleton_mismatch << " canonical forms changed skeleton";
  if (!first_bad.empty()) d << "; first: " << first_bad;
  return outcome(disagreements == 0 && skeleton_mismatch == 0, d.str());
}

}  // namespace nomsos::testing
