#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nomsos/spec.hpp"

namespace nomsos {

struct SourcePos {
  int line = 1;
  int col = 1;
};

class ParseError : public Error {
 public:
  ParseError(SourcePos pos, const std::string& msg)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg), pos_(pos) {}
  explicit ParseError(const std::string& msg) : Error(msg) {}

  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

namespace detail {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++pos.col;
      }
    }
  };
  static const char* two_char[] = {"->", "|-", "!="};
  static const std::string_view compose_glyph = "\xE2\x88\x98";  // ∘
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = pos;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (src.substr(i, compose_glyph.size()) == compose_glyph) {
      t.kind = Tok::Punct;
      t.text = ".";
      advance(compose_glyph.size());
    } else {
      bool matched = false;
      for (const char* p : two_char) {
        if (src.substr(i, 2) == p) {
          t.kind = Tok::Punct;
          t.text = p;
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view(";:,()[]{}*#@=+.").find(c) == std::string_view::npos) {
          throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
        advance(1);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = pos;
  out.push_back(end);
  return out;
}

// Untyped syntax, resolved against a signature afterwards.

struct PSort {
  enum class K { Name, Unit, Abs, Prod } k = K::Name;
  SourcePos pos;
  std::string name;
  std::vector<PSort> kids;
};

struct PTerm {
  enum class K { Ident, Call, Tuple, Abs, Susp } k = K::Ident;
  SourcePos pos;
  std::string name;
  std::vector<std::pair<std::string, std::string>> perm;
  std::vector<PTerm> kids;
};

struct PFormula {
  SourcePos pos;
  PTerm source;
  PTerm target;
};

struct PAssertion {
  SourcePos pos;
  std::string atom;
  PTerm term;
};

struct PRule {
  SourcePos pos;
  std::string name;
  std::vector<std::pair<std::string, std::optional<std::string>>> forall;
  std::vector<PFormula> premises;
  std::vector<PAssertion> fresh;
  std::vector<std::pair<std::string, std::vector<std::string>>> unless;
  std::optional<PFormula> conclusion;
};

struct PConstraint {
  SourcePos pos;
  std::string lhs;
  std::string rhs;
  bool equal = false;
};

struct POrder {
  SourcePos pos;
  PTerm head;
  PTerm label;
  std::vector<PConstraint> when;
  std::optional<unsigned> constant;
  std::vector<std::pair<std::string, PTerm>> calls;
};

struct PDecl {
  enum class K { AtomSorts, BaseSorts, StateSort, ResidualSort, Func, Bn, Var, Label, Rule, Order } k;
  SourcePos pos;
  std::vector<std::string> names;
  std::vector<PSort> sorts;
  std::vector<unsigned> positions;
  std::optional<PRule> rule;
  std::optional<POrder> order;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  bool at_end() const { return peek().kind == Tok::End; }
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(idx_ + k, toks_.size() - 1)]; }
  bool is(const char* text, std::size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind != Tok::End && t.text == text;
  }
  bool accept(const char* text) {
    if (!is(text)) return false;
    ++idx_;
    return true;
  }
  const Token& expect(const char* text) {
    if (!is(text)) fail(std::string("expected '") + text + "'");
    return toks_[idx_++];
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return toks_[idx_++].text;
  }
  unsigned number() {
    if (peek().kind != Tok::Number) fail("expected a number");
    return static_cast<unsigned>(std::stoul(toks_[idx_++].text));
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.pos, msg + ", found " + found);
  }

  // sort := factor ("*" factor)*
  PSort sort() {
    PSort first = sort_factor();
    if (!is("*")) return first;
    PSort prod;
    prod.k = PSort::K::Prod;
    prod.pos = first.pos;
    prod.kids.push_back(std::move(first));
    while (accept("*")) prod.kids.push_back(sort_factor());
    return prod;
  }

  PSort sort_factor() {
    PSort s;
    s.pos = peek().pos;
    if (accept("[")) {
      s.k = PSort::K::Abs;
      s.name = ident("atom sort name");
      expect("]");
      s.kids.push_back(sort_factor());
      return s;
    }
    if (accept("(")) {
      if (accept(")")) {
        s.k = PSort::K::Unit;
        return s;
      }
      PSort inner = sort();
      expect(")");
      return inner;
    }
    if (peek().kind == Tok::Number && peek().text == "1") {
      ++idx_;
      s.k = PSort::K::Unit;
      return s;
    }
    s.name = ident("sort");
    return s;
  }

  std::optional<std::vector<std::pair<std::string, std::string>>> try_perm() {
    std::size_t save = idx_;
    std::vector<std::pair<std::string, std::string>> out;
    if (!perm_factor(out)) {
      idx_ = save;
      return std::nullopt;
    }
    while (is(".")) {
      ++idx_;
      if (!perm_factor(out)) {
        idx_ = save;
        return std::nullopt;
      }
    }
    return out;
  }

  bool perm_factor(std::vector<std::pair<std::string, std::string>>& out) {
    if (!is("(")) return false;
    if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::Ident && is(")", 3)) {
      out.emplace_back(peek(1).text, peek(2).text);
      idx_ += 4;
      return true;
    }
    std::size_t save = idx_;
    ++idx_;
    auto inner = try_perm();
    if (!inner || !accept(")")) {
      idx_ = save;
      return false;
    }
    out.insert(out.end(), inner->begin(), inner->end());
    return true;
  }

  PTerm term() {
    PTerm t;
    t.pos = peek().pos;
    if (peek().kind == Tok::Ident && peek().text == "id" && is("*", 1)) {
      idx_ += 2;
      t.k = PTerm::K::Susp;
      t.kids.push_back(term());
      return t;
    }
    if (is("(")) {
      if (auto perm = try_perm(); perm && accept("*")) {
        t.k = PTerm::K::Susp;
        t.perm = std::move(*perm);
        t.kids.push_back(term());
        return t;
      }
      expect("(");
      if (accept(")")) {
        t.k = PTerm::K::Tuple;
        return t;
      }
      std::vector<PTerm> items{term()};
      while (accept(",")) items.push_back(term());
      expect(")");
      if (items.size() == 1) return std::move(items.front());
      t.k = PTerm::K::Tuple;
      t.kids = std::move(items);
      return t;
    }
    if (accept("[")) {
      t.k = PTerm::K::Abs;
      t.name = ident("binder atom");
      expect("]");
      t.kids.push_back(term());
      return t;
    }
    t.name = ident("term");
    if (accept("(")) {
      t.k = PTerm::K::Call;
      if (!accept(")")) {
        t.kids.push_back(term());
        while (accept(",")) t.kids.push_back(term());
        expect(")");
      }
    }
    return t;
  }

  PFormula formula() {
    PFormula f;
    f.pos = peek().pos;
    f.source = term();
    expect("->");
    f.target = term();
    return f;
  }

  PAssertion assertion() {
    PAssertion a;
    a.pos = peek().pos;
    a.atom = ident("atom");
    expect("#");
    a.term = term();
    return a;
  }

  std::vector<PAssertion> env() {
    std::vector<PAssertion> out;
    expect("{");
    if (accept("}")) return out;
    out.push_back(assertion());
    while (accept(",")) out.push_back(assertion());
    expect("}");
    return out;
  }

  std::vector<std::string> names_until(const char* stop) {
    std::vector<std::string> out;
    while (!is(stop)) {
      out.push_back(ident("name"));
      accept(",");
    }
    return out;
  }

  PDecl decl() {
    PDecl d;
    d.pos = peek().pos;
    std::string kw = ident("declaration");
    if (kw == "atomsort" || kw == "basesort") {
      d.k = kw == "atomsort" ? PDecl::K::AtomSorts : PDecl::K::BaseSorts;
      d.names = names_until(";");
      if (d.names.empty()) fail("expected a sort name");
      expect(";");
    } else if (kw == "statesort" || kw == "residualsort") {
      d.k = kw == "statesort" ? PDecl::K::StateSort : PDecl::K::ResidualSort;
      d.sorts.push_back(sort());
      expect(";");
    } else if (kw == "func") {
      d.k = PDecl::K::Func;
      d.names.push_back(ident("function name"));
      expect(":");
      d.sorts.push_back(sort());
      expect("->");
      PSort result;
      result.pos = peek().pos;
      result.name = ident("result sort");
      d.sorts.push_back(result);
      expect(";");
    } else if (kw == "bn") {
      d.k = PDecl::K::Bn;
      d.names.push_back(ident("constructor name"));
      expect("=");
      expect("{");
      if (!is("}")) {
        d.positions.push_back(number());
        while (accept(",")) d.positions.push_back(number());
      }
      expect("}");
      expect(";");
    } else if (kw == "var" || kw == "label") {
      d.k = kw == "var" ? PDecl::K::Var : PDecl::K::Label;
      d.names = names_until(":");
      if (d.names.empty()) fail("expected a variable name");
      expect(":");
      d.sorts.push_back(sort());
      expect(";");
    } else if (kw == "rule") {
      d.k = PDecl::K::Rule;
      d.rule = rule(d.pos);
    } else if (kw == "order") {
      d.k = PDecl::K::Order;
      d.order = order(d.pos);
    } else {
      throw ParseError(d.pos, "unknown declaration '" + kw + "'");
    }
    return d;
  }

  PRule rule(SourcePos pos) {
    PRule r;
    r.pos = pos;
    r.name = ident("rule name");
    if (accept("forall")) {
      // forall a b : ch, c : nm  -- a sort annotation is "':' NAME" followed by ':' or ','
      std::vector<std::string> group;
      while (true) {
        while (peek().kind == Tok::Ident) group.push_back(ident("atom name"));
        if (is(":") && peek(1).kind == Tok::Ident && (is(":", 2) || is(",", 2))) {
          ++idx_;
          std::string s = ident("atom sort");
          for (auto& g : group) r.forall.emplace_back(g, s);
          group.clear();
          if (accept(",")) continue;
        }
        break;
      }
      for (auto& g : group) r.forall.emplace_back(g, std::nullopt);
    }
    expect(":");
    while (!accept("conclusion")) {
      if (accept("premise")) {
        r.premises.push_back(formula());
      } else if (accept("fresh")) {
        r.fresh.push_back(assertion());
        while (accept(",")) r.fresh.push_back(assertion());
      } else if (accept("unless")) {
        std::string v = ident("label variable");
        expect("is");
        std::vector<std::string> ctors{ident("constructor name")};
        while (accept(",")) ctors.push_back(ident("constructor name"));
        r.unless.emplace_back(v, ctors);
      } else {
        fail("expected 'premise', 'fresh', 'unless' or 'conclusion'");
      }
      expect(";");
    }
    r.conclusion = formula();
    expect(";");
    return r;
  }

  POrder order(SourcePos pos) {
    POrder o;
    o.pos = pos;
    o.head = term();
    expect("@");
    o.label = term();
    if (accept("when")) {
      do {
        PConstraint c;
        c.pos = peek().pos;
        c.lhs = ident("atom");
        if (accept("=")) {
          c.equal = true;
        } else {
          expect("!=");
        }
        c.rhs = ident("atom");
        o.when.push_back(c);
      } while (accept(","));
    }
    expect("=");
    unsigned n = number();
    if (accept("+")) {
      if (n != 1) fail("measure must be a number or 1 + ...");
      auto call = [&] {
        expect("S");
        expect("(");
        std::string v = ident("variable");
        expect(",");
        PTerm l = term();
        expect(")");
        o.calls.emplace_back(v, std::move(l));
      };
      if (accept("max")) {
        expect("(");
        call();
        while (accept(",")) call();
        expect(")");
      } else {
        call();
      }
    } else {
      o.constant = n;
    }
    expect(";");
    return o;
  }

  std::size_t index() const { return idx_; }

 private:
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

/// Deferred: an atom's sort cannot be determined yet.
struct Deferred {
  std::string name;
};

/// Resolution of parsed terms against a signature with declared variables,
/// rule-local atom metas and literal atoms.
class Elaborator {
 public:
  Elaborator(const Signature& sig, const std::map<std::string, Variable>& vars) : sig_(sig), vars_(vars) {}

  /// Rule-local schematic atoms; a known sort may be absent until inferred.
  std::map<std::string, std::optional<AtomSort>> metas;

  NominalSort resolve_sort(const PSort& s) const {
    switch (s.k) {
      case PSort::K::Unit:
        return NominalSort::unit();
      case PSort::K::Name:
        if (sig_.has_base(s.name)) return NominalSort::base(s.name);
        if (sig_.has_atom_sort(s.name)) return NominalSort::atom(AtomSort{s.name});
        throw ParseError(s.pos, "unknown sort " + s.name);
      case PSort::K::Abs: {
        if (!sig_.has_atom_sort(s.name)) throw ParseError(s.pos, "unknown atom sort " + s.name);
        return NominalSort::abstraction(AtomSort{s.name}, resolve_sort(s.kids.front()));
      }
      case PSort::K::Prod: {
        std::vector<NominalSort> parts;
        for (const auto& k : s.kids) parts.push_back(resolve_sort(k));
        return NominalSort::product(parts);
      }
    }
    throw ParseError(s.pos, "bad sort");
  }

  /// Atom for a name in atom position, with sort from context, from the
  /// meta table, or the only atom sort of the signature.
  Atom atom(const std::string& name, SourcePos pos, std::optional<AtomSort> expected) {
    std::uint32_t index = 0;
    if (!parse_atom_name(name, index)) throw ParseError(pos, "'" + name + "' is not an atom name");
    auto mit = metas.find(name);
    std::optional<AtomSort> sort = expected;
    if (mit != metas.end()) {
      if (mit->second && expected && *mit->second != *expected) {
        throw ParseError(pos, "atom " + name + " used at sorts " + mit->second->name + " and " + expected->name);
      }
      if (!sort) sort = mit->second;
      if (!mit->second && sort) mit->second = sort;
    }
    if (!sort && sig_.atom_sorts.size() == 1) sort = sig_.atom_sorts.front();
    if (!sort) throw Deferred{name};
    if (!sig_.has_atom_sort(sort->name)) throw ParseError(pos, "unknown atom sort " + sort->name);
    if (mit != metas.end() && !mit->second) mit->second = sort;
    return Atom{*sort, index};
  }

  Term term(const PTerm& p, std::optional<NominalSort> expected) {
    using K = PTerm::K;
    switch (p.k) {
      case K::Ident:
        return ident(p, expected);
      case K::Call:
        return call(p.name, p.kids, p.pos);
      case K::Tuple: {
        std::vector<Term> items;
        if (expected && expected->is_product() && expected->parts().size() == p.kids.size()) {
          for (std::size_t i = 0; i < p.kids.size(); ++i) items.push_back(term(p.kids[i], expected->parts()[i]));
        } else {
          for (const auto& k : p.kids) items.push_back(term(k, std::nullopt));
        }
        if (p.kids.empty()) return Term::unit();
        return Term::tuple(items);
      }
      case K::Abs: {
        std::optional<AtomSort> bsort;
        std::optional<NominalSort> body;
        if (expected && expected->is_abstraction()) {
          bsort = expected->atom_sort();
          body = expected->body();
        }
        Atom b = atom(p.name, p.pos, bsort);
        return Term::abs(b, term(p.kids.front(), body));
      }
      case K::Susp: {
        std::vector<std::pair<Atom, Atom>> swaps;
        for (const auto& [x, y] : p.perm) {
          std::optional<AtomSort> s;
          for (const auto& n : {x, y}) {
            auto it = metas.find(n);
            if (!s && it != metas.end() && it->second) s = it->second;
          }
          Atom ax = atom(x, p.pos, s);
          Atom ay = atom(y, p.pos, ax.sort);
          swaps.emplace_back(ax, ay);
        }
        return Term::susp(Permutation::from_transpositions(swaps), term(p.kids.front(), expected));
      }
    }
    throw ParseError(p.pos, "bad term");
  }

  /// Elaborates and sort-checks against an expected sort.
  Term checked(const PTerm& p, std::optional<NominalSort> expected) {
    Term t = term(p, expected);
    NominalSort got;
    try {
      got = sort_check(sig_, t);
    } catch (const SortError& e) {
      throw ParseError(p.pos, e.what());
    }
    if (expected && got != *expected) {
      throw ParseError(p.pos, "term " + to_string(t) + " has sort " + to_string(got) + ", expected " +
                                  to_string(*expected));
    }
    return t;
  }

 private:
  Term ident(const PTerm& p, const std::optional<NominalSort>& expected) {
    const std::string& n = p.name;
    if (metas.contains(n)) {
      if (expected && !expected->is_atom()) {
        throw ParseError(p.pos, "atom " + n + " used where " + to_string(*expected) + " is expected");
      }
      return Term::atom(atom(n, p.pos, expected ? std::optional(expected->atom_sort()) : std::nullopt));
    }
    if (auto it = vars_.find(n); it != vars_.end()) {
      if (!expected || it->second.sort == *expected || !expected->is_atom()) return Term::var(it->second);
    }
    if (sig_.find_function(n)) return call(n, {}, p.pos);
    std::uint32_t index = 0;
    if (parse_atom_name(n, index)) {
      if (expected && !expected->is_atom()) {
        throw ParseError(p.pos, "atom " + n + " used where " + to_string(*expected) + " is expected");
      }
      return Term::atom(atom(n, p.pos, expected ? std::optional(expected->atom_sort()) : std::nullopt));
    }
    throw ParseError(p.pos, "unknown identifier " + n);
  }

  Term call(const std::string& fn, const std::vector<PTerm>& args, SourcePos pos) {
    const FunctionDecl* f = sig_.find_function(fn);
    if (!f) throw ParseError(pos, "unknown function symbol " + fn);
    const NominalSort& a = f->arg;
    if (args.empty()) {
      if (!a.is_unit()) throw ParseError(pos, fn + " expects arguments of sort " + to_string(a));
      return Term::app(fn, Term::unit());
    }
    if (args.size() == 1) return Term::app(fn, term(args.front(), a));
    if (!a.is_product() || a.parts().size() != args.size()) {
      throw ParseError(pos, fn + " expects " + std::to_string(a.is_product() ? a.parts().size() : 1) +
                                " arguments, got " + std::to_string(args.size()));
    }
    std::vector<Term> items;
    for (std::size_t i = 0; i < args.size(); ++i) items.push_back(term(args[i], a.parts()[i]));
    return Term::app(fn, Term::tuple(items));
  }

  const Signature& sig_;
  const std::map<std::string, Variable>& vars_;
};

inline std::map<std::string, Variable> variable_table(const Spec& spec) {
  std::map<std::string, Variable> out;
  for (const auto& v : spec.variables) out.emplace(v.name, v);
  for (const auto& v : spec.labels) out.emplace(v.name, v);
  return out;
}

/// Runs `step` repeatedly until every part resolves; parts whose atoms
/// cannot be sorted yet are retried after the others.
template <class F>
void resolve_all(std::size_t n, F&& step) {
  std::vector<bool> done(n, false);
  std::size_t remaining = n;
  while (remaining > 0) {
    std::size_t progress = 0;
    std::optional<Deferred> last;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      try {
        step(i);
        done[i] = true;
        ++progress;
      } catch (const Deferred& d) {
        last = d;
      }
    }
    remaining -= progress;
    if (progress == 0 && remaining > 0) throw ParseError("cannot infer the sort of atom " + last->name);
  }
}

inline void check_ground_action(const Spec& spec, const Term& target, SourcePos pos) {
  if (!spec.signature.nts_mode()) return;
  auto action = action_of(target);
  if (!action) throw ParseError(pos, "target must be an explicit (action, state) pair");
  if (action->is_var() && spec.is_label(action->variable())) return;
  if (!is_ground(*action)) throw ParseError(pos, "action must be ground");
}

}  // namespace detail

inline Spec parse_spec(std::string_view text) {
  using namespace detail;
  Parser p(text);
  std::vector<PDecl> decls;
  while (!p.at_end()) decls.push_back(p.decl());

  Spec spec;
  auto& sig = spec.signature.base;
  bool have_atoms = false, have_bases = false;
  std::optional<PSort> state, residual;
  for (const auto& d : decls) {
    if (d.k == PDecl::K::AtomSorts) {
      have_atoms = true;
      for (const auto& n : d.names) sig.atom_sorts.push_back(AtomSort{n});
    } else if (d.k == PDecl::K::BaseSorts) {
      have_bases = true;
      for (const auto& n : d.names) sig.base_sorts.push_back(n);
    } else if (d.k == PDecl::K::StateSort) {
      if (state) throw ParseError(d.pos, "duplicate statesort declaration");
      state = d.sorts.front();
    } else if (d.k == PDecl::K::ResidualSort) {
      if (residual) throw ParseError(d.pos, "duplicate residualsort declaration");
      residual = d.sorts.front();
    }
  }
  if (!have_atoms || !have_bases || !state || !residual) {
    SourcePos pos = decls.empty() ? SourcePos{} : decls.front().pos;
    throw ParseError(pos, "missing signature (atomsort, basesort, statesort and residualsort are required)");
  }
  for (const auto& v : validate_signature(sig)) throw ParseError(decls.front().pos, v);

  std::map<std::string, Variable> no_vars;
  Elaborator sorts(sig, no_vars);
  spec.signature.state_sort = sorts.resolve_sort(*state);
  spec.signature.residual_sort = sorts.resolve_sort(*residual);

  for (const auto& d : decls) {
    if (d.k != PDecl::K::Func) continue;
    const std::string& name = d.names.front();
    if (sig.find_function(name)) throw ParseError(d.pos, "duplicate function " + name);
    NominalSort arg = sorts.resolve_sort(d.sorts[0]);
    const std::string& result = d.sorts[1].name;
    if (!sig.has_base(result)) {
      throw ParseError(d.sorts[1].pos, "function " + name + ": result not a base sort (" + result + ")");
    }
    sig.functions.push_back({name, arg, result});
  }
  for (const auto& v : validate_signature(sig)) throw ParseError(v);

  std::set<std::string> taken;
  for (const auto& f : sig.functions) taken.insert(f.name);
  for (const auto& d : decls) {
    if (d.k != PDecl::K::Var && d.k != PDecl::K::Label) continue;
    NominalSort s = sorts.resolve_sort(d.sorts.front());
    for (const auto& n : d.names) {
      if (!taken.insert(n).second) throw ParseError(d.pos, "duplicate name " + n);
      (d.k == PDecl::K::Var ? spec.variables : spec.labels).push_back(Variable{n, s});
    }
  }
  if (auto act = spec.signature.action_sort()) {
    for (const auto& l : spec.labels) {
      if (l.sort != *act) throw ParseError("label variable " + l.name + " must have the action sort");
    }
  } else if (!spec.labels.empty()) {
    throw ParseError("label variables need an (action, state) residual sort");
  }

  auto table = variable_table(spec);
  for (const auto& d : decls) {
    if (d.k == PDecl::K::Bn) {
      if (!spec.bn) spec.bn = BnSpec{};
      const std::string& fn = d.names.front();
      if (!sig.find_function(fn)) throw ParseError(d.pos, "bn: unknown constructor " + fn);
      auto& pos = spec.bn->positions[fn];
      pos.insert(d.positions.begin(), d.positions.end());
    } else if (d.k == PDecl::K::Rule) {
      const PRule& pr = *d.rule;
      if (spec.find_rule(pr.name)) throw ParseError(pr.pos, "duplicate rule name " + pr.name);
      Elaborator el(sig, table);
      for (const auto& [n, s] : pr.forall) {
        std::uint32_t idx = 0;
        if (!parse_atom_name(n, idx)) throw ParseError(pr.pos, "'" + n + "' is not an atom name");
        if (el.metas.contains(n)) throw ParseError(pr.pos, "atom " + n + " bound twice");
        if (s && !sig.has_atom_sort(*s)) throw ParseError(pr.pos, "unknown atom sort " + *s);
        el.metas[n] = s ? std::optional(AtomSort{*s}) : std::nullopt;
      }
      Rule rule;
      rule.name = pr.name;
      rule.premises.resize(pr.premises.size());
      std::vector<std::optional<FreshnessAssertion>> fresh(pr.fresh.size());
      const auto& rs = spec.signature;
      std::size_t np = pr.premises.size();
      resolve_all(1 + np + pr.fresh.size(), [&](std::size_t i) {
        if (i == 0) {
          const auto& f = *pr.conclusion;
          rule.conclusion = {el.checked(f.source, rs.state_sort), el.checked(f.target, rs.residual_sort)};
        } else if (i <= np) {
          const auto& f = pr.premises[i - 1];
          rule.premises[i - 1] = {el.checked(f.source, rs.state_sort), el.checked(f.target, rs.residual_sort)};
        } else {
          const auto& a = pr.fresh[i - 1 - np];
          Term t = el.checked(a.term, std::nullopt);
          auto it = el.metas.find(a.atom);
          std::optional<AtomSort> s = it != el.metas.end() ? it->second : std::nullopt;
          fresh[i - 1 - np] = FreshnessAssertion{el.atom(a.atom, a.pos, s), t};
        }
      });
      for (const auto& [n, s] : pr.forall) {
        std::uint32_t idx = 0;
        parse_atom_name(n, idx);
        auto sort = el.metas.at(n);
        if (!sort) {
          if (sig.atom_sorts.size() != 1) throw ParseError(pr.pos, "cannot infer the sort of atom " + n);
          sort = sig.atom_sorts.front();
        }
        rule.metas.push_back(Atom{*sort, idx});
      }
      for (auto& f : fresh) rule.env.insert(*f);
      for (const auto& [v, ctors] : pr.unless) {
        auto it = table.find(v);
        if (it == table.end() || !spec.is_label(it->second)) {
          throw ParseError(pr.pos, "unless: " + v + " is not a label variable");
        }
        for (const auto& c : ctors) {
          if (!sig.find_function(c)) throw ParseError(pr.pos, "unless: unknown constructor " + c);
          rule.unless[it->second].insert(c);
        }
      }
      check_ground_action(spec, rule.conclusion.target, pr.conclusion->pos);
      for (std::size_t i = 0; i < np; ++i) check_ground_action(spec, rule.premises[i].target, pr.premises[i].pos);
      spec.rules.push_back(std::move(rule));
    } else if (d.k == PDecl::K::Order) {
      const POrder& po = *d.order;
      auto act = spec.signature.action_sort();
      if (!act) throw ParseError(po.pos, "order declarations need an (action, state) residual sort");
      if (!spec.strat) spec.strat = StratSpec{};
      Elaborator el(sig, table);
      StratCase c;
      c.head = el.checked(po.head, spec.signature.state_sort);
      c.label = el.checked(po.label, *act);
      AtomSet pattern_atoms = support(c.head);
      auto la = support(c.label);
      pattern_atoms.insert(la.begin(), la.end());
      auto find_atom = [&](const std::string& n, SourcePos pos) {
        for (const auto& a : pattern_atoms) {
          if (atom_name(a) == n) return a;
        }
        throw ParseError(pos, "atom " + n + " does not occur in the patterns");
      };
      for (const auto& k : po.when) c.when.push_back({find_atom(k.lhs, k.pos), find_atom(k.rhs, k.pos), k.equal});
      c.constant = po.constant;
      for (const auto& [v, l] : po.calls) {
        auto it = table.find(v);
        if (it == table.end()) throw ParseError(l.pos, "unknown variable " + v);
        c.calls.push_back({it->second, el.checked(l, *act)});
      }
      spec.strat->cases.push_back(std::move(c));
    }
  }
  return spec;
}

inline Spec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

// ---------------------------------------------------------------------------
// Standalone terms, formulas and environments over a spec's signature.

namespace detail {
template <class F>
auto parse_whole(std::string_view text, F&& f) {
  Parser p(text);
  auto out = f(p);
  if (!p.at_end()) p.fail("unexpected trailing input");
  return out;
}
}  // namespace detail

inline Term parse_term(const Spec& spec, std::string_view text, std::optional<NominalSort> expected = std::nullopt) {
  auto table = detail::variable_table(spec);
  detail::Elaborator el(spec.signature.base, table);
  return detail::parse_whole(text, [&](detail::Parser& p) {
    auto t = p.term();
    try {
      return el.checked(t, expected);
    } catch (const detail::Deferred& d) {
      throw ParseError(t.pos, "cannot infer the sort of atom " + d.name);
    }
  });
}

inline Formula parse_formula(const Spec& spec, std::string_view text) {
  auto table = detail::variable_table(spec);
  detail::Elaborator el(spec.signature.base, table);
  return detail::parse_whole(text, [&](detail::Parser& p) {
    auto f = p.formula();
    try {
      return Formula{el.checked(f.source, spec.signature.state_sort),
                     el.checked(f.target, spec.signature.residual_sort)};
    } catch (const detail::Deferred& d) {
      throw ParseError(f.pos, "cannot infer the sort of atom " + d.name);
    }
  });
}

namespace detail {
inline FreshnessEnv elaborate_env(const Spec& spec, const std::vector<PAssertion>& env) {
  auto table = variable_table(spec);
  Elaborator el(spec.signature.base, table);
  FreshnessEnv out;
  for (const auto& a : env) {
    try {
      Term t = el.checked(a.term, std::nullopt);
      out.insert({el.atom(a.atom, a.pos, std::nullopt), t});
    } catch (const Deferred& d) {
      throw ParseError(a.pos, "cannot infer the sort of atom " + d.name);
    }
  }
  return out;
}
}  // namespace detail

/// `{a # t, ...}`; the braces may be omitted for a single assertion.
inline FreshnessEnv parse_env(const Spec& spec, std::string_view text) {
  return detail::parse_whole(text, [&](detail::Parser& p) {
    if (p.is("{")) return detail::elaborate_env(spec, p.env());
    return detail::elaborate_env(spec, {p.assertion()});
  });
}

/// `env |- env`.
inline std::pair<FreshnessEnv, FreshnessEnv> parse_entailment(const Spec& spec, std::string_view text) {
  return detail::parse_whole(text, [&](detail::Parser& p) {
    auto lhs = p.env();
    p.expect("|-");
    auto rhs = p.env();
    return std::pair{detail::elaborate_env(spec, lhs), detail::elaborate_env(spec, rhs)};
  });
}

// ---------------------------------------------------------------------------
// Printing

inline std::string print_rule(const Rule& r) {
  std::string out = "rule " + r.name;
  if (!r.metas.empty()) {
    out += " forall";
    for (std::size_t i = 0; i < r.metas.size(); ++i) {
      out += " " + atom_name(r.metas[i]);
      if (i + 1 == r.metas.size() || r.metas[i + 1].sort != r.metas[i].sort) {
        out += " : " + r.metas[i].sort.name;
        if (i + 1 < r.metas.size()) out += ",";
      }
    }
  }
  out += ":\n";
  for (const auto& p : r.premises) out += "  premise " + to_string(p) + ";\n";
  for (const auto& f : r.env) out += "  fresh " + to_string(f) + ";\n";
  for (const auto& [v, ctors] : r.unless) {
    out += "  unless " + v.name + " is ";
    bool first = true;
    for (const auto& c : ctors) {
      if (!first) out += ", ";
      first = false;
      out += c;
    }
    out += ";\n";
  }
  out += "  conclusion " + to_string(r.conclusion) + ";\n";
  return out;
}

inline std::string print_order(const StratCase& c) {
  std::string out = "order " + to_string(c.head) + " @ " + to_string(c.label);
  for (std::size_t i = 0; i < c.when.size(); ++i) {
    out += i ? ", " : " when ";
    out += atom_name(c.when[i].lhs) + (c.when[i].equal ? " = " : " != ") + atom_name(c.when[i].rhs);
  }
  out += " = ";
  if (c.constant) {
    out += std::to_string(*c.constant);
  } else {
    auto call = [](const RecCall& k) { return "S(" + k.var.name + ", " + to_string(k.label) + ")"; };
    if (c.calls.size() == 1) {
      out += "1 + " + call(c.calls.front());
    } else {
      out += "1 + max(";
      for (std::size_t i = 0; i < c.calls.size(); ++i) out += (i ? ", " : "") + call(c.calls[i]);
      out += ")";
    }
  }
  return out + ";\n";
}

inline std::string print_spec(const Spec& spec) {
  const auto& sig = spec.signature.base;
  std::string out = "atomsort";
  for (const auto& a : sig.atom_sorts) out += " " + a.name;
  out += ";\nbasesort";
  for (const auto& b : sig.base_sorts) out += " " + b;
  out += ";\nstatesort " + to_string(spec.signature.state_sort) + ";\n";
  out += "residualsort " + to_string(spec.signature.residual_sort) + ";\n\n";
  for (const auto& f : sig.functions) out += "func " + f.name + " : " + to_string(f.arg) + " -> " + f.result + ";\n";
  if (spec.bn) {
    out += "\n";
    for (const auto& [fn, pos] : spec.bn->positions) {
      out += "bn " + fn + " = {";
      bool first = true;
      for (unsigned p : pos) {
        if (!first) out += ", ";
        first = false;
        out += std::to_string(p);
      }
      out += "};\n";
    }
  }
  auto print_vars = [&](const std::vector<Variable>& vs, const char* kw) {
    for (std::size_t i = 0; i < vs.size();) {
      std::size_t j = i;
      out += kw;
      while (j < vs.size() && vs[j].sort == vs[i].sort) out += " " + vs[j++].name;
      out += " : " + to_string(vs[i].sort) + ";\n";
      i = j;
    }
  };
  if (!spec.variables.empty() || !spec.labels.empty()) out += "\n";
  print_vars(spec.variables, "var");
  print_vars(spec.labels, "label");
  for (const auto& r : spec.rules) out += "\n" + print_rule(r);
  if (spec.strat) {
    out += "\n";
    for (const auto& c : spec.strat->cases) out += print_order(c);
  }
  return out;
}

}  // namespace nomsos
