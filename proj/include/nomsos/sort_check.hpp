#pragma once

#include <string>

#include "nomsos/sort.hpp"
#include "nomsos/term.hpp"

namespace nomsos {

class SortError : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline std::string ordinal(std::size_t i) {
  static const char* names[] = {"first", "second", "third", "fourth", "fifth", "sixth"};
  return i < 6 ? names[i] : "argument #" + std::to_string(i + 1);
}
}  // namespace detail

/// Returns the unique sort of `t` over `sig`, or throws SortError naming the
/// offending subterm.
inline NominalSort sort_check(const Signature& sig, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Atom:
      if (!sig.has_atom_sort(t.atom().sort.name)) {
        throw SortError("atom " + atom_name(t.atom()) + " has unknown sort " + t.atom().sort.name);
      }
      return NominalSort::atom(t.atom().sort);
    case Term::Kind::Var:
      if (!sig.well_formed(t.variable().sort)) {
        throw SortError("variable " + t.variable().name + " has ill-formed sort " +
                        to_string(t.variable().sort));
      }
      return t.variable().sort;
    case Term::Kind::Susp:
      for (const auto& a : t.perm().support()) {
        if (!sig.has_atom_sort(a.sort.name)) {
          throw SortError("permutation " + to_string(t.perm()) + " moves atoms of unknown sort");
        }
      }
      return sort_check(sig, t.body());
    case Term::Kind::Abs:
      if (!sig.has_atom_sort(t.binder().sort.name)) {
        throw SortError("binder " + atom_name(t.binder()) + " has unknown sort " +
                        t.binder().sort.name);
      }
      return NominalSort::abstraction(t.binder().sort, sort_check(sig, t.body()));
    case Term::Kind::Tuple: {
      std::vector<NominalSort> parts;
      for (const auto& i : t.items()) parts.push_back(sort_check(sig, i));
      return NominalSort::product(parts);
    }
    case Term::Kind::App: {
      const FunctionDecl* f = sig.find_function(t.fn());
      if (!f) throw SortError("unknown function symbol " + t.fn());
      const Term& arg = t.body();
      const auto& expected = f->arg;
      if (arg.kind() == Term::Kind::Tuple && expected.is_product() &&
          arg.items().size() == expected.parts().size()) {
        for (std::size_t i = 0; i < arg.items().size(); ++i) {
          NominalSort got = sort_check(sig, arg.items()[i]);
          if (got != expected.parts()[i]) {
            throw SortError(detail::ordinal(i) + " argument of " + t.fn() + " has sort " +
                            to_string(got) + ", expected " + to_string(expected.parts()[i]));
          }
        }
      } else {
        NominalSort got = sort_check(sig, arg);
        if (got != expected) {
          throw SortError("argument of " + t.fn() + " has sort " + to_string(got) + ", expected " +
                          to_string(expected));
        }
      }
      return NominalSort::base(f->result);
    }
  }
  throw SortError("unreachable");
}

inline bool has_sort(const Signature& sig, const Term& t, const NominalSort& s) {
  try {
    return sort_check(sig, t) == s;
  } catch (const SortError&) {
    return false;
  }
}

}  // namespace nomsos
