#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nomsos/atom.hpp"

namespace nomsos {

/// A finite, sort-preserving bijection on atoms. Only moved atoms are stored,
/// so two permutations are equal iff their mappings are equal.
class Permutation {
 public:
  Permutation() = default;

  /// The transposition (a b); the identity when a == b.
  static Permutation swap(const Atom& a, const Atom& b) {
    if (a.sort != b.sort) {
      throw Error("transposition (" + atom_name(a) + " " + atom_name(b) +
                  ") mixes atom sorts " + a.sort.name + " and " + b.sort.name);
    }
    Permutation p;
    if (a != b) {
      p.map_.emplace(a, b);
      p.map_.emplace(b, a);
    }
    return p;
  }

  /// Composition of transpositions, applied right to left.
  static Permutation from_transpositions(
      const std::vector<std::pair<Atom, Atom>>& swaps) {
    Permutation p;
    for (const auto& [a, b] : swaps) p = p.compose(swap(a, b));
    return p;
  }

  Atom apply(const Atom& a) const {
    auto it = map_.find(a);
    return it == map_.end() ? a : it->second;
  }

  Atom operator()(const Atom& a) const { return apply(a); }

  /// `*this ∘ inner`: applies `inner` first.
  Permutation compose(const Permutation& inner) const {
    Permutation out;
    for (const auto& [a, b] : inner.map_) {
      Atom image = apply(b);
      if (image != a) out.map_.emplace(a, image);
    }
    for (const auto& [a, b] : map_) {
      if (!inner.map_.contains(a)) out.map_.emplace(a, b);
    }
    return out;
  }

  Permutation inverse() const {
    Permutation out;
    for (const auto& [a, b] : map_) out.map_.emplace(b, a);
    return out;
  }

  /// The conjugation action `this ∘ other ∘ this⁻¹`.
  Permutation conjugate(const Permutation& other) const {
    return compose(other).compose(inverse());
  }

  AtomSet support() const {
    AtomSet out;
    for (const auto& [a, b] : map_) out.insert(a);
    return out;
  }

  bool is_identity() const { return map_.empty(); }

  const std::map<Atom, Atom>& mapping() const { return map_; }

  /// Canonical decomposition into transpositions (a b), listed left to right
  /// as they appear in the composition. Each cycle (x1 x2 ... xk) is written
  /// (x1 xk)∘...∘(x1 x2).
  std::vector<std::pair<Atom, Atom>> transpositions() const {
    std::vector<std::pair<Atom, Atom>> out;
    AtomSet seen;
    for (const auto& [start, next] : map_) {
      if (seen.contains(start)) continue;
      std::vector<Atom> cycle{start};
      seen.insert(start);
      for (Atom cur = next; cur != start; cur = apply(cur)) {
        cycle.push_back(cur);
        seen.insert(cur);
      }
      for (std::size_t i = cycle.size(); i-- > 1;) out.emplace_back(cycle[0], cycle[i]);
    }
    return out;
  }

  auto operator<=>(const Permutation&) const = default;

 private:
  std::map<Atom, Atom> map_;
};

inline std::string to_string(const Permutation& p) {
  if (p.is_identity()) return "id";
  std::string out;
  bool first = true;
  for (const auto& [a, b] : p.transpositions()) {
    if (!first) out += "∘";
    first = false;
    out += "(" + atom_name(a) + " " + atom_name(b) + ")";
  }
  return out;
}

}  // namespace nomsos
