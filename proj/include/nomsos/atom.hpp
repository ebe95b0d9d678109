#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nomsos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AtomSort {
  std::string name;

  auto operator<=>(const AtomSort&) const = default;
};

/// An atom is the `index`-th element of the countable pool of its sort.
/// Pools of different sorts are disjoint because the sort is part of the
/// identity.
struct Atom {
  AtomSort sort;
  std::uint32_t index = 0;

  auto operator<=>(const Atom&) const = default;
};

using AtomSet = std::set<Atom>;

/// Display name of an atom index: a..z, then a1..z1, a2.. and so on.
inline std::string atom_name(std::uint32_t index) {
  std::string out(1, static_cast<char>('a' + index % 26));
  if (index >= 26) out += std::to_string(index / 26);
  return out;
}

inline std::string atom_name(const Atom& a) { return atom_name(a.index); }

/// Inverse of atom_name; false when `text` is not a well-formed atom name.
inline bool parse_atom_name(const std::string& text, std::uint32_t& index) {
  if (text.empty() || text[0] < 'a' || text[0] > 'z') return false;
  std::uint32_t block = 0;
  if (text.size() > 1) {
    if (text[1] == '0') return false;
    for (std::size_t i = 1; i < text.size(); ++i) {
      if (text[i] < '0' || text[i] > '9') return false;
      block = block * 10 + static_cast<std::uint32_t>(text[i] - '0');
      if (block > 10'000'000) return false;
    }
  }
  index = block * 26 + static_cast<std::uint32_t>(text[0] - 'a');
  return true;
}

/// The `n` smallest-index atoms of `sort` that are not in `avoid`.
inline std::vector<Atom> fresh_atoms(const AtomSort& sort, const AtomSet& avoid,
                                     std::size_t n) {
  std::vector<Atom> out;
  out.reserve(n);
  for (std::uint32_t i = 0; out.size() < n; ++i) {
    Atom candidate{sort, i};
    if (!avoid.contains(candidate)) out.push_back(candidate);
  }
  return out;
}

inline Atom fresh_atom(const AtomSort& sort, const AtomSet& avoid) {
  return fresh_atoms(sort, avoid, 1).front();
}

inline std::string to_string(const AtomSet& atoms) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : atoms) {
    if (!first) out += ", ";
    first = false;
    out += atom_name(a);
  }
  return out + "}";
}

}  // namespace nomsos
