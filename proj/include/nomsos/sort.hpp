#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nomsos/atom.hpp"

namespace nomsos {

/// Nominal sorts: base sorts, atom sorts, abstractions [α]σ and products.
/// Products are kept flat and a product of one sort is that sort, so
/// structural equality coincides with sort equality.
class NominalSort {
 public:
  enum class Kind { Base, Atom, Abstraction, Product };

  NominalSort() : kind_(Kind::Product) {}

  static NominalSort base(std::string name) { return NominalSort(Kind::Base, std::move(name), {}); }
  static NominalSort atom(const AtomSort& s) { return NominalSort(Kind::Atom, s.name, {}); }
  static NominalSort abstraction(const AtomSort& s, NominalSort body) {
    return NominalSort(Kind::Abstraction, s.name, {std::move(body)});
  }
  static NominalSort unit() { return NominalSort(); }
  static NominalSort product(const std::vector<NominalSort>& parts) {
    std::vector<NominalSort> flat;
    for (const auto& p : parts) {
      if (p.kind_ == Kind::Product) {
        flat.insert(flat.end(), p.parts_.begin(), p.parts_.end());
      } else {
        flat.push_back(p);
      }
    }
    if (flat.size() == 1) return flat.front();
    return NominalSort(Kind::Product, "", std::move(flat));
  }

  Kind kind() const { return kind_; }
  bool is_base() const { return kind_ == Kind::Base; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_abstraction() const { return kind_ == Kind::Abstraction; }
  bool is_product() const { return kind_ == Kind::Product; }
  bool is_unit() const { return is_product() && parts_.empty(); }

  /// Base sort name or atom sort name (also the binder sort of an abstraction).
  const std::string& name() const { return name_; }
  AtomSort atom_sort() const { return AtomSort{name_}; }
  const NominalSort& body() const { return parts_.front(); }
  const std::vector<NominalSort>& parts() const { return parts_; }

  friend std::strong_ordering operator<=>(const NominalSort& x, const NominalSort& y) {
    if (auto c = x.kind_ <=> y.kind_; c != 0) return c;
    if (auto c = x.name_ <=> y.name_; c != 0) return c;
    if (auto c = x.parts_.size() <=> y.parts_.size(); c != 0) return c;
    for (std::size_t i = 0; i < x.parts_.size(); ++i) {
      if (auto c = x.parts_[i] <=> y.parts_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const NominalSort& x, const NominalSort& y) { return (x <=> y) == 0; }

 private:
  NominalSort(Kind k, std::string name, std::vector<NominalSort> parts)
      : kind_(k), name_(std::move(name)), parts_(std::move(parts)) {}

  Kind kind_;
  std::string name_;
  std::vector<NominalSort> parts_;
};

inline std::string to_string(const NominalSort& s) {
  switch (s.kind()) {
    case NominalSort::Kind::Base:
    case NominalSort::Kind::Atom:
      return s.name();
    case NominalSort::Kind::Abstraction: {
      std::string body = to_string(s.body());
      if (s.body().is_product() && !s.body().is_unit()) body = "(" + body + ")";
      return "[" + s.name() + "]" + body;
    }
    case NominalSort::Kind::Product: {
      if (s.is_unit()) return "1";
      std::string out;
      for (std::size_t i = 0; i < s.parts().size(); ++i) {
        if (i) out += " * ";
        out += to_string(s.parts()[i]);
      }
      return out;
    }
  }
  return {};
}

struct FunctionDecl {
  std::string name;
  NominalSort arg;
  std::string result;

  auto operator<=>(const FunctionDecl&) const = default;
};

/// A nominal signature: base sorts, atom sorts and function symbols.
struct Signature {
  std::vector<std::string> base_sorts;
  std::vector<AtomSort> atom_sorts;
  std::vector<FunctionDecl> functions;

  bool has_base(const std::string& n) const {
    return std::find(base_sorts.begin(), base_sorts.end(), n) != base_sorts.end();
  }
  bool has_atom_sort(const std::string& n) const {
    return std::any_of(atom_sorts.begin(), atom_sorts.end(),
                       [&](const AtomSort& s) { return s.name == n; });
  }
  const FunctionDecl* find_function(const std::string& n) const {
    for (const auto& f : functions) {
      if (f.name == n) return &f;
    }
    return nullptr;
  }
  bool well_formed(const NominalSort& s) const {
    switch (s.kind()) {
      case NominalSort::Kind::Base:
        return has_base(s.name());
      case NominalSort::Kind::Atom:
        return has_atom_sort(s.name());
      case NominalSort::Kind::Abstraction:
        return has_atom_sort(s.name()) && well_formed(s.body());
      case NominalSort::Kind::Product:
        return std::all_of(s.parts().begin(), s.parts().end(),
                           [&](const NominalSort& p) { return well_formed(p); });
    }
    return false;
  }

  bool operator==(const Signature&) const = default;
};

/// Lists every violation of the signature side conditions; empty iff the
/// signature is a well-formed nominal signature.
inline std::vector<std::string> validate_signature(const Signature& sig) {
  std::vector<std::string> report;
  std::set<std::string> sort_names;
  for (const auto& b : sig.base_sorts) {
    if (!sort_names.insert(b).second) report.push_back("duplicate sort " + b);
  }
  for (const auto& a : sig.atom_sorts) {
    if (!sort_names.insert(a.name).second) report.push_back("duplicate sort " + a.name);
  }
  std::set<std::string> fn_names;
  for (const auto& f : sig.functions) {
    if (!fn_names.insert(f.name).second) report.push_back("duplicate function " + f.name);
    if (!sig.well_formed(f.arg)) {
      report.push_back("function " + f.name + ": ill-formed argument sort " + to_string(f.arg));
    }
    if (!sig.has_base(f.result)) {
      report.push_back("function " + f.name + ": result not a base sort (" + f.result + ")");
    }
  }
  return report;
}

}  // namespace nomsos
