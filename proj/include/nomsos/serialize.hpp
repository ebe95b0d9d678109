#pragma once

// Machine-readable output. Field names are part of the CLI interface.

#include <json.hpp>

#include "nomsos/engine.hpp"
#include "nomsos/format_check.hpp"

namespace nomsos {

using Json = nlohmann::ordered_json;

inline Json to_json(const ProofTree& t) {
  Json atoms = Json::object();
  for (const auto& [m, a] : t.atoms) atoms[atom_name(m)] = atom_name(a);
  Json subst = Json::object();
  for (const auto& [x, v] : t.subst.mapping()) subst[x.name] = to_string(v);
  Json fresh = Json::array();
  for (const auto& [a, v] : t.freshness) fresh.push_back({{"atom", atom_name(a)}, {"term", to_string(v)}});
  Json premises = Json::array();
  for (const auto& c : t.children) premises.push_back(to_json(c));
  return Json{{"rule", t.rule},
              {"state", to_string(t.root.state)},
              {"residual", to_string(t.root.residual)},
              {"atoms", atoms},
              {"substitution", subst},
              {"freshness", fresh},
              {"premises", premises}};
}

inline Json to_json(const Enumeration& e, const NominalTerm& state) {
  Json ts = Json::array();
  for (const auto& d : e.derivations) {
    ts.push_back({{"residual", to_string(d.transition.residual)},
                  {"representative", d.representative},
                  {"tree", to_json(d.tree)}});
  }
  return Json{{"state", to_string(state)}, {"truncated", e.truncated}, {"transitions", ts}};
}

inline Json to_json(const CheckReport& r) {
  Json rules = Json::array();
  for (const auto& rr : r.rules) {
    Json j{{"name", rr.rule}, {"status", to_string(rr.status)}, {"constraint", rr.constraint}, {"witness", rr.witness}};
    if (!rr.defined.empty()) j["defined_order"] = rr.defined;
    rules.push_back(j);
  }
  Json out{{"check", r.check}, {"status", to_string(r.status())}};
  if (!r.note.empty()) out["note"] = r.note;
  out["rules"] = rules;
  return out;
}

}  // namespace nomsos
