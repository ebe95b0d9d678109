// nomsos: command-line front end for nominal SOS specifications.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "nomsos/nomsos.hpp"
#include "nomsos/serialize.hpp"
#include "pi_spec.hpp"

using namespace nomsos;

namespace {

enum Exit { ok = 0, negative = 1, usage = 2 };

struct Options {
  std::string spec_path;
  std::string format = "text";
  unsigned depth = Budget{}.depth;
  unsigned fresh = Budget{}.fresh;
  bool raw = false;
  std::vector<std::string> args;
};

Spec load(const Options& o) { return o.spec_path.empty() ? parse_spec(nomsos_cli::pi_spec) : load_spec(o.spec_path); }

bool json(const Options& o) { return o.format == "json"; }

int run_check(const Options& o) {
  Spec spec = load(o);
  auto reports = run_checks(spec);
  std::size_t passed = 0;
  for (const auto& r : reports) passed += r.passed();
  if (json(o)) {
    Json out{{"spec", o.spec_path}, {"passed", passed}, {"total", reports.size()}, {"checks", Json::array()}};
    for (const auto& r : reports) out["checks"].push_back(to_json(r));
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& r : reports) {
      std::string name = r.check + ":";
      name.resize(std::max<std::size_t>(name.size() + 1, 22), ' ');
      std::cout << name << to_string(r.status()) << "\n";
      if (!r.note.empty() && r.not_run) std::cout << "  " << r.note << "\n";
      for (const auto& rr : r.rules) {
        if (rr.status == Status::Fail || rr.status == Status::Unknown) {
          std::cout << "  " << rr.rule << ": " << to_string(rr.status);
          if (!rr.constraint.empty()) std::cout << " " << rr.constraint;
          std::cout << ": " << rr.witness << "\n";
        } else if (rr.witness.rfind("warning", 0) == 0) {
          std::cout << "  " << rr.rule << ": " << rr.witness << "\n";
        }
      }
      if (r.check == "stratification" && !r.not_run) {
        std::string line;
        for (const auto& rr : r.rules) {
          if (rr.defined.empty()) continue;
          line += (line.empty() ? "" : ", ") + rr.rule + " @ ";
          for (std::size_t i = 0; i < rr.defined.size(); ++i) line += (i ? "|" : "") + rr.defined[i];
        }
        if (!line.empty()) std::cout << "  defined order: " << line << "\n";
      }
      if (r.check == "ACR format" && !r.not_run) {
        std::string skipped;
        for (const auto& rr : r.rules) {
          if (rr.status == Status::Skipped) skipped += (skipped.empty() ? "" : ", ") + rr.rule;
        }
        if (!skipped.empty()) std::cout << "  order undefined, not examined: " << skipped << "\n";
      }
    }
    std::cout << passed << "/" << reports.size() << " checks passed\n";
  }
  return passed == reports.size() ? ok : negative;
}

int run_derive(const Options& o) {
  Spec spec = load(o);
  NominalTerm state = normalize(parse_term(spec, o.args.at(0), spec.signature.state_sort));
  Engine engine(spec, {o.depth, o.fresh});
  Enumeration e = engine.enumerate(state);
  if (json(o)) {
    std::cout << to_json(e, state).dump(2) << "\n";
    return ok;
  }
  std::cout << e.derivations.size() << " transition" << (e.derivations.size() == 1 ? "" : "s") << " from "
            << to_string(state) << (e.truncated ? " (search truncated at the depth budget)" : "") << "\n";
  for (const auto& d : e.derivations) {
    std::cout << "\n" << to_string(d.transition) << (d.representative ? "   [representative]" : "") << "\n";
    std::cout << render(d.tree);
  }
  return ok;
}

int run_prove(const Options& o) {
  Spec spec = load(o);
  Formula f = parse_formula(spec, o.args.at(0));
  Transition claim{normalize(f.source), normalize(f.target)};
  Engine engine(spec, {o.depth, o.fresh});
  ProofResult r = engine.prove(claim);
  std::string reason = r.truncated ? "not provable within the budget (search truncated)" : "not provable";
  if (json(o)) {
    Json out{{"claim", to_string(claim)}, {"provable", r.proved()}, {"truncated", r.truncated}};
    if (r.tree) out["tree"] = to_json(*r.tree);
    std::cout << out.dump(2) << "\n";
  } else if (r.tree) {
    std::cout << render(*r.tree);
  } else {
    std::cout << to_string(claim) << ": " << reason << "\n";
  }
  return r.proved() ? ok : negative;
}

int run_entail(const Options& o) {
  Spec spec = load(o);
  auto [lhs, rhs] = parse_entailment(spec, o.args.at(0));
  bool v = entails(lhs, rhs);
  if (json(o)) {
    std::cout << Json{{"lhs", to_string(lhs)}, {"rhs", to_string(rhs)}, {"entails", v}}.dump(2) << "\n";
  } else {
    std::cout << (v ? "true" : "false") << "\n";
  }
  return v ? ok : negative;
}

int run_nf(const Options& o) {
  Spec spec = load(o);
  FreshnessEnv env = parse_env(spec, o.args.at(0));
  ReducedEnv r = nf(env);
  if (json(o)) {
    std::cout << Json{{"env", to_string(env)},
                      {"nf", to_string(r.all())},
                      {"consistent", r.inconsistent.empty()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << to_string(r.all()) << (r.inconsistent.empty() ? "" : "   (inconsistent)") << "\n";
  }
  return ok;
}

int run_alpha(const Options& o) {
  Spec spec = load(o);
  Term p = parse_term(spec, o.args.at(0));
  Term q = parse_term(spec, o.args.at(1));
  bool v = alpha_eq(spec.signature.base, p, q);
  if (json(o)) {
    std::cout << Json{{"left", to_string(normalize(p))}, {"right", to_string(normalize(q))}, {"alpha_equivalent", v}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << (v ? "true" : "false") << "\n";
  }
  return v ? ok : negative;
}

int run_supp(const Options& o) {
  Spec spec = load(o);
  Term p = parse_term(spec, o.args.at(0));
  AtomSet s = o.raw ? support(p) : nt_support(p);
  if (json(o)) {
    Json atoms = Json::array();
    for (const auto& a : s) atoms.push_back(atom_name(a));
    std::cout << Json{{"term", to_string(p)}, {"raw", o.raw}, {"support", atoms}}.dump(2) << "\n";
  } else {
    std::cout << to_string(s) << "\n";
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workbench for nominal structural operational semantics"};
  app.require_subcommand(1);
  Options o;
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto add_budget = [&](CLI::App* c) {
    c->add_option("--depth", o.depth, "Maximum proof tree height")->capture_default_str();
    c->add_option("--fresh", o.fresh, "Fresh atoms per sort beyond those of the terms")->capture_default_str();
  };
  auto add_spec_flag = [&](CLI::App* c) {
    c->add_option("--spec", o.spec_path, "Spec file (default: the bundled pi-calculus)");
  };

  auto* check = app.add_subcommand("check", "Run well-formedness, equivariance, stratification and ACR checks");
  check->add_option("spec", o.spec_path, "Spec file")->required();
  add_format(check);

  auto* derive = app.add_subcommand("derive", "Enumerate the transitions of a state with proof trees");
  derive->add_option("spec", o.spec_path, "Spec file")->required();
  derive->add_option("state", o.args, "Ground state term")->required()->expected(1);
  add_format(derive);
  add_budget(derive);

  auto* prove = app.add_subcommand("prove", "Search for a proof tree of a transition \"state -> residual\"");
  prove->add_option("spec", o.spec_path, "Spec file")->required();
  prove->add_option("claim", o.args, "Transition")->required()->expected(1);
  add_format(prove);
  add_budget(prove);

  auto* entail = app.add_subcommand("entail", "Decide \"{a # t, ...} |- {b # u, ...}\"");
  entail->add_option("entailment", o.args, "Entailment")->required()->expected(1);
  add_spec_flag(entail);
  add_format(entail);

  auto* nfc = app.add_subcommand("nf", "Normal form of a freshness environment");
  nfc->add_option("env", o.args, "Environment")->required()->expected(1);
  add_spec_flag(nfc);
  add_format(nfc);

  auto* alpha = app.add_subcommand("alpha", "Decide alpha-equivalence of two ground terms");
  alpha->add_option("terms", o.args, "Two ground terms")->required()->expected(2);
  add_spec_flag(alpha);
  add_format(alpha);

  auto* supp = app.add_subcommand("supp", "Support of a term (free atoms of a ground term by default)");
  supp->add_option("term", o.args, "Term")->required()->expected(1);
  supp->add_flag("--raw", o.raw, "Raw support: every atom occurring in the term");
  add_spec_flag(supp);
  add_format(supp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*check) return run_check(o);
    if (*derive) return run_derive(o);
    if (*prove) return run_prove(o);
    if (*entail) return run_entail(o);
    if (*nfc) return run_nf(o);
    if (*alpha) return run_alpha(o);
    if (*supp) return run_supp(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << (o.spec_path.empty() ? "" : o.spec_path + ":") << e.what() << "\n";
    return usage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
