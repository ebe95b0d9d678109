// One line per acceptance criterion; exit status 0 only if all pass.

#include <iostream>

#include "criteria.hpp"

using namespace nomsos::testing;

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"corpus check", [] { return corpus_check(); }},
      {"Open-over-Out proof tree", [] { return open_over_out(); }},
      {"entailment table", [] { return entailment_table(); }},
      {"freshness confluence", [] { return confluence(1009, 200, 10); }},
      {"substitution lemmas", [] { return substitution_lemmas(2017, 1000); }},
      {"interpretation lemma", [] { return interpretation_lemma(3041, 1000); }},
      {"engine equivariance", [] { return engine_equivariance(4093, 500); }},
      {"alpha-conversion of residuals", [] { return acr_alpha(5051, 100); }},
      {"negative control", [] { return broken_control(); }},
      {"alpha oracle", [] { return alpha_oracle(5); }},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << index << " " << c.name << ": " << o.detail << std::endl;
  }
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
