#include <gtest/gtest.h>

#include "support.hpp"

using namespace nomsos;
using namespace nomsos::testing;

namespace {

const char* kHeader = R"(
atomsort ch;
basesort pr ac;
statesort pr;
residualsort ac * pr;
func null : 1 -> pr;
func out : ch * ch * pr -> pr;
func rep : pr -> pr;
func new : [ch]pr -> pr;
func tauA : 1 -> ac;
func outA : ch * ch -> ac;
func boutA : ch * ch -> ac;
bn boutA = {2};
var x y p q : pr;
label l : ac;
)";

Spec mini(const std::string& body) { return parse_spec(std::string(kHeader) + body); }

const RuleReport& rule_of(const CheckReport& r, const std::string& name) {
  const RuleReport* rr = r.find(name);
  if (!rr) throw std::runtime_error("no report for " + name);
  return *rr;
}

}  // namespace

TEST(Checks, CorpusPassesEverything) {
  auto reports = run_checks(pi());
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0].check, "well-formedness");
  EXPECT_EQ(reports[1].check, "equivariant format");
  EXPECT_EQ(reports[2].check, "stratification");
  EXPECT_EQ(reports[3].check, "ACR format");
  for (const auto& r : reports) EXPECT_TRUE(r.passed()) << r.check;
}

TEST(Checks, CorpusDefinedOrders) {
  auto strat = check_stratification(pi());
  using V = std::vector<std::string>;
  EXPECT_EQ(rule_of(strat, "Out").defined, V{"outA"});
  EXPECT_EQ(rule_of(strat, "Open").defined, V{"boutA"});
  EXPECT_EQ(rule_of(strat, "ParResL").defined, V{"boutA"});
  EXPECT_EQ(rule_of(strat, "ParL").defined, V{"outA"});
  EXPECT_EQ(rule_of(strat, "ParR").defined, V{"outA"});
  for (const char* r : {"SumL", "SumR", "Rep", "Res"}) EXPECT_EQ(rule_of(strat, r).defined, (V{"boutA", "outA"})) << r;
  for (const char* r : {"In", "CloseL", "CloseR"}) EXPECT_TRUE(rule_of(strat, r).defined.empty()) << r;
  auto acr = check_acr(pi());
  for (const char* r : {"In", "CloseL", "CloseR"}) EXPECT_EQ(rule_of(acr, r).status, Status::Skipped) << r;
  EXPECT_EQ(rule_of(acr, "Open").status, Status::Pass);
}

TEST(Checks, ReportsAreSortedByRuleName) {
  auto acr = check_acr(pi());
  for (std::size_t i = 1; i < acr.rules.size(); ++i) EXPECT_LT(acr.rules[i - 1].rule, acr.rules[i].rule);
}

TEST(Checks, BrokenCorpusFailsConstraintThree) {
  Spec broken = load_spec(corpus_path("pi-broken.spec"));
  auto acr = check_acr(broken);
  EXPECT_EQ(acr.status(), Status::Fail);
  const auto& r = rule_of(acr, "ParResL");
  EXPECT_EQ(r.status, Status::Fail);
  EXPECT_EQ(r.constraint, "(iii)");
  EXPECT_NE(r.witness.find("does not entail"), std::string::npos) << r.witness;
  for (const auto& other : acr.rules) {
    if (other.rule != "ParResL") {
      EXPECT_NE(other.status, Status::Fail) << other.rule;
    }
  }
}

TEST(Checks, LiteralAtomsBreakEquivariance) {
  Spec s = mini("rule Lit forall a : ch:\n  conclusion out(a,b,x) -> (outA(a,b), x);\n");
  auto eq = check_equivariant(s);
  const auto& r = rule_of(eq, "Lit");
  EXPECT_EQ(r.status, Status::Fail);
  EXPECT_NE(r.witness.find("literal atom b"), std::string::npos) << r.witness;
  auto all = run_checks(s);
  EXPECT_TRUE(all[3].not_run);
  EXPECT_FALSE(all[3].passed());
}

TEST(Checks, MissingOrderForBindingLabel) {
  Spec s = mini("rule Open forall a b : ch:\n  premise x -> (outA(a,b), y);\n  fresh b # a;\n"
                "  conclusion new([b]x) -> (boutA(a,b), y);\n");
  auto strat = check_stratification(s);
  EXPECT_EQ(rule_of(strat, "Open").status, Status::Fail);
  EXPECT_EQ(rule_of(strat, "Open").constraint, "coverage");
}

TEST(Checks, PremiseMustDecrease) {
  Spec s = mini("rule Weird forall a b : ch:\n  premise x -> (boutA(a,b), y);\n"
                "  conclusion rep(x) -> (outA(a,b), y);\n"
                "order rep(p) @ outA(a,b) = 1 + S(p, outA(a,b));\n");
  auto strat = check_stratification(s);
  EXPECT_EQ(rule_of(strat, "Weird").status, Status::Fail);
  EXPECT_EQ(rule_of(strat, "Weird").constraint, "(ii)");
}

TEST(Checks, ConstraintOneDetectsHiddenTargets) {
  Spec s = mini("rule Hide forall a b : ch:\n  premise x -> (outA(a,b), y);\n"
                "  conclusion rep(x) -> (outA(a,b), null);\n"
                "order out(a,b,p) @ outA(a,b) = 0;\n"
                "order rep(p) @ outA(a,b) = 1 + S(p, outA(a,b));\n");
  EXPECT_TRUE(check_stratification(s).passed());
  auto acr = check_acr(s);
  EXPECT_EQ(rule_of(acr, "Hide").status, Status::Fail);
  EXPECT_EQ(rule_of(acr, "Hide").constraint, "(i)");
}

TEST(Checks, ConstraintTwoDetectsForgottenAtoms) {
  Spec s = mini("rule Forget forall a b : ch:\n  conclusion out(a,b,x) -> (tauA, x);\n"
                "order out(a,b,p) @ tauA = 0;\n");
  auto acr = check_acr(s);
  EXPECT_EQ(rule_of(acr, "Forget").status, Status::Fail);
  EXPECT_EQ(rule_of(acr, "Forget").constraint, "(ii)");
}

TEST(Checks, DroppedVariablesAreGrounded) {
  const auto& sig = pi().signature.base;
  EXPECT_EQ(to_string(*closed_term(sig, PR)), "null");
  EXPECT_EQ(to_string(*closed_term(sig, NominalSort::base("ac"))), "tauA");
  EXPECT_EQ(to_string(*closed_term(sig, NominalSort::abstraction(CH, PR))), "[a]null");
  EXPECT_FALSE(closed_term(sig, NominalSort::atom(CH)).has_value());
}

TEST(Checks, IllFormedSpecStopsEarly) {
  Spec s = pi();
  s.rules.push_back(s.rules.front());
  auto all = run_checks(s);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_FALSE(all[0].passed());
  EXPECT_TRUE(all[1].not_run);
  EXPECT_TRUE(all[2].not_run);
  EXPECT_TRUE(all[3].not_run);
}
