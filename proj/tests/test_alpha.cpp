#include <gtest/gtest.h>

#include "support.hpp"

using namespace nomsos;
using namespace nomsos::testing;

TEST(Alpha, CanonicalBinders) {
  // The binder becomes the least atom not free in the abstraction.
  EXPECT_EQ(to_string(normalize(in(0, 3, out(3, 0, null())))), "in(a,[b]out(b,a,null))");
  EXPECT_EQ(to_string(normalize(nu(4, out(4, 4, null())))), "new([a]out(a,a,null))");
  EXPECT_EQ(to_string(normalize(nu(0, out(1, 2, null())))), "new([a]out(b,c,null))");
  // Nested binders are renamed outside-in.
  EXPECT_EQ(to_string(normalize(nu(5, in(5, 6, out(6, 5, null()))))), "new([a]in(a,[b]out(b,a,null)))");
}

TEST(Alpha, SuspensionsAreDischarged) {
  auto bc = Permutation::swap(ch(1), ch(2));
  Term p = Term::susp(bc, out(0, 1, null()));
  EXPECT_EQ(normalize(p), normalize(out(0, 2, null())));
  Term nested = Term::susp(bc, Term::susp(Permutation::swap(ch(0), ch(1)), out(0, 0, null())));
  EXPECT_EQ(normalize(nested), normalize(out(2, 2, null())));
}

TEST(Alpha, Equivalence) {
  EXPECT_TRUE(alpha_eq(in(0, 1, out(1, 1, null())), in(0, 2, out(2, 2, null()))));
  EXPECT_FALSE(alpha_eq(in(0, 1, out(1, 2, null())), in(0, 2, out(2, 2, null()))));
  EXPECT_FALSE(alpha_eq(nu(0, out(0, 1, null())), nu(1, out(1, 1, null()))));
  EXPECT_TRUE(alpha_eq(pi().signature.base, parse("[a]out(a,b,null)"), parse("[c]out(c,b,null)")));
}

TEST(Alpha, SortMismatchIsRejected) {
  EXPECT_THROW(alpha_eq(pi().signature.base, null(), Term::abs(ch(0), null())), SortError);
  EXPECT_TRUE(alpha_eq(pi().signature.base, nu(0, null()), nu(1, null())));
}

TEST(Alpha, GroundnessRequired) {
  EXPECT_THROW(normalize(Term::var(pvar("x"))), GroundnessError);
  EXPECT_THROW(nt_support(par(null(), Term::var(pvar("x")))), GroundnessError);
}

TEST(Alpha, NominalSupportIsFreeAtoms) {
  EXPECT_EQ(nt_support(nu(1, out(0, 1, null()))), AtomSet{ch(0)});
  EXPECT_EQ(nt_support(in(0, 1, out(1, 2, null()))), (AtomSet{ch(0), ch(2)}));
  EXPECT_TRUE(nt_fresh(ch(1), nu(1, out(1, 1, null()))));
  EXPECT_FALSE(nt_fresh(ch(0), Term::susp(Permutation::swap(ch(0), ch(1)), out(1, 1, null()))));
}

TEST(Alpha, NominalTermAction) {
  auto ab = Permutation::swap(ch(0), ch(1));
  NominalTerm p = normalize(in(0, 1, out(1, 0, null())));
  EXPECT_EQ(to_string(act(ab, p)), "in(b,[a]out(a,b,null))");
}

TEST(Alpha, CanonicalFormsAreFixedPoints) {
  Gen g(21, 4);
  for (int i = 0; i < 500; ++i) {
    Term p = g.process(6, {}, true);
    NominalTerm n = normalize(p);
    EXPECT_EQ(normalize(n.term()), n);
    EXPECT_TRUE(alpha_eq(p, n.term()));
  }
}

TEST(Alpha, AgreesWithRebindingOracleOnRandomTerms) {
  Gen g(22, 3);
  std::size_t equal = 0;
  for (int i = 0; i < 3000; ++i) {
    Term p = g.process(4);
    Term q = g.coin(50) ? g.process(4) : act(g.perm(), p);
    bool expect = oracle::alpha(p, q);
    equal += expect;
    ASSERT_EQ(alpha_eq(p, q), expect) << to_string(p) << " vs " << to_string(q);
    EXPECT_EQ(nt_support(p), oracle::free_atoms(p)) << to_string(p);
  }
  EXPECT_GT(equal, 100u);
}
