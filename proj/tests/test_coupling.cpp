#include <doctest.h>

#include <map>

#include "ips/coupling.hpp"
#include "ips/models.hpp"
#include "ips/rng.hpp"

using namespace ips;

namespace {

using TermMap = std::map<std::pair<Change, Change>, Rat>;

TermMap term_map(const CouplingTable& t) {
  TermMap m;
  for (const CouplingTerm& term : t.terms) m[{term.lower, term.upper}] = term.rate;
  return m;
}

Change J(int k) { return {ChangeKind::Jump, k}; }
Change B(int k) { return {ChangeKind::Birth, k}; }
Change D(int k) { return {ChangeKind::Death, k}; }
Change NONE() { return {ChangeKind::None, 0}; }

}  // namespace

TEST_CASE("all-zero specs give an empty table") {
  RateSpec z(StateSpace{3}, 2);
  CouplingTable t = build_coupling_table(z, z, {0, 1, 2, 3}, Rat(1, 2));
  CHECK(t.terms.empty());
  CHECK(t.N == 0);
}

TEST_CASE("single-jump conservative system couples jump against jump") {
  BuiltModel m = build_conservative(Rat(1), 2, 1, 1);
  CouplingTable t = build_coupling_table(m.spec, m.spec, {1, 0, 2, 0}, Rat(1, 2));
  TermMap terms = term_map(t);
  REQUIRE(terms.size() == 1);
  CHECK(terms.at({J(1), J(1)}) == Rat(1, 2));
}

TEST_CASE("epidemic table at a seeding quadruple") {
  const Rat lam(1), bet(1), gam(1, 2), phi(1, 3);
  BuiltModel m = build_epidemic(lam, bet, gam, phi, 2, 1);
  CouplingTable t = build_coupling_table(m.spec, m.spec, {0, 0, 1, 0}, Rat(1, 2));
  TermMap terms = term_map(t);
  // lower additions at (0,0) are the pure seeding gamma; the upper's
  // neighbor-driven share 2 d lambda stays uncoupled, as does its death
  REQUIRE(terms.size() == 3);
  CHECK(terms.at({B(1), B(1)}) == gam * Rat(1, 2));
  CHECK(terms.at({NONE(), B(1)}) == Rat(2) * lam * Rat(1, 2));
  CHECK(terms.at({NONE(), D(1)}) == Rat(1, 2));
}

TEST_CASE("independent deaths stay uncoupled when no order problem exists") {
  // deaths at rate alpha; at (1,1) vs (2,1) the upper death lands on
  // gamma - 1 = alpha, which keeps the order, so nothing is coupled
  StateSpace space{2};
  RateSpec s(space, 1);
  for (int a = 1; a <= 2; ++a) s.set(RateKind::DeathSite, 1, a, 0, Rat(a));
  const Rat p(1, 3);
  CouplingTable t = build_coupling_table(s, s, {1, 1, 2, 1}, p);
  TermMap terms = term_map(t);
  REQUIRE(terms.size() == 2);
  CHECK(terms.at({D(1), NONE()}) == Rat(1) * p);
  CHECK(terms.at({NONE(), D(1)}) == Rat(2) * p);

  // on the diagonal the upper death would break the order and is coupled
  CouplingTable t2 = build_coupling_table(s, s, {2, 1, 2, 1}, p);
  TermMap terms2 = term_map(t2);
  REQUIRE(terms2.size() == 1);
  CHECK(terms2.at({D(1), D(1)}) == Rat(2) * p);
}

TEST_CASE("closed-form single-change table equals the general recursion") {
  // epidemic, every quadruple
  BuiltModel m = build_epidemic(Rat(2), Rat(1), Rat(1, 2), Rat(1, 3), 2, 1);
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = a; c <= 2; ++c)
        for (int d = b; d <= 2; ++d) {
          const Quadruple q{a, b, c, d};
          CouplingTable general = build_coupling_table(m.spec, m.spec, q, Rat(1, 2));
          CouplingTable closed = build_coupling_n1(m.spec, m.spec, q, Rat(1, 2));
          CHECK(term_map(general) == term_map(closed));
        }

  RateSpec z(StateSpace{2}, 1);
  CHECK(build_coupling_n1(z, z, {0, 0, 1, 1}, Rat(1)).terms.empty());

  RateSpec multi(StateSpace{2}, 2);
  multi.set(RateKind::Jump, 2, 2, 0, Rat(1));
  CHECK_THROWS_AS(build_coupling_n1(multi, multi, {0, 0, 0, 0}, Rat(1)),
                  NotSingleChange);
}

TEST_CASE("closed-form and general tables agree on random single-change pairs") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    RateSpec lo = random_spec(2, 1, 0.45, 4, 9000 + seed);
    RateSpec up = random_spec(2, 1, 0.45, 4, 9500 + seed);
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b)
        for (int c = a; c <= 2; ++c)
          for (int d = b; d <= 2; ++d) {
            const Quadruple q{a, b, c, d};
            CHECK(term_map(build_coupling_table(lo, up, q, Rat(1, 3))) ==
                  term_map(build_coupling_n1(lo, up, q, Rat(1, 3))));
          }
  }
}

TEST_CASE("marginals are exact for built tables") {
  for (uint64_t seed = 0; seed < 15; ++seed) {
    RateSpec lo = random_spec(3, 3, 0.4, 4, 11000 + seed);
    RateSpec up = random_spec(3, 3, 0.4, 4, 11500 + seed);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b)
        for (int c = a; c <= 3; ++c)
          for (int d = b; d <= 3; ++d) {
            CouplingTable t =
                build_coupling_table(lo, up, {a, b, c, d}, Rat(1, 2));
            CHECK(verify_marginals(t, lo, up).empty());
          }
  }
}

TEST_CASE("marginal verification notices a perturbed rate") {
  BuiltModel m = build_epidemic(Rat(1), Rat(1), Rat(1, 2), Rat(1, 3), 2, 1);
  CouplingTable t = build_coupling_table(m.spec, m.spec, {0, 0, 1, 0}, Rat(1, 2));
  REQUIRE_FALSE(t.terms.empty());
  t.terms[0].rate += Rat(1, 1000000);
  CHECK_FALSE(verify_marginals(t, m.spec, m.spec).empty());
}

TEST_CASE("an empty table mismatches every nonzero rate") {
  BuiltModel m = build_epidemic(Rat(1), Rat(1), Rat(1, 2), Rat(1, 3), 2, 1);
  CouplingTable t = build_coupling_table(m.spec, m.spec, {0, 0, 1, 0}, Rat(1, 2));
  t.terms.clear();
  MarginalReport rep = verify_marginals(t, m.spec, m.spec);
  CHECK(rep.mismatches.size() == 3);  // lower birth, upper birth, upper death
}

TEST_CASE("certified systems yield increasing tables everywhere") {
  std::vector<RateSpec> specs;
  specs.push_back(build_epidemic(Rat(1), Rat(2), Rat(1, 2), Rat(1, 3), 2, 1).spec);
  specs.push_back(build_metapop_allee(3, 1, 2, Rat(1), Rat(1), Rat(2), 1).spec);
  specs.push_back(build_two_type_contact(Rat(1), Rat(1), {1, 0, 2}, 1).spec);
  for (const RateSpec& s : specs) {
    const int M = s.M();
    for (int a = 0; a <= M; ++a)
      for (int b = 0; b <= M; ++b)
        for (int c = a; c <= M; ++c)
          for (int d = b; d <= M; ++d) {
            CouplingTable t = build_coupling_table(s, s, {a, b, c, d}, Rat(1, 2));
            CHECK(verify_increasing(t, {a, b, c, d}, s.space()).empty());
          }
  }
}

TEST_CASE("the bad labeling leaves an order-breaking term at the witness quadruple") {
  BuiltModel bad = build_two_type_contact(Rat(1), Rat(1), {0, 1, 2}, 1);
  CouplingTable t =
      build_coupling_table(bad.spec, bad.spec, {2, 0, 2, 1}, Rat(1, 2));
  OrderReport rep = verify_increasing(t, {2, 0, 2, 1}, bad.space);
  CHECK_FALSE(rep.empty());

  CouplingTable empty = t;
  empty.terms.clear();
  CHECK(verify_increasing(empty, {2, 0, 2, 1}, bad.space).empty());
}

TEST_CASE("term application with clamping") {
  StateSpace space{2};
  CHECK(apply_term({1, 0, 2, 0}, {J(1), J(1), Rat(1)}, space) ==
        Quadruple{0, 1, 1, 1});
  CHECK(apply_term({0, 2, 0, 2}, {B(1), NONE(), Rat(1)}, space) ==
        Quadruple{0, 2, 0, 2});  // the birth would leave X: no-op
  CHECK(apply_term({1, 1, 2, 1}, {D(1), D(1), Rat(1)}, space) ==
        Quadruple{0, 1, 1, 1});
}

TEST_CASE("remainders are nonnegative and guards are honored") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    RateSpec lo = random_spec(3, 3, 0.45, 4, 13000 + seed);
    RateSpec up = random_spec(3, 3, 0.45, 4, 13500 + seed);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b)
        for (int c = a; c <= 3; ++c)
          for (int d = b; d <= 3; ++d) {
            CouplingTable t = build_coupling_table(lo, up, {a, b, c, d}, Rat(1));
            const auto check_map = [](const std::map<std::pair<int, int>, Rat>& m) {
              for (const auto& [kl, v] : m) CHECK(v >= 0);
            };
            check_map(t.remainders.jump_lower);
            check_map(t.remainders.jump_upper);
            check_map(t.remainders.birth_lower);
            check_map(t.remainders.birth_upper);
            check_map(t.remainders.death_lower);
            check_map(t.remainders.death_upper);
            check_map(t.remainders.jump_lower_vs_birth);
            check_map(t.remainders.jump_upper_vs_death);
            check_map(t.remainders.birth_lower_vs_jump);
            check_map(t.remainders.death_upper_vs_jump);

            for (const CouplingTerm& term : t.terms) {
              const auto lk = term.lower.kind, uk = term.upper.kind;
              const int k = term.lower.k, l = term.upper.k;
              if (lk == ChangeKind::Birth && uk == ChangeKind::Jump)
                CHECK(l <= c - a);  // (Birth k, Jump l) requires alpha <= gamma - l
              if (lk == ChangeKind::Jump && uk == ChangeKind::Death)
                CHECK(k <= d - b);
              if (lk == ChangeKind::Birth && uk == ChangeKind::Birth) {
                CHECK(b + k > d);
                CHECK(b + k <= d + l);
              }
              if (lk == ChangeKind::Death && uk == ChangeKind::Death) {
                CHECK(a > c - l);
                CHECK(c - l >= a - k);
              }
            }
          }
  }
}

TEST_CASE("top-level diagnostics behave like the construction ledger") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    RateSpec lo = random_spec(2, 2, 0.5, 4, 15000 + seed);
    RateSpec up = random_spec(2, 2, 0.5, 4, 15500 + seed);
    const bool ordered = certify_stochastic_order(lo, up).ordered();
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b)
        for (int c = a; c <= 2; ++c)
          for (int d = b; d <= 2; ++d) {
            CouplingTable t = build_coupling_table(lo, up, {a, b, c, d}, Rat(1));
            if (t.N == 0) continue;
            const int N = t.N;
            const auto& th = t.thresholds;
            const bool beta_bad =
                th.Nhat_plus > 0 && (lo.add_rate(N, a, b) > 0 || lo.jump(N, a, b) > 0);
            const bool gamma_bad =
                th.Nhat_minus > 0 && (up.sub_rate(N, c, d) > 0 || up.jump(N, c, d) > 0);
            if (beta_bad && gamma_bad)
              CHECK((th.Nd_plus == N || th.Nd_minus == N));
            if (!beta_bad) {
              CHECK(th.Nd_plus == N + 1);
              CHECK(th.NB == N + 1);
            }
            if (!gamma_bad) {
              CHECK(th.Nd_minus == N + 1);
              CHECK(th.ND == N + 1);
            }
            // with both conditions certified, the two coupling phases cover
            // the problem range
            if (ordered && beta_bad) CHECK(std::max(th.NB, th.Nd_plus) >= th.Nhat_plus);
            if (ordered && gamma_bad) CHECK(std::max(th.ND, th.Nd_minus) >= th.Nhat_minus);
          }
  }
}

TEST_CASE("tables scale linearly in the kernel weight") {
  RateSpec lo = random_spec(2, 2, 0.5, 4, 777);
  RateSpec up = random_spec(2, 2, 0.5, 4, 778);
  const Quadruple q{1, 0, 2, 1};
  TermMap full = term_map(build_coupling_table(lo, up, q, Rat(1)));
  TermMap half = term_map(build_coupling_table(lo, up, q, Rat(1, 2)));
  REQUIRE(full.size() == half.size());
  for (const auto& [key, rate] : full) CHECK(half.at(key) == rate / 2);
}
