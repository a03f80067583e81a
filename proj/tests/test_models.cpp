#include <doctest.h>

#include "ips/models.hpp"

using namespace ips;

TEST_CASE("epidemic rates match the display") {
  const Rat lam(2), bet(3), gam(1, 2), phi(1, 3);
  BuiltModel m = build_epidemic(lam, bet, gam, phi, 2, 1);
  // additions on an empty cluster: 2*d*lambda*alpha, plus seeding gamma
  CHECK(m.spec.birth_pair(1, 1, 0) == Rat(2) * lam * 1);
  CHECK(m.spec.birth_pair(1, 2, 0) == Rat(2) * lam * 2);
  CHECK(m.spec.birth_pair(1, 2, 1) == Rat(2) * bet * 2);
  CHECK(m.spec.birth_pair(1, 2, 2) == 0);  // full cluster
  CHECK(m.spec.birth_site(1, 0) == gam);
  CHECK(m.spec.birth_site(1, 1) == phi * 1);
  CHECK(m.spec.birth_site(1, 2) == 0);
  CHECK(m.spec.death_site(1, 1) == 1);
  CHECK(m.spec.death_site(1, 2) == 2);
  CHECK(m.spec.death_site(1, 0) == 0);
  CHECK(m.spec.N_bar() == 1);
}

TEST_CASE("two-type contact rates for both labelings") {
  const Rat l1(1), l2(1);
  BuiltModel a = build_two_type_contact(l1, l2, {0, 1, 2}, 1);
  CHECK(a.spec.birth_pair(1, 1, 0) == Rat(2) * l1);
  CHECK(a.spec.birth_pair(2, 2, 0) == Rat(2) * l2);
  CHECK(a.spec.death_site(1, 1) == 1);
  CHECK(a.spec.death_site(2, 2) == 1);

  BuiltModel b = build_two_type_contact(l1, l2, {1, 0, 2}, 1);
  // species-1 colonization is a death 1 -> 0 at the target site
  CHECK(b.spec.death_pair(1, 1, 0) == Rat(2) * l1);
  // species-2 colonization is a birth 1 -> 2
  CHECK(b.spec.birth_pair(1, 2, 1) == Rat(2) * l2);
  // species deaths: 0 -> 1 (birth), 2 -> 1 (death)
  CHECK(b.spec.birth_site(1, 0) == 1);
  CHECK(b.spec.death_site(1, 2) == 1);

  CHECK_THROWS_AS(build_two_type_contact(l1, l2, {0, 1, 1}, 1), BadParams);
}

TEST_CASE("tuberculosis rates match the display") {
  const Rat lam(1), phi(1);
  BuiltModel m = build_tuberculosis(lam, phi, 2, 1);
  CHECK(m.spec.birth_site(1, 0) == 0);
  CHECK(m.spec.birth_site(1, 1) == phi * 1);
  CHECK(m.spec.birth_pair(1, 1, 0) == Rat(2) * lam);
  CHECK(m.spec.birth_pair(1, 2, 0) == Rat(4) * lam);
  // whole-cluster death: k = beta at rate 1
  CHECK(m.spec.death_site(1, 1) == 1);
  CHECK(m.spec.death_site(2, 2) == 1);
  CHECK(m.spec.death_site(1, 2) == 0);
}

TEST_CASE("metapop rates match the display") {
  BuiltModel m = build_metapop_allee(4, 2, 2, Rat(1), Rat(1), Rat(1), 1);
  CHECK(m.spec.birth_site(1, 3) == 3);
  CHECK(m.spec.birth_site(1, 4) == 0);
  CHECK(m.spec.death_site(1, 2) == 2);  // allee branch
  CHECK(m.spec.death_site(1, 3) == 3);  // plain branch
  // migration: alpha - k >= M - N and beta + k <= M
  CHECK(m.spec.jump(2, 4, 2) == 1);
  CHECK(m.spec.jump(2, 3, 0) == 0);  // 3 - 2 < 2
  CHECK(m.spec.jump(1, 3, 4) == 0);  // target overflows
}

TEST_CASE("every built-in passes validation with an empty report") {
  std::vector<BuiltModel> models;
  models.push_back(build_epidemic(Rat(1), Rat(1), Rat(1, 2), Rat(1, 2), 2, 1));
  models.push_back(build_two_type_contact(Rat(1), Rat(1), {0, 1, 2}, 1));
  models.push_back(build_two_type_contact(Rat(1), Rat(1), {1, 0, 2}, 2));
  models.push_back(build_tuberculosis(Rat(1), Rat(1), 3, 1));
  models.push_back(build_conservative(Rat(2), 2, 2, 1));
  models.push_back(build_metapop_allee(4, 2, 2, Rat(1), Rat(1), Rat(1), 1));
  for (const BuiltModel& m : models)
    CHECK(validate(m.spec, m.space, m.kernel).empty());
}

TEST_CASE("random specs are reproducible and density 0 gives all-zero") {
  RateSpec a = random_spec(2, 2, 0.4, 6, 7);
  RateSpec b = random_spec(2, 2, 0.4, 6, 7);
  CHECK(a == b);
  RateSpec c = random_spec(2, 2, 0.4, 6, 8);
  CHECK_FALSE(a == c);

  RateSpec zero = random_spec(3, 2, 0.0, 6, 123);
  CHECK(zero.N_bar() == 0);
}
