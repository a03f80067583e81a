#include <doctest.h>

#include "ips/model_io.hpp"
#include "ips/models.hpp"

using namespace ips;

TEST_CASE("parsing a hand-written model file") {
  const std::string text = R"(# a small system
schema_version = 1
state_max = 2
death_kernel_direction = "reverse"

[kernel]
type = "nearest_neighbor"
d = 1

[[rates]]
kind = "birth_pair"
k = 1
alpha = 1
beta = 0
value = "2/1"

[[rates]]
kind = "death_site"
k = 2
alpha = 2
value = "1/3"
)";
  ModelFile m = parse_model(text);
  CHECK(m.space.max_occupancy == 2);
  CHECK(m.death_dir == DeathKernelDirection::Reverse);
  CHECK(m.kernel.type == Kernel::Type::Stencil);
  CHECK(m.kernel.offset_prob({1}) == Rat(1, 2));
  CHECK(m.spec.birth_pair(1, 1, 0) == Rat(2));
  CHECK(m.spec.death_site(2, 2) == Rat(1, 3));
  CHECK(m.spec.jump(1, 1, 0) == 0);  // unspecified entries default to zero
}

TEST_CASE("explicit pair kernels and params tables parse") {
  const std::string text = R"(
state_max = 1
[kernel]
type = "pairs"
sites = 2
pairs = [
  { x = 0, y = 1, p = "1/1" },
  { x = 1, y = 0, p = "1/1" },
]
[params]
lambda = "3/10"
M = 2
)";
  ModelFile m = parse_model(text);
  CHECK(m.kernel.type == Kernel::Type::Pairs);
  CHECK(m.kernel.pair_prob(0, 1) == Rat(1));
  CHECK(m.params.at("lambda") == "3/10");
  CHECK(m.params.at("M") == "2");
}

TEST_CASE("parse errors carry messages") {
  CHECK_THROWS_AS(parse_model("state_max = 2\n"), ModelParseError);  // no kernel
  CHECK_THROWS_AS(parse_model("[kernel]\ntype = \"nearest_neighbor\"\nd = 1\n"),
                  ModelParseError);  // no state_max
  CHECK_THROWS_AS(
      parse_model("state_max = 1\ndeath_kernel_direction = \"sideways\"\n"
                  "[kernel]\ntype = \"nearest_neighbor\"\nd = 1\n"),
      ModelParseError);
}

TEST_CASE("export -> parse -> export is byte-identical for every built-in") {
  std::vector<ModelFile> models;
  models.push_back(ModelFile::wrap(
      build_epidemic(Rat(1), Rat(2), Rat(1, 2), Rat(1, 3), 2, 1).spec,
      Kernel::nearest_neighbor(1)));
  models.push_back(ModelFile::wrap(
      build_two_type_contact(Rat(1), Rat(1), {0, 1, 2}, 1).spec,
      Kernel::nearest_neighbor(1)));
  models.push_back(ModelFile::wrap(
      build_two_type_contact(Rat(1), Rat(1), {1, 0, 2}, 1).spec,
      Kernel::nearest_neighbor(1)));
  models.push_back(ModelFile::wrap(build_tuberculosis(Rat(1), Rat(1), 3, 2).spec,
                                   Kernel::nearest_neighbor(2)));
  models.push_back(ModelFile::wrap(build_conservative(Rat(2), 2, 2, 1).spec,
                                   Kernel::nearest_neighbor(1)));
  models.push_back(
      ModelFile::wrap(build_metapop_allee(4, 2, 2, Rat(1), Rat(1), Rat(1), 1).spec,
                      Kernel::nearest_neighbor(1)));
  models[0].params = {{"lambda", "1/1"}, {"beta", "2/1"}, {"gamma", "1/2"},
                      {"phi", "1/3"},   {"M", "2"},       {"d", "1"}};
  for (const ModelFile& m : models) {
    const std::string once = export_model(m);
    const std::string twice = export_model(parse_model(once));
    CHECK(once == twice);
    // and the reparse reproduces the rates exactly
    CHECK(parse_model(once).spec == m.spec);
  }
}

TEST_CASE("round-trip through a general stencil kernel") {
  Kernel k;
  k.type = Kernel::Type::Stencil;
  k.dim = 1;
  k.stencil = {{{1}, Rat(1, 4)}, {{-1}, Rat(3, 4)}};
  ModelFile m = ModelFile::wrap(RateSpec(StateSpace{1}, 1), k);
  const std::string once = export_model(m);
  ModelFile back = parse_model(once);
  CHECK(back.kernel.offset_prob({1}) == Rat(1, 4));
  CHECK(back.kernel.offset_prob({-1}) == Rat(3, 4));
  CHECK(export_model(back) == once);
}
