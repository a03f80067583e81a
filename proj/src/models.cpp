#include "ips/models.hpp"

#include <algorithm>

#include "ips/rng.hpp"

namespace ips {

BuiltModel build_tuberculosis(const Rat& lambda, const Rat& phi, int M, int d) {
  if (M < 1 || d < 1 || lambda < 0 || phi < 0)
    throw BadParams("tuberculosis: need M>=1, d>=1, nonnegative rates");
  StateSpace space{M};
  RateSpec spec(space, M);
  // in-cluster growth, blocked at full clusters
  for (int b = 1; b <= M - 1; ++b)
    spec.set(RateKind::BirthSite, 1, 0, b, phi * b);
  // seeding of empty clusters by each of the alpha occupants across the bond
  for (int a = 0; a <= M; ++a)
    spec.set(RateKind::BirthPair, 1, a, 0, Rat(2 * d) * lambda * a);
  // the whole cluster dies at once
  for (int b = 1; b <= M; ++b) spec.set(RateKind::DeathSite, b, b, 0, Rat(1));
  return {canonicalize(spec, space), space, Kernel::nearest_neighbor(d)};
}

BuiltModel build_two_type_contact(const Rat& lambda1, const Rat& lambda2,
                                  TwoTypeLabeling labeling, int d) {
  int occ[3] = {labeling.empty, labeling.type1, labeling.type2};
  std::sort(occ, occ + 3);
  if (occ[0] != 0 || occ[1] != 1 || occ[2] != 2)
    throw BadParams("two_type_contact: labeling must be a permutation of {0,1,2}");
  if (d < 1 || lambda1 < 0 || lambda2 < 0)
    throw BadParams("two_type_contact: need d>=1, nonnegative rates");
  StateSpace space{2};
  RateSpec spec(space, 2);

  // Species moves at site y: empty -> type-i at rate 2d*lambda_i per occupied
  // neighbor of the same type; type-i -> empty at rate 1. Each move is a
  // birth or death of |delta| particles depending on the occupancy labels.
  auto pair_move = [&](int from, int to, int neighbor, const Rat& rate) {
    const int delta = to - from;
    if (delta > 0)
      spec.set(RateKind::BirthPair, delta, neighbor, from, rate);
    else
      spec.set(RateKind::DeathPair, -delta, from, neighbor, rate);
  };
  const Rat cross = Rat(2 * d);
  pair_move(labeling.empty, labeling.type1, labeling.type1, cross * lambda1);
  pair_move(labeling.empty, labeling.type2, labeling.type2, cross * lambda2);

  auto site_move = [&](int from, int to, const Rat& rate) {
    const int delta = to - from;
    if (delta > 0)
      spec.set(RateKind::BirthSite, delta, 0, from, rate);
    else
      spec.set(RateKind::DeathSite, -delta, from, 0, rate);
  };
  site_move(labeling.type1, labeling.empty, Rat(1));
  site_move(labeling.type2, labeling.empty, Rat(1));

  return {canonicalize(spec, space), space, Kernel::nearest_neighbor(d)};
}

BuiltModel build_conservative(const Rat& c, int M, int k_max, int d) {
  if (M < 1 || k_max < 1 || d < 1 || c < 0)
    throw BadParams("conservative: need M>=1, k_max>=1, d>=1, c>=0");
  StateSpace space{M};
  RateSpec spec(space, k_max);
  for (int k = 1; k <= k_max; ++k)
    for (int a = k; a <= M; ++a)
      for (int b = 0; b <= M; ++b)
        spec.set(RateKind::Jump, k, a, b, c);
  return {canonicalize(spec, space), space, Kernel::nearest_neighbor(d)};
}

BuiltModel build_metapop_allee(int M, int M_A, int N_mig, const Rat& lambda,
                               const Rat& phi, const Rat& phi_A, int d) {
  if (!(M >= M_A && M_A > 0 && M > N_mig && N_mig > 0) || d < 1 || lambda < 0 ||
      phi < 0 || phi_A < 0)
    throw BadParams("metapop_allee: need M >= M_A > 0, M > N_mig > 0, d>=1");
  StateSpace space{M};
  RateSpec spec(space, N_mig);
  for (int b = 0; b <= M - 1; ++b)
    spec.set(RateKind::BirthSite, 1, 0, b, Rat(b));
  for (int b = 1; b <= M; ++b)
    spec.set(RateKind::DeathSite, 1, b, 0, Rat(b) * (b <= M_A ? phi_A : phi));
  for (int k = 1; k <= N_mig; ++k)
    for (int a = 0; a <= M; ++a)
      for (int b = 0; b <= M; ++b)
        if (a - k >= M - N_mig && b + k <= M)
          spec.set(RateKind::Jump, k, a, b, lambda);
  return {canonicalize(spec, space), space, Kernel::nearest_neighbor(d)};
}

BuiltModel build_epidemic(const Rat& lambda, const Rat& beta, const Rat& gamma,
                          const Rat& phi, int M, int d) {
  if (M < 1 || d < 1 || lambda < 0 || beta < 0 || gamma < 0 || phi < 0)
    throw BadParams("epidemic: need M>=1, d>=1, nonnegative rates");
  StateSpace space{M};
  RateSpec spec(space, 1);
  const Rat twod(2 * d);
  for (int a = 0; a <= M; ++a) {
    spec.set(RateKind::BirthPair, 1, a, 0, twod * lambda * a);
    for (int b = 1; b <= M - 1; ++b)
      spec.set(RateKind::BirthPair, 1, a, b, twod * beta * a);
  }
  spec.set(RateKind::BirthSite, 1, 0, 0, gamma);
  for (int b = 1; b <= M - 1; ++b)
    spec.set(RateKind::BirthSite, 1, 0, b, phi * b);
  for (int b = 1; b <= M; ++b) spec.set(RateKind::DeathSite, 1, b, 0, Rat(b));
  return {canonicalize(spec, space), space, Kernel::nearest_neighbor(d)};
}

RateSpec random_spec(int M, int k_max, double density, int denominator_bound,
                     uint64_t seed) {
  StateSpace space{M};
  RateSpec spec(space, k_max);
  Rng rng(seed);
  auto draw = [&]() {
    long num = long(rng.below(uint64_t(denominator_bound))) + 1;
    long den = long(rng.below(uint64_t(denominator_bound))) + 1;
    Rat r(num, den);
    r.canonicalize();
    return r;
  };
  const auto pair_kinds = {RateKind::Jump, RateKind::BirthPair, RateKind::DeathPair};
  for (RateKind kind : pair_kinds)
    for (int k = 1; k <= k_max; ++k)
      for (int a = 0; a <= M; ++a)
        for (int b = 0; b <= M; ++b)
          if (rng.uniform() < density) spec.set(kind, k, a, b, draw());
  for (int k = 1; k <= k_max; ++k)
    for (int v = 0; v <= M; ++v) {
      if (rng.uniform() < density) spec.set(RateKind::BirthSite, k, 0, v, draw());
      if (rng.uniform() < density) spec.set(RateKind::DeathSite, k, v, 0, draw());
    }
  return canonicalize(spec, space);
}

}  // namespace ips
