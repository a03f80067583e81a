#ifndef IPS_MODELS_HPP
#define IPS_MODELS_HPP

#include <cstdint>
#include <string>

#include "ips/rates.hpp"

namespace ips {

struct BuiltModel {
  RateSpec spec;
  StateSpace space;
  Kernel kernel;
  DeathKernelDirection death_dir = DeathKernelDirection::Reverse;
};

struct BadParams : std::invalid_argument {
  explicit BadParams(const std::string& what) : std::invalid_argument(what) {}
};

// Cluster model: within-cluster growth phi*beta, cross-cluster seeding of
// empty clusters at 2*d*lambda*alpha, whole-cluster wipeout at rate 1.
BuiltModel build_tuberculosis(const Rat& lambda, const Rat& phi, int M, int d);

// Two competing species encoded into occupancies {0,1,2}. labeling maps
// (empty, type-1, type-2) to occupancy values and decides whether the
// occupancy order matches the competitive order.
struct TwoTypeLabeling {
  int empty, type1, type2;
};
BuiltModel build_two_type_contact(const Rat& lambda1, const Rat& lambda2,
                                  TwoTypeLabeling labeling, int d);

// Conservative misanthrope-style default: jumps of k particles at rate c
// whenever the source holds at least k.
BuiltModel build_conservative(const Rat& c, int M, int k_max, int d);

// Patch model with crowding-limited births, a higher per-capita death rate
// below the Allee size M_A, and flock migration of k individuals when the
// source patch exceeds M - N_mig.
BuiltModel build_metapop_allee(int M, int M_A, int N_mig, const Rat& lambda,
                               const Rat& phi, const Rat& phi_A, int d);

// Individual-recovery epidemic: clusters of M individuals, cross infection
// lambda (healthy target) / beta (infected target), spontaneous seeding
// gamma, within-cluster infection phi, unit recovery.
BuiltModel build_epidemic(const Rat& lambda, const Rat& beta, const Rat& gamma,
                          const Rat& phi, int M, int d);

// Sparse random rational spec, canonicalized; reproducible by seed.
// density is the per-entry fill probability in [0,1].
RateSpec random_spec(int M, int k_max, double density, int denominator_bound,
                     uint64_t seed);

}  // namespace ips

#endif
