#ifndef IPS_ERGODICITY_HPP
#define IPS_ERGODICITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "ips/rational.hpp"

namespace ips {

// Parameters of the individual-recovery epidemic model used by the
// ergodicity test: cross infection lambda (healthy target) / beta_rate
// (infected target), spontaneous seeding gamma_birth, within-cluster
// infection phi, cluster size M, lattice dimension d.
struct EpidemicParams {
  Rat lambda;
  Rat beta_rate;
  Rat gamma_birth;
  Rat phi;
  int M = 1;
  int d = 1;

  Rat infection_max() const { return rat_max(lambda, beta_rate); }
};

struct PhiOutOfRange : std::runtime_error {
  PhiOutOfRange() : std::runtime_error("requires phi < 1") {}
};
struct PhiZero : std::runtime_error {
  PhiZero() : std::runtime_error("the weight recursion requires phi > 0") {}
};

// Cluster-size-aware contraction threshold (1-phi)/(2d(1-phi^M)).
Rat threshold(const EpidemicParams& params);

struct USequence {
  Rat U;        // u_0
  Rat epsilon;
  std::vector<Rat> u;  // u_0..u_M

  Rat u_bar() const;  // max over entries
};

// Weight recursion u_l = (1/(phi l)) (-eps sum_{j<l} u_j
//                                     - U (lambda v beta) 2d l + l u_{l-1}).
USequence u_sequence(const EpidemicParams& params, const Rat& epsilon,
                     const Rat& U);

// Contraction test: for every l in 1..M,
//   phi l u_l - l u_{l-1} <= -eps sum_{j<l} u_j - u_bar (lambda v beta) 2d l
// and u_l > 0. Works for any candidate sequence, not only u_sequence output.
bool check_u_criterion(const EpidemicParams& params, const USequence& useq);

struct EpsilonGrid {
  Rat eps_min;
  Rat eps_max;
  int steps = 60;

  static EpsilonGrid standard(const EpidemicParams& params);
  std::vector<Rat> points() const;  // geometric, exact rationals
};

// Scans the grid from small epsilon up and returns the first passing
// (epsilon, sequence), if any.
std::optional<std::pair<Rat, USequence>> find_epsilon(const EpidemicParams& params,
                                                      const EpsilonGrid& grid);
std::optional<std::pair<Rat, USequence>> find_epsilon(const EpidemicParams& params);

// Which form of the seeding clause to apply when gamma_birth > 0: the
// statement-level bound (beta - lambda <= gamma/(2d)) or the stricter bound
// the contraction argument actually uses (beta - lambda <= gamma/(2dM)).
enum class ErgodicityMode { TheoremText, ProofSupported };

struct ErgodicityVerdict {
  bool ergodic;
  std::string reason;  // "ok", "threshold", or "gamma_clause"
};

ErgodicityVerdict classify_ergodic(const EpidemicParams& params,
                                   ErgodicityMode mode = ErgodicityMode::ProofSupported);

// Path metric F(x,y) = 1{x != y} sum_{j=0}^{|y-x|-1} u_j.
Rat metric_F(int x, int y, const USequence& useq);

// Weighted configuration distance rho(xi, eta) = sum_x F(xi(x), eta(x)) w(x).
Rat distance_rho(const std::vector<int>& xi, const std::vector<int>& eta,
                 const USequence& useq, const std::vector<Rat>& weights);

}  // namespace ips

#endif
