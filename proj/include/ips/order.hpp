#ifndef IPS_ORDER_HPP
#define IPS_ORDER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ips/rates.hpp"

namespace ips {

// An ordered pair of ordered local states (alpha,beta) <= (gamma,delta);
// the unit over which every condition is checked.
struct Quadruple {
  int alpha = 0, beta = 0, gamma = 0, delta = 0;

  bool ordered() const { return alpha <= gamma && beta <= delta; }
  bool operator==(const Quadruple& o) const = default;
};

// K index-aligned nondecreasing tuples: `first` plays the role of j on the
// addition side and h on the subtraction side; `m` is shared.
struct TupleFamily {
  std::vector<int> first;
  std::vector<int> m;

  int K() const { return int(first.size()); }
};

// Small integer sets as bitmasks (values 0..63).
using IndexMask = uint64_t;
std::vector<int> mask_values(IndexMask m);

struct IndexSets {
  IndexMask a = 0;  // addition side: lower-jump indices
  IndexMask b = 0;  // addition side: upper-jump indices
};

// Addition-side sets:
//   I_a = U_i { k in X : m_i >= k > delta-beta+j_i }
//   I_b = U_i { k in X : gamma-alpha+m_i >= k > j_i }
IndexSets index_sets_plus(const StateSpace& space, const Quadruple& q,
                          const TupleFamily& fam);
// Subtraction-side sets (first = h):
//   I_c = U_i { k in X : m_i >= k > gamma-alpha+h_i }
//   I_d = U_i { k in X : delta-beta+m_i >= k > h_i }
IndexSets index_sets_minus(const StateSpace& space, const Quadruple& q,
                           const TupleFamily& fam);

struct ConditionResult {
  bool holds;
  Rat lhs, rhs;
};

// Addition condition at one quadruple and family: total addition pressure of
// the lower system past the gap must not exceed the upper system's.
ConditionResult check_condition_plus(const RateSpec& lower, const RateSpec& upper,
                                     const Quadruple& q, const TupleFamily& fam);
// Subtraction condition, mirrored: lower subtraction pressure must dominate.
ConditionResult check_condition_minus(const RateSpec& lower, const RateSpec& upper,
                                      const Quadruple& q, const TupleFamily& fam);

// Yields every nondecreasing (first, m) tuple pair with K <= N and entries
// in [0, N], deduplicated on the (first_1, index-set) signature. Returning
// false from the callback stops the stream.
void enumerate_families(const StateSpace& space, const Quadruple& q, int N,
                        const std::function<bool(const TupleFamily&)>& yield);

enum class Side { CPlus, CMinus };

struct Witness {
  Quadruple q;
  Side side;
  TupleFamily fam;
  Rat lhs, rhs;
};

enum class Verdict { Ordered, NotOrdered };

struct Certificate {
  Verdict verdict = Verdict::Ordered;
  long quadruples_checked = 0;
  long families_checked = 0;
  std::optional<Witness> witness;
  bool sufficient_only = false;  // set by the kernel-weighted general checker

  bool ordered() const { return verdict == Verdict::Ordered; }
};

// Decides stochastic order between two systems over the same state space by
// exhaustive exact checking of both condition families at every quadruple.
// Deterministic: the witness is the first violation in lexicographic
// (alpha,beta,gamma,delta) scan order, then K, then tuple order.
Certificate certify_stochastic_order(const RateSpec& lower, const RateSpec& upper,
                                     int jobs = 1);

// certify_stochastic_order(spec, spec).
Certificate certify_attractiveness(const RateSpec& spec, int jobs = 1);

struct NotSingleChange : std::runtime_error {
  NotSingleChange() : std::runtime_error("spec moves more than one particle per transition") {}
};

// Single-change shortcut: when no transition moves more than one particle,
// the full family scan collapses to four two-sided comparisons per
// quadruple. Must agree with certify_stochastic_order.
Certificate check_single_change(const RateSpec& lower, const RateSpec& upper);

struct NotConservative : std::runtime_error {
  NotConservative() : std::runtime_error("spec has birth or death rates") {}
};

struct EquivalenceReport {
  Verdict verdict_single_index;  // per-j / per-h tail comparisons
  Verdict verdict_interval_form; // index-set unions
  bool agree;
};

// Evaluates both equivalent condition families for conservative systems and
// reports both verdicts; they must agree.
EquivalenceReport check_conservative_equivalence(const RateSpec& lower,
                                                 const RateSpec& upper);

struct StateSpaceTooLarge : std::runtime_error {
  StateSpaceTooLarge()
      : std::runtime_error("two-site up-set scan disabled above the occupancy cap") {}
};

struct TwoSiteState {
  int x = 0, y = 0;
  bool operator==(const TwoSiteState& o) const = default;
};

struct OracleCounterexample {
  TwoSiteState xi, eta;
  // Up-set as a staircase: for first coordinate a the set contains (a,b)
  // iff b >= threshold[a]; thresholds are nonincreasing, M+1 means empty row.
  std::vector<int> up_set_thresholds;
  Rat lhs, rhs;
};

struct OracleResult {
  bool ordered;
  long pairs_checked = 0;
  long sets_checked = 0;
  std::optional<OracleCounterexample> counterexample;
};

// Brute-force oracle on a localized pair: evaluates both two-site generators
// on the indicator of every up-set of the grid poset X^2, over every ordered
// configuration pair that the set does not separate. Independent of the
// condition checker; used to validate it.
OracleResult oracle_increasing_sets(const LocalizedPairSystem& sys,
                                    int max_occupancy_cap = 4);
OracleResult oracle_increasing_sets(const RateSpec& lower, const RateSpec& upper,
                                    int max_occupancy_cap = 4);

// Rate family with arbitrary kernel and optional per-pair overrides, for the
// kernel-weighted sufficient-only check.
struct GeneralSystem {
  RateSpec base;
  Kernel kernel;
  std::map<std::pair<int, int>, RateSpec> pair_overrides;  // explicit kernels only

  const RateSpec& rates_at(int x, int y) const;
};

// Kernel-weighted inequalities per ordered site pair; Ordered is a
// sufficient certificate only (flagged in the output).
Certificate certify_general(const GeneralSystem& lower, const GeneralSystem& upper);

}  // namespace ips

#endif
