#ifndef IPS_COUPLING_HPP
#define IPS_COUPLING_HPP

#include <map>
#include <vector>

#include "ips/order.hpp"
#include "ips/rates.hpp"

namespace ips {

enum class ChangeKind { None, Jump, Birth, Death };

// Local move of one marginal at an ordered site pair (x,y): Jump moves k
// particles x->y, Birth adds k on y, Death removes k at x.
struct Change {
  ChangeKind kind = ChangeKind::None;
  int k = 0;

  bool operator==(const Change& o) const = default;
  auto operator<=>(const Change& o) const = default;
};

const char* change_kind_name(ChangeKind k);

struct CouplingTerm {
  Change lower, upper;
  Rat rate;  // > 0 for stored terms
};

// Indices of the first recursion level at which each family's remainder is
// exhausted, kept for audits. N+1 encodes "no such step was needed".
struct CouplingThresholds {
  int Nhat_plus = 0;   // N - (delta - beta)
  int Nhat_minus = 0;  // N - (gamma - alpha)
  int Nd_plus = 0, Nd_minus = 0;  // jump-vs-jump, lower / upper problem
  int NB = 0, ND = 0;             // birth-vs-birth / death-vs-death
  int NdB = 0, NdD = 0;           // leftover jump vs birth / death
  int NBd = 0, NDd = 0;           // leftover birth / death vs jump
};

// Remainders of each original rate along the recursion, materialized so the
// construction can be audited step by step. Keys are (change size, step):
// entry (k,l) is what is left of the size-k rate before the step that
// considers partner size l (steps run downward, so (k, N+1) is the full
// rate and (k, 1) is what the final uncoupled term receives).
struct RemainderSet {
  std::map<std::pair<int, int>, Rat> jump_lower, jump_upper;
  std::map<std::pair<int, int>, Rat> birth_lower, birth_upper;
  std::map<std::pair<int, int>, Rat> death_lower, death_upper;
  // leftover phases: jumps coupled against births/deaths and vice versa
  std::map<std::pair<int, int>, Rat> jump_lower_vs_birth, jump_upper_vs_death;
  std::map<std::pair<int, int>, Rat> birth_lower_vs_jump, death_upper_vs_jump;
};

struct CouplingTable {
  Quadruple q;
  Rat p;
  int N = 0;  // largest change size with any rate at this quadruple
  std::vector<CouplingTerm> terms;  // nonzero terms, deterministic order
  CouplingThresholds thresholds;
  RemainderSet remainders;

  // Sum of rates of stored terms matching (lower kind,k miss = any).
  Rat marginal_sum(bool lower_side, ChangeKind kind, int k) const;
};

// Builds the full coupled-rate table for one quadruple at kernel weight p by
// the downwards recursion: jump-jump first, then birth-birth / death-death,
// then the leftover mixing of jumps with births and deaths, then the
// uncoupled closures. All arithmetic exact; zero rates flow through.
CouplingTable build_coupling_table(const RateSpec& lower, const RateSpec& upper,
                                   const Quadruple& q, const Rat& p);

// Closed-form table for single-change systems; must equal
// build_coupling_table term by term. Throws NotSingleChange otherwise.
CouplingTable build_coupling_n1(const RateSpec& lower, const RateSpec& upper,
                                const Quadruple& q, const Rat& p);

struct MarginalMismatch {
  bool lower_side;
  Change change;
  Rat expected, actual;
};

struct MarginalReport {
  std::vector<MarginalMismatch> mismatches;
  bool empty() const { return mismatches.empty(); }
};

// Exact comparison of every per-(side, change) marginal sum against the
// localized rates; empty report means the table is a true coupling.
MarginalReport verify_marginals(const CouplingTable& table, const RateSpec& lower,
                                const RateSpec& upper);

struct OrderFlag {
  CouplingTerm term;
  Quadruple result;
};

struct OrderReport {
  std::vector<OrderFlag> flags;
  bool empty() const { return flags.empty(); }
};

// Applies every stored term to the quadruple and flags nonzero terms whose
// resulting pair breaks alpha' <= gamma' or beta' <= delta'.
OrderReport verify_increasing(const CouplingTable& table, const Quadruple& q,
                              const StateSpace& space);

// Deterministic local update; components whose move would leave X stay put.
Quadruple apply_term(const Quadruple& state, const CouplingTerm& term,
                     const StateSpace& space);

}  // namespace ips

#endif
