#include "ips/coupling.hpp"

#include <algorithm>
#include <stdexcept>

namespace ips {

const char* change_kind_name(ChangeKind k) {
  switch (k) {
    case ChangeKind::None: return "none";
    case ChangeKind::Jump: return "jump";
    case ChangeKind::Birth: return "birth";
    case ChangeKind::Death: return "death";
  }
  return "?";
}

namespace {

// The coupled terms fall into seven families, indexed by the lower change
// size k and the upper change size l (both in [1,N]):
//   JJ (k,k,l,l)   jump/jump        BB (0,k,0,l)   birth/birth
//   DD (-k,0,-l,0) death/death      JB (k,k,0,l)   lower jump vs upper birth
//   DJ (-k,0,l,l)  lower death vs upper jump
//   BJ (0,k,l,l)   lower birth vs upper jump
//   JD (k,k,-l,0)  lower jump vs upper death
// Each family's defining formula references other families at higher k or l
// plus a bounded set of same-index partners; the references form a DAG, so
// memoized recursion evaluates the downwards recursion in a valid order.
enum Family { JJ, BB, DD, JB, DJ, BJ, JD, kFamilies };

class Builder {
 public:
  Builder(const RateSpec& lower, const RateSpec& upper, const Quadruple& q,
          const Rat& p)
      : lo_(lower), up_(upper), q_(q), p_(p) {
    N_ = std::max(lo_.N(q.alpha, q.beta), up_.N(q.gamma, q.delta));
    const size_t cells = size_t(kFamilies) * (N_ + 1) * (N_ + 1);
    value_.assign(cells, Rat(0));
    state_.assign(cells, 0);
  }

  int N() const { return N_; }

  const Rat& term(Family f, int k, int l) {
    const size_t i = index(f, k, l);
    if (state_[i] == 2) return value_[i];
    if (state_[i] == 1)
      throw std::logic_error("coupling recursion is cyclic");
    state_[i] = 1;
    value_[i] = compute(f, k, l);
    if (value_[i] < 0)
      throw std::logic_error("negative coupling term");
    state_[i] = 2;
    return value_[i];
  }

  // Base rates at the quadruple, premultiplied by p.
  Rat gl(int k) const { return lo_.jump(k, q_.alpha, q_.beta) * p_; }
  Rat gu(int l) const { return up_.jump(l, q_.gamma, q_.delta) * p_; }
  Rat bl(int k) const { return lo_.add_rate(k, q_.alpha, q_.beta) * p_; }
  Rat bu(int l) const { return up_.add_rate(l, q_.gamma, q_.delta) * p_; }
  Rat dl(int k) const { return lo_.sub_rate(k, q_.alpha, q_.beta) * p_; }
  Rat du(int l) const { return up_.sub_rate(l, q_.gamma, q_.delta) * p_; }

  // Remainder of the lower k-jump before step l of the jump-vs-jump phase.
  Rat rem_jump_lower(int k, int l) {
    Rat r = gl(k);
    for (int l2 = l; l2 <= N_; ++l2) r -= term(JJ, k, l2) + term(JD, k, l2);
    return r;
  }
  Rat rem_jump_upper(int k, int l) {
    Rat r = gu(l);
    for (int k2 = k; k2 <= N_; ++k2) r -= term(JJ, k2, l) + term(BJ, k2, l);
    return r;
  }
  Rat rem_birth_lower(int k, int l) {
    Rat r = bl(k);
    for (int l2 = l; l2 <= N_; ++l2) r -= term(BB, k, l2);
    return r;
  }
  Rat rem_birth_upper(int k, int l) {
    Rat r = bu(l);
    for (int k2 = k; k2 <= N_; ++k2) r -= term(BB, k2, l) + term(JB, k2, l);
    return r;
  }
  Rat rem_death_lower(int k, int l) {
    Rat r = dl(k);
    for (int l2 = l; l2 <= N_; ++l2) r -= term(DD, k, l2) + term(DJ, k, l2);
    return r;
  }
  Rat rem_death_upper(int k, int l) {
    Rat r = du(l);
    for (int k2 = k; k2 <= N_; ++k2) r -= term(DD, k2, l);
    return r;
  }
  // Leftover of the lower k-jump after the whole jump-vs-jump phase and the
  // jump-vs-birth steps above l.
  Rat rem_jump_lower_vs_birth(int k, int l) {
    Rat r = gl(k);
    for (int l2 = 1; l2 <= N_; ++l2) r -= term(JJ, k, l2);
    for (int l2 = l; l2 <= N_; ++l2) r -= term(JB, k, l2);
    return r;
  }
  Rat rem_jump_upper_vs_death(int k, int l) {
    Rat r = gu(l);
    for (int k2 = 1; k2 <= N_; ++k2) r -= term(JJ, k2, l);
    for (int k2 = k; k2 <= N_; ++k2) r -= term(DJ, k2, l);
    return r;
  }
  Rat rem_birth_lower_vs_jump(int k, int l) {
    Rat r = bl(k);
    for (int l2 = 1; l2 <= N_; ++l2) r -= term(BB, k, l2);
    const int top = std::min(N_, q_.gamma - q_.alpha);
    for (int l2 = l; l2 <= top; ++l2) r -= term(BJ, k, l2);
    return r;
  }
  Rat rem_death_upper_vs_jump(int k, int l) {
    Rat r = du(l);
    for (int k2 = 1; k2 <= N_; ++k2) r -= term(DD, k2, l);
    const int top = std::min(N_, q_.delta - q_.beta);
    for (int k2 = k; k2 <= top; ++k2) r -= term(JD, k2, l);
    return r;
  }

 private:
  size_t index(Family f, int k, int l) const {
    return (size_t(f) * (N_ + 1) + k) * (N_ + 1) + l;
  }

  Rat compute(Family f, int k, int l) {
    const int a = q_.alpha, b = q_.beta, c = q_.gamma, d = q_.delta;
    switch (f) {
      case JJ:
        // coupled only when one side has a problem and the landing spot
        // keeps the order on both sites
        if (!((a > c - l || b + k > d) && b + k <= d + l && a - k <= c - l))
          return Rat(0);
        return rat_min(rem_jump_lower(k, l + 1), rem_jump_upper(k + 1, l));
      case BB:
        if (!(d + l >= b + k && b + k > d)) return Rat(0);
        return rat_min(rem_birth_lower(k, l + 1), rem_birth_upper(k + 1, l));
      case DD:
        if (!(a > c - l && c - l >= a - k)) return Rat(0);
        return rat_min(rem_death_lower(k, l + 1), rem_death_upper(k + 1, l));
      case JB:
        if (!(b + k > d)) return Rat(0);
        return rat_min(rem_jump_lower_vs_birth(k, l + 1),
                       rem_birth_upper(k + 1, l) - term(BB, k, l));
      case DJ:
        if (!(a > c - l)) return Rat(0);
        return rat_min(rem_death_lower(k, l + 1) - term(DD, k, l),
                       rem_jump_upper_vs_death(k + 1, l));
      case BJ:
        if (!(b + k > d && a <= c - l)) return Rat(0);
        return rat_min(rem_birth_lower_vs_jump(k, l + 1),
                       rem_jump_upper(k + 1, l) - term(JJ, k, l));
      case JD:
        if (!(a > c - l && b + k <= d)) return Rat(0);
        return rat_min(rem_jump_lower(k, l + 1) - term(JJ, k, l),
                       rem_death_upper_vs_jump(k + 1, l));
      default:
        throw std::logic_error("unreachable");
    }
  }

  const RateSpec& lo_;
  const RateSpec& up_;
  Quadruple q_;
  Rat p_;
  int N_;
  std::vector<Rat> value_;
  std::vector<char> state_;  // 0 unset, 1 in progress, 2 done
};

void push_term(std::vector<CouplingTerm>& terms, Change lower, Change upper,
               Rat rate) {
  if (rate == 0) return;
  if (rate < 0) throw std::logic_error("negative coupling rate");
  terms.push_back({lower, upper, std::move(rate)});
}

Change jump_of(int k) { return {ChangeKind::Jump, k}; }
Change birth_of(int k) { return {ChangeKind::Birth, k}; }
Change death_of(int k) { return {ChangeKind::Death, k}; }
Change none() { return {ChangeKind::None, 0}; }

// First step index, scanning downward from `from` to `until`, at which the
// running remainder is exhausted by its partner; `until - 1` if it survives
// the whole scan, `N + 1` if the scan never applies.
int flip_threshold(Builder& bd, int N, bool active, int from, int until,
                   const std::function<Rat(int)>& remainder,
                   const std::function<Rat(int)>& partner) {
  if (!active) return N + 1;
  for (int s = from; s >= until; --s)
    if (remainder(s) <= partner(s)) return s;
  return until - 1;
}

}  // namespace

Rat CouplingTable::marginal_sum(bool lower_side, ChangeKind kind, int k) const {
  Rat total(0);
  for (const CouplingTerm& t : terms) {
    const Change& c = lower_side ? t.lower : t.upper;
    if (c.kind == kind && c.k == k) total += t.rate;
  }
  return total;
}

CouplingTable build_coupling_table(const RateSpec& lower, const RateSpec& upper,
                                   const Quadruple& q, const Rat& p) {
  if (!q.ordered()) throw std::invalid_argument("quadruple is not ordered");
  if (p <= 0) throw ZeroKernel();

  Builder bd(lower, upper, q, p);
  const int N = bd.N();
  CouplingTable table;
  table.q = q;
  table.p = p;
  table.N = N;

  // coupled terms
  for (int k = 1; k <= N; ++k)
    for (int l = 1; l <= N; ++l) {
      push_term(table.terms, jump_of(k), jump_of(l), bd.term(JJ, k, l));
      push_term(table.terms, birth_of(k), birth_of(l), bd.term(BB, k, l));
      push_term(table.terms, death_of(k), death_of(l), bd.term(DD, k, l));
      push_term(table.terms, jump_of(k), birth_of(l), bd.term(JB, k, l));
      push_term(table.terms, death_of(k), jump_of(l), bd.term(DJ, k, l));
      push_term(table.terms, birth_of(k), jump_of(l), bd.term(BJ, k, l));
      push_term(table.terms, jump_of(k), death_of(l), bd.term(JD, k, l));
    }

  // uncoupled closures: whatever is left of each original rate
  for (int k = 1; k <= N; ++k) {
    Rat jl = bd.gl(k), blr = bd.bl(k), dlr = bd.dl(k);
    Rat ju = bd.gu(k), bur = bd.bu(k), dur = bd.du(k);
    for (int l = 1; l <= N; ++l) {
      jl -= bd.term(JJ, k, l) + bd.term(JB, k, l) + bd.term(JD, k, l);
      blr -= bd.term(BB, k, l) + bd.term(BJ, k, l);
      dlr -= bd.term(DD, k, l) + bd.term(DJ, k, l);
      ju -= bd.term(JJ, l, k) + bd.term(DJ, l, k) + bd.term(BJ, l, k);
      bur -= bd.term(BB, l, k) + bd.term(JB, l, k);
      dur -= bd.term(DD, l, k) + bd.term(JD, l, k);
    }
    push_term(table.terms, jump_of(k), none(), jl);
    push_term(table.terms, birth_of(k), none(), blr);
    push_term(table.terms, death_of(k), none(), dlr);
    push_term(table.terms, none(), jump_of(k), ju);
    push_term(table.terms, none(), birth_of(k), bur);
    push_term(table.terms, none(), death_of(k), dur);
  }

  std::sort(table.terms.begin(), table.terms.end(),
            [](const CouplingTerm& x, const CouplingTerm& y) {
              return std::tie(x.lower, x.upper) < std::tie(y.lower, y.upper);
            });

  // materialized remainders, for audits
  for (int k = 1; k <= N; ++k)
    for (int l = 1; l <= N + 1; ++l) {
      table.remainders.jump_lower[{k, l}] = bd.rem_jump_lower(k, l);
      table.remainders.birth_lower[{k, l}] = bd.rem_birth_lower(k, l);
      table.remainders.death_lower[{k, l}] = bd.rem_death_lower(k, l);
      table.remainders.jump_lower_vs_birth[{k, l}] = bd.rem_jump_lower_vs_birth(k, l);
      table.remainders.birth_lower_vs_jump[{k, l}] = bd.rem_birth_lower_vs_jump(k, l);
      // upper-side remainders index (step k, rate size l)
      table.remainders.jump_upper[{l, k}] = bd.rem_jump_upper(l, k);
      table.remainders.birth_upper[{l, k}] = bd.rem_birth_upper(l, k);
      table.remainders.death_upper[{l, k}] = bd.rem_death_upper(l, k);
      table.remainders.jump_upper_vs_death[{l, k}] = bd.rem_jump_upper_vs_death(l, k);
      table.remainders.death_upper_vs_jump[{l, k}] = bd.rem_death_upper_vs_jump(l, k);
    }

  // diagnostic thresholds of the top-level (size N) recursions
  CouplingThresholds& th = table.thresholds;
  th.Nhat_plus = N - (q.delta - q.beta);
  th.Nhat_minus = N - (q.gamma - q.alpha);
  const bool beta_bad =
      th.Nhat_plus > 0 && (bd.bl(N) > 0 || bd.gl(N) > 0);
  const bool gamma_bad =
      th.Nhat_minus > 0 && (bd.du(N) > 0 || bd.gu(N) > 0);

  th.Nd_plus = flip_threshold(
      bd, N, beta_bad, N, std::max(th.Nhat_plus, 1),
      [&](int l) { return bd.rem_jump_lower(N, l + 1); },
      [&](int l) { return bd.gu(l); });
  th.NB = flip_threshold(
      bd, N, beta_bad, N, std::max(th.Nhat_plus, 1),
      [&](int l) { return bd.rem_birth_lower(N, l + 1); },
      [&](int l) { return bd.bu(l); });
  th.Nd_minus = flip_threshold(
      bd, N, gamma_bad, N, std::max(th.Nhat_minus, 1),
      [&](int k) { return bd.rem_jump_upper(k + 1, N); },
      [&](int k) { return bd.gl(k); });
  th.ND = flip_threshold(
      bd, N, gamma_bad, N, std::max(th.Nhat_minus, 1),
      [&](int k) { return bd.rem_death_upper(k + 1, N); },
      [&](int k) { return bd.dl(k); });
  th.NdB = flip_threshold(
      bd, N, beta_bad && bd.rem_jump_lower(N, std::max(th.Nhat_plus, 1)) > 0, N, 1,
      [&](int l) { return bd.rem_jump_lower_vs_birth(N, l + 1); },
      [&](int l) { return bd.rem_birth_upper(N + 1, l) - bd.term(BB, N, l); });
  th.NBd = flip_threshold(
      bd, N, beta_bad && bd.rem_birth_lower(N, std::max(th.Nhat_plus, 1)) > 0,
      std::min(N, q.gamma - q.alpha), 1,
      [&](int l) { return bd.rem_birth_lower_vs_jump(N, l + 1); },
      [&](int l) { return bd.rem_jump_upper(N + 1, l) - bd.term(JJ, N, l); });
  th.NdD = flip_threshold(
      bd, N, gamma_bad && bd.rem_jump_upper(std::max(th.Nhat_minus, 1), N) > 0, N, 1,
      [&](int k) { return bd.rem_jump_upper_vs_death(k + 1, N); },
      [&](int k) { return bd.rem_death_lower(k, N + 1) - bd.term(DD, k, N); });
  th.NDd = flip_threshold(
      bd, N, gamma_bad && bd.rem_death_upper(std::max(th.Nhat_minus, 1), N) > 0,
      std::min(N, q.delta - q.beta), 1,
      [&](int k) { return bd.rem_death_upper_vs_jump(k + 1, N); },
      [&](int k) { return bd.rem_jump_lower(k, N + 1) - bd.term(JJ, k, N); });

  return table;
}

CouplingTable build_coupling_n1(const RateSpec& lower, const RateSpec& upper,
                                const Quadruple& q, const Rat& p) {
  if (lower.N_bar() > 1 || upper.N_bar() > 1) throw NotSingleChange();
  if (!q.ordered()) throw std::invalid_argument("quadruple is not ordered");
  if (p <= 0) throw ZeroKernel();

  CouplingTable table;
  table.q = q;
  table.p = p;
  table.N = std::max(lower.N(q.alpha, q.beta), upper.N(q.gamma, q.delta));
  table.thresholds.Nhat_plus = table.N - (q.delta - q.beta);
  table.thresholds.Nhat_minus = table.N - (q.gamma - q.alpha);
  if (table.N == 0) return table;

  const int a = q.alpha, b = q.beta, c = q.gamma, d = q.delta;
  const Rat tl = lower.jump(1, a, b) * p, tu = upper.jump(1, c, d) * p;
  const Rat blr = lower.add_rate(1, a, b) * p, bur = upper.add_rate(1, c, d) * p;
  const Rat dlr = lower.sub_rate(1, a, b) * p, dur = upper.sub_rate(1, c, d) * p;

  Rat jj(0), bb(0), dd(0), jb(0), dj(0), bj(0), jd(0);
  if (b == d || c == a) jj = rat_min(tl, tu);
  if (b == d) {
    bb = rat_min(blr, bur);
    jb = rat_min(tl - jj, bur - bb);
    if (c > a) bj = rat_min(blr - bb, tu - jj);
  }
  if (a == c) {
    dd = rat_min(dlr, dur);
    dj = rat_min(dlr - dd, tu - jj);
    if (b < d) jd = rat_min(tl - jj, dur - dd);
  }

  push_term(table.terms, jump_of(1), jump_of(1), jj);
  push_term(table.terms, birth_of(1), birth_of(1), bb);
  push_term(table.terms, death_of(1), death_of(1), dd);
  push_term(table.terms, jump_of(1), birth_of(1), jb);
  push_term(table.terms, death_of(1), jump_of(1), dj);
  push_term(table.terms, birth_of(1), jump_of(1), bj);
  push_term(table.terms, jump_of(1), death_of(1), jd);
  push_term(table.terms, birth_of(1), none(), blr - bb - bj);
  push_term(table.terms, jump_of(1), none(), tl - jj - jd - jb);
  push_term(table.terms, none(), birth_of(1), bur - bb - jb);
  push_term(table.terms, none(), jump_of(1), tu - jj - bj - dj);
  push_term(table.terms, death_of(1), none(), dlr - dd - dj);
  push_term(table.terms, none(), death_of(1), dur - dd - jd);

  std::sort(table.terms.begin(), table.terms.end(),
            [](const CouplingTerm& x, const CouplingTerm& y) {
              return std::tie(x.lower, x.upper) < std::tie(y.lower, y.upper);
            });
  return table;
}

MarginalReport verify_marginals(const CouplingTable& table, const RateSpec& lower,
                                const RateSpec& upper) {
  MarginalReport report;
  const Quadruple& q = table.q;
  const int k_top = std::max(lower.k_max(), upper.k_max());
  for (int k = 1; k <= k_top; ++k) {
    const struct {
      bool lower_side;
      ChangeKind kind;
      Rat expected;
    } checks[] = {
        {true, ChangeKind::Jump, lower.jump(k, q.alpha, q.beta) * table.p},
        {true, ChangeKind::Birth, lower.add_rate(k, q.alpha, q.beta) * table.p},
        {true, ChangeKind::Death, lower.sub_rate(k, q.alpha, q.beta) * table.p},
        {false, ChangeKind::Jump, upper.jump(k, q.gamma, q.delta) * table.p},
        {false, ChangeKind::Birth, upper.add_rate(k, q.gamma, q.delta) * table.p},
        {false, ChangeKind::Death, upper.sub_rate(k, q.gamma, q.delta) * table.p},
    };
    for (const auto& chk : checks) {
      Rat actual = table.marginal_sum(chk.lower_side, chk.kind, k);
      if (actual != chk.expected)
        report.mismatches.push_back(
            {chk.lower_side, Change{chk.kind, k}, chk.expected, actual});
    }
  }
  return report;
}

namespace {

void apply_change(const Change& ch, int& first, int& second,
                  const StateSpace& space) {
  switch (ch.kind) {
    case ChangeKind::None:
      break;
    case ChangeKind::Jump:
      if (space.contains(first - ch.k) && space.contains(second + ch.k)) {
        first -= ch.k;
        second += ch.k;
      }
      break;
    case ChangeKind::Birth:
      if (space.contains(second + ch.k)) second += ch.k;
      break;
    case ChangeKind::Death:
      if (space.contains(first - ch.k)) first -= ch.k;
      break;
  }
}

}  // namespace

Quadruple apply_term(const Quadruple& state, const CouplingTerm& term,
                     const StateSpace& space) {
  Quadruple out = state;
  apply_change(term.lower, out.alpha, out.beta, space);
  apply_change(term.upper, out.gamma, out.delta, space);
  return out;
}

OrderReport verify_increasing(const CouplingTable& table, const Quadruple& q,
                              const StateSpace& space) {
  OrderReport report;
  for (const CouplingTerm& t : table.terms) {
    if (t.rate == 0) continue;
    const Quadruple r = apply_term(q, t, space);
    if (!(r.alpha <= r.gamma && r.beta <= r.delta))
      report.flags.push_back({t, r});
  }
  return report;
}

}  // namespace ips
