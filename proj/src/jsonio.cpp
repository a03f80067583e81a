#include "ips/jsonio.hpp"

#include <sstream>

namespace ips {

namespace {

Json witness_json(const Witness& w) {
  Json j;
  j["alpha"] = w.q.alpha;
  j["beta"] = w.q.beta;
  j["gamma"] = w.q.gamma;
  j["delta"] = w.q.delta;
  j["side"] = w.side == Side::CPlus ? "plus" : "minus";
  j["K"] = w.fam.K();
  j[w.side == Side::CPlus ? "j" : "h"] = w.fam.first;
  j["m"] = w.fam.m;
  j["lhs"] = rat_str(w.lhs);
  j["rhs"] = rat_str(w.rhs);
  return j;
}

Json change_json(const Change& c) {
  Json j;
  j["kind"] = change_kind_name(c.kind);
  j["k"] = c.k;
  return j;
}

}  // namespace

Json certificate_json(const Certificate& cert) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["verdict"] = cert.ordered() ? "Ordered" : "NotOrdered";
  j["quadruples_checked"] = cert.quadruples_checked;
  j["families_checked"] = cert.families_checked;
  if (cert.sufficient_only) j["sufficient_only"] = true;
  if (cert.witness) j["witness"] = witness_json(*cert.witness);
  return j;
}

Json validation_json(const ValidationReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["ok"] = report.empty();
  Json issues = Json::array();
  for (const auto& issue : report.issues) {
    Json item;
    item["severity"] =
        issue.severity == ValidationIssue::Severity::Error ? "error" : "warning";
    item["code"] = issue.code;
    item["message"] = issue.message;
    issues.push_back(item);
  }
  j["issues"] = issues;
  return j;
}

Json coupling_table_json(const CouplingTable& table) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["quadruple"] = {table.q.alpha, table.q.beta, table.q.gamma, table.q.delta};
  j["p"] = rat_str(table.p);
  j["N"] = table.N;
  Json terms = Json::array();
  for (const CouplingTerm& t : table.terms) {
    Json item;
    item["lower"] = change_json(t.lower);
    item["upper"] = change_json(t.upper);
    item["rate"] = rat_str(t.rate);
    terms.push_back(item);
  }
  j["terms"] = terms;
  const CouplingThresholds& th = table.thresholds;
  j["thresholds"] = Json{{"Nhat_plus", th.Nhat_plus},
                         {"Nhat_minus", th.Nhat_minus},
                         {"Nd_plus", th.Nd_plus},
                         {"Nd_minus", th.Nd_minus},
                         {"NB", th.NB},
                         {"ND", th.ND},
                         {"NdB", th.NdB},
                         {"NBd", th.NBd},
                         {"NdD", th.NdD},
                         {"NDd", th.NDd}};
  return j;
}

Json oracle_json(const OracleResult& result) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["ordered"] = result.ordered;
  j["pairs_checked"] = result.pairs_checked;
  j["sets_checked"] = result.sets_checked;
  if (result.counterexample) {
    const auto& ce = *result.counterexample;
    Json c;
    c["xi"] = {ce.xi.x, ce.xi.y};
    c["eta"] = {ce.eta.x, ce.eta.y};
    c["up_set_thresholds"] = ce.up_set_thresholds;
    c["lhs"] = rat_str(ce.lhs);
    c["rhs"] = rat_str(ce.rhs);
    j["counterexample"] = c;
  }
  return j;
}

Json ergodic_json(const EpidemicParams& params, ErgodicityMode mode) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda"] = rat_str(params.lambda);
  j["beta"] = rat_str(params.beta_rate);
  j["gamma"] = rat_str(params.gamma_birth);
  j["phi"] = rat_str(params.phi);
  j["M"] = params.M;
  j["d"] = params.d;
  j["threshold"] = rat_str(threshold(params));
  const auto found = find_epsilon(params);
  if (found) {
    j["epsilon_found"] = rat_str(found->first);
    Json u = Json::array();
    for (const Rat& v : found->second.u) u.push_back(rat_str(v));
    j["u"] = u;
  } else {
    j["epsilon_found"] = nullptr;
    j["u"] = Json::array();
  }
  const auto verdict = classify_ergodic(params, mode);
  j["ergodic"] = verdict.ergodic;
  j["reason"] = verdict.reason;
  j["mode"] =
      mode == ErgodicityMode::TheoremText ? "theorem_text" : "proof_supported";
  return j;
}

Json sim_json(const SimResult& result) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["events"] = result.events;
  j["t_end"] = result.t_end;
  j["seed"] = result.seed;
  j["order_violations"] = result.order_violations;
  if (!result.trace.empty()) {
    j["rho_initial"] = result.trace.front().rho;
    j["rho_final"] = result.trace.back().rho;
  }
  auto density = [](const Configuration& c) {
    double s = 0;
    for (int v : c) s += v;
    return c.empty() ? 0.0 : s / double(c.size());
  };
  j["lower_density"] = density(result.final_lower);
  if (!result.final_upper.empty())
    j["upper_density"] = density(result.final_upper);
  return j;
}

Json equivalence_json(const EquivalenceReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["verdict_single_index"] =
      report.verdict_single_index == Verdict::Ordered ? "Ordered" : "NotOrdered";
  j["verdict_interval_form"] =
      report.verdict_interval_form == Verdict::Ordered ? "Ordered" : "NotOrdered";
  j["agree"] = report.agree;
  return j;
}

std::string sim_trace_csv(const SimResult& result) {
  std::ostringstream out;
  out << "time,rho,lower_density,upper_density,events\n";
  for (const TraceSample& s : result.trace)
    out << s.t << "," << s.rho << "," << s.lower_density << ","
        << s.upper_density << "," << s.events << "\n";
  return out.str();
}

}  // namespace ips
