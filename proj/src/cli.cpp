#include "ips/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <thread>

#include "ips/jsonio.hpp"
#include "ips/model_io.hpp"
#include "ips/models.hpp"

namespace ips {

namespace {

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : int(n);
}

// Loads a model and insists it is clean enough to work with: hard errors
// reject the file, no-op entries are silently canonicalized away.
ModelFile load_checked(const std::string& path, std::ostream& out) {
  ModelFile m = load_model(path);
  ValidationReport report = validate(m.spec, m.space, m.kernel);
  if (report.has_errors()) {
    out << validation_json(report).dump(2) << "\n";
    throw ModelParseError("model file '" + path + "' failed validation");
  }
  m.spec = canonicalize(m.spec, m.space);
  return m;
}

Configuration make_init(const std::string& desc, long sites, int M) {
  if (desc == "all-0") return Configuration(size_t(sites), 0);
  if (desc == "all-max") return Configuration(size_t(sites), M);
  if (desc.rfind("all-", 0) == 0) {
    const int v = std::stoi(desc.substr(4));
    if (v < 0 || v > M) throw CLI::ValidationError("init", "occupancy out of range");
    return Configuration(size_t(sites), v);
  }
  throw CLI::ValidationError("init", "expected all-0, all-max or all-<k>");
}

struct LatticeOption {
  int d = 1;
  int L = 2;
};

LatticeOption parse_lattice(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("lattice", "expected d,L");
  LatticeOption opt;
  opt.d = std::stoi(s.substr(0, comma));
  opt.L = std::stoi(s.substr(comma + 1));
  if (opt.d < 1 || opt.L < 2)
    throw CLI::ValidationError("lattice", "need d >= 1 and L >= 2");
  return opt;
}

EpidemicParams params_from_model(const ModelFile& m) {
  EpidemicParams p;
  auto need = [&](const char* key) {
    auto it = m.params.find(key);
    if (it == m.params.end())
      throw ModelParseError(std::string("model file lacks [params] key '") +
                            key + "'");
    return it->second;
  };
  p.lambda = rat_parse(need("lambda"));
  p.beta_rate = rat_parse(need("beta"));
  p.gamma_birth = rat_parse(need("gamma"));
  p.phi = rat_parse(need("phi"));
  p.M = std::stoi(need("M"));
  p.d = std::stoi(need("d"));
  return p;
}

Quadruple parse_quad(const std::string& s) {
  Quadruple q;
  int vals[4];
  size_t start = 0;
  for (int i = 0; i < 4; ++i) {
    const size_t comma = s.find(',', start);
    if ((comma == std::string::npos) != (i == 3))
      throw CLI::ValidationError("quad", "expected alpha,beta,gamma,delta");
    vals[i] = std::stoi(s.substr(start, comma - start));
    start = comma + 1;
  }
  q = {vals[0], vals[1], vals[2], vals[3]};
  if (!q.ordered())
    throw CLI::ValidationError("quad", "need alpha <= gamma and beta <= delta");
  return q;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"exact order certification and simulation for lattice particle systems"};
  app.require_subcommand(1);
  app.fallthrough();  // app-level flags like --jobs may follow the subcommand

  std::string model_path, lower_path, upper_path, out_path;
  uint64_t seed = 0;
  int jobs = default_jobs();
  std::string mode_str = "proof_supported";
  std::string lattice_str = "1,2";
  app.add_option("--jobs", jobs, "worker threads for scans and replicas")
      ->envname("IPS_JOBS");

  int exit_code = 0;

  auto* validate_cmd = app.add_subcommand("validate", "check a model file");
  validate_cmd->add_option("--model", model_path)->required();
  validate_cmd->callback([&] {
    ModelFile m = load_model(model_path);
    ValidationReport report = validate(m.spec, m.space, m.kernel);
    out << validation_json(report).dump(2) << "\n";
    exit_code = report.empty() ? 0 : 2;
  });

  auto* order_cmd =
      app.add_subcommand("certify-order", "decide stochastic order lower <= upper");
  order_cmd->add_option("--lower", lower_path)->required();
  order_cmd->add_option("--upper", upper_path)->required();
  order_cmd->callback([&] {
    ModelFile lo = load_checked(lower_path, out);
    ModelFile up = load_checked(upper_path, out);
    Certificate cert = certify_stochastic_order(lo.spec, up.spec, jobs);
    out << certificate_json(cert).dump(2) << "\n";
    err << "certify-order: " << (cert.ordered() ? "Ordered" : "NotOrdered")
        << " (" << cert.families_checked << " families)\n";
    exit_code = cert.ordered() ? 0 : 1;
  });

  auto* attract_cmd =
      app.add_subcommand("certify-attractive", "decide attractiveness of a model");
  attract_cmd->add_option("--model", model_path)->required();
  attract_cmd->callback([&] {
    ModelFile m = load_checked(model_path, out);
    Certificate cert = certify_attractiveness(m.spec, jobs);
    out << certificate_json(cert).dump(2) << "\n";
    err << "certify-attractive: " << (cert.ordered() ? "Ordered" : "NotOrdered")
        << "\n";
    exit_code = cert.ordered() ? 0 : 1;
  });

  auto* couple_cmd =
      app.add_subcommand("couple", "dump the coupled-rate table for one quadruple");
  std::string quad_str, p_str = "1/1";
  couple_cmd->add_option("--lower", lower_path);
  couple_cmd->add_option("--upper", upper_path);
  couple_cmd->add_option("--model", model_path, "self-pair shorthand");
  couple_cmd->add_option("--quad", quad_str, "alpha,beta,gamma,delta")->required();
  couple_cmd->add_option("--p", p_str, "kernel weight as num/den");
  couple_cmd->callback([&] {
    ModelFile lo = model_path.empty() ? load_checked(lower_path, out)
                                      : load_checked(model_path, out);
    ModelFile up = model_path.empty() && !upper_path.empty()
                       ? load_checked(upper_path, out)
                       : lo;
    CouplingTable table =
        build_coupling_table(lo.spec, up.spec, parse_quad(quad_str), rat_parse(p_str));
    out << coupling_table_json(table).dump(2) << "\n";
  });

  auto* ergodic_cmd =
      app.add_subcommand("ergodic", "u-criterion test for the epidemic model");
  std::string lam_str, beta_str, gamma_str, phi_str;
  int M_opt = 0, d_opt = 1;
  ergodic_cmd->add_option("--model", model_path, "model file with [params]");
  ergodic_cmd->add_option("--lambda", lam_str);
  ergodic_cmd->add_option("--beta", beta_str);
  ergodic_cmd->add_option("--gamma", gamma_str);
  ergodic_cmd->add_option("--phi", phi_str);
  ergodic_cmd->add_option("--M", M_opt);
  ergodic_cmd->add_option("--d", d_opt);
  ergodic_cmd->add_option("--mode", mode_str, "theorem_text|proof_supported")
      ->envname("IPS_MODE");
  ergodic_cmd->callback([&] {
    EpidemicParams p;
    if (!model_path.empty()) {
      p = params_from_model(load_model(model_path));
    } else {
      if (lam_str.empty() || beta_str.empty() || gamma_str.empty() ||
          phi_str.empty() || M_opt < 1)
        throw CLI::ValidationError(
            "ergodic", "need --model or all of --lambda --beta --gamma --phi --M");
      p = {rat_parse(lam_str), rat_parse(beta_str), rat_parse(gamma_str),
           rat_parse(phi_str), M_opt, d_opt};
    }
    const ErgodicityMode mode = mode_str == "theorem_text"
                                    ? ErgodicityMode::TheoremText
                                    : ErgodicityMode::ProofSupported;
    Json j = ergodic_json(p, mode);
    out << j.dump(2) << "\n";
    err << "ergodic: " << (j["ergodic"].get<bool>() ? "yes" : "no") << "\n";
    exit_code = j["ergodic"].get<bool>() ? 0 : 1;
  });

  auto* sim_cmd = app.add_subcommand("simulate", "event-driven simulation");
  std::string init_lower = "all-0", init_upper = "all-max";
  long events = 0;
  double t_max = 0;
  int rho_samples = 20;
  bool no_strict = false, log_events = false;
  sim_cmd->add_option("--model", model_path, "single-system run");
  sim_cmd->add_option("--lower", lower_path, "coupled run, lower system");
  sim_cmd->add_option("--upper", upper_path, "coupled run, upper system");
  sim_cmd->add_option("--lattice", lattice_str, "d,L torus");
  sim_cmd->add_option("--seed", seed)->required()->envname("IPS_SEED");
  sim_cmd->add_option("--events", events, "stop after this many events");
  sim_cmd->add_option("--t-max", t_max, "stop at this model time");
  sim_cmd->add_option("--init", init_lower, "all-0 | all-max | all-<k>");
  sim_cmd->add_option("--init-upper", init_upper, "coupled runs only");
  sim_cmd->add_option("--rho-samples", rho_samples);
  sim_cmd->add_flag("--no-strict", no_strict, "count order breaks instead of aborting");
  sim_cmd->add_flag("--log-events", log_events);
  sim_cmd->add_option("--out", out_path, "trajectory CSV path")->envname("IPS_OUT");
  sim_cmd->callback([&] {
    if (events <= 0 && t_max <= 0)
      throw CLI::ValidationError("simulate", "need --events or --t-max");
    const StopRule stop = events > 0 ? StopRule::after_events(events)
                                     : StopRule::at_time(t_max);
    const LatticeOption lat = parse_lattice(lattice_str);
    const Lattice lattice{lat.d, lat.L};
    SimOptions opts;
    opts.rho_samples = rho_samples;
    opts.strict_order = !no_strict;
    opts.log_events = log_events;

    SimResult res;
    if (!model_path.empty()) {
      ModelFile m = load_checked(model_path, out);
      opts.death_dir = m.death_dir;
      const long n = m.kernel.type == Kernel::Type::Pairs ? m.kernel.n_sites
                                                          : lattice.sites();
      res = simulate_single(m.spec, m.kernel, lattice,
                            make_init(init_lower, n, m.space.max_occupancy), stop,
                            seed, opts);
    } else {
      if (lower_path.empty() || upper_path.empty())
        throw CLI::ValidationError("simulate", "need --model or --lower/--upper");
      ModelFile lo = load_checked(lower_path, out);
      ModelFile up = load_checked(upper_path, out);
      opts.death_dir = lo.death_dir;
      const long n = lo.kernel.type == Kernel::Type::Pairs ? lo.kernel.n_sites
                                                           : lattice.sites();
      CoupledState init{make_init(init_lower, n, lo.space.max_occupancy),
                        make_init(init_upper, n, up.space.max_occupancy)};
      res = simulate_coupled(lo.spec, up.spec, lo.kernel, lattice, init, stop,
                             seed, opts);
    }
    out << sim_json(res).dump(2) << "\n";
    if (!out_path.empty()) {
      std::ofstream csv(out_path);
      csv << sim_trace_csv(res);
      err << "trace written to " << out_path << "\n";
      if (log_events) {
        std::ofstream ev(out_path + ".events.csv");
        ev << "t,x,y,lower_kind,lower_k,upper_kind,upper_k\n";
        for (const EventRecord& e : res.event_log)
          ev << e.t << "," << e.x << "," << e.y << ","
             << change_kind_name(e.lower.kind) << "," << e.lower.k << ","
             << change_kind_name(e.upper.kind) << "," << e.upper.k << "\n";
        err << "event log written to " << out_path << ".events.csv\n";
      }
    } else if (log_events) {
      throw CLI::ValidationError("simulate", "--log-events needs --out");
    }
    exit_code = res.order_violations > 0 ? 1 : 0;
  });

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "brute-force two-site up-set check of stochastic order");
  int cap = 4;
  std::string oracle_p = "1/1";
  oracle_cmd->add_option("--model", model_path, "self-pair shorthand");
  oracle_cmd->add_option("--lower", lower_path);
  oracle_cmd->add_option("--upper", upper_path);
  oracle_cmd->add_option("--cap", cap, "max occupancy the scan accepts");
  oracle_cmd->add_option("--p", oracle_p, "pair weight as num/den");
  oracle_cmd->callback([&] {
    ModelFile lo = model_path.empty() ? load_checked(lower_path, out)
                                      : load_checked(model_path, out);
    ModelFile up = model_path.empty() && !upper_path.empty()
                       ? load_checked(upper_path, out)
                       : lo;
    OracleResult res = oracle_increasing_sets(
        localize(lo.spec, up.spec, rat_parse(oracle_p)), cap);
    out << oracle_json(res).dump(2) << "\n";
    err << "oracle: " << (res.ordered ? "ordered" : "not ordered") << "\n";
    exit_code = res.ordered ? 0 : 1;
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const ModelParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}

}  // namespace ips
