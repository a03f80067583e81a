#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ips/cli.hpp"
#include "ips/jsonio.hpp"
#include "ips/model_io.hpp"
#include "ips/models.hpp"
#include "ips/simulate.hpp"

namespace py = pybind11;
using namespace ips;

namespace {

// The binding speaks model-file text and JSON documents; numbers that must
// stay exact travel as "num/den" strings.

ModelFile load_text(const std::string& text) {
  ModelFile m = parse_model(text);
  m.spec = canonicalize(m.spec, m.space);
  return m;
}

std::string epidemic_text(const std::string& lambda, const std::string& beta,
                          const std::string& gamma, const std::string& phi,
                          int M, int d) {
  ModelFile m = ModelFile::wrap(
      build_epidemic(rat_parse(lambda), rat_parse(beta), rat_parse(gamma),
                     rat_parse(phi), M, d)
          .spec,
      Kernel::nearest_neighbor(d));
  m.params = {{"lambda", lambda}, {"beta", beta}, {"gamma", gamma},
              {"phi", phi},       {"M", std::to_string(M)},
              {"d", std::to_string(d)}};
  return export_model(m);
}

std::string two_type_text(const std::string& l1, const std::string& l2,
                          std::vector<int> labeling, int d) {
  if (labeling.size() != 3) throw std::invalid_argument("labeling needs 3 values");
  return export_model(ModelFile::wrap(
      build_two_type_contact(rat_parse(l1), rat_parse(l2),
                             {labeling[0], labeling[1], labeling[2]}, d)
          .spec,
      Kernel::nearest_neighbor(d)));
}

std::string tuberculosis_text(const std::string& lambda, const std::string& phi,
                              int M, int d) {
  return export_model(ModelFile::wrap(
      build_tuberculosis(rat_parse(lambda), rat_parse(phi), M, d).spec,
      Kernel::nearest_neighbor(d)));
}

std::string conservative_text(const std::string& c, int M, int k_max, int d) {
  return export_model(
      ModelFile::wrap(build_conservative(rat_parse(c), M, k_max, d).spec,
                      Kernel::nearest_neighbor(d)));
}

std::string metapop_text(int M, int M_A, int N_mig, const std::string& lambda,
                         const std::string& phi, const std::string& phi_A, int d) {
  return export_model(ModelFile::wrap(
      build_metapop_allee(M, M_A, N_mig, rat_parse(lambda), rat_parse(phi),
                          rat_parse(phi_A), d)
          .spec,
      Kernel::nearest_neighbor(d)));
}

std::string validate_text(const std::string& text) {
  ModelFile m = parse_model(text);
  return validation_json(validate(m.spec, m.space, m.kernel)).dump();
}

std::string certify_attractive_text(const std::string& text, int jobs) {
  return certificate_json(certify_attractiveness(load_text(text).spec, jobs))
      .dump();
}

std::string certify_order_text(const std::string& lower, const std::string& upper,
                               int jobs) {
  return certificate_json(certify_stochastic_order(load_text(lower).spec,
                                                   load_text(upper).spec, jobs))
      .dump();
}

std::string oracle_text(const std::string& lower, const std::string& upper,
                        const std::string& p, int cap) {
  return oracle_json(oracle_increasing_sets(
                         localize(load_text(lower).spec, load_text(upper).spec,
                                  rat_parse(p)),
                         cap))
      .dump();
}

std::string coupling_text(const std::string& lower, const std::string& upper,
                          std::vector<int> quad, const std::string& p) {
  if (quad.size() != 4) throw std::invalid_argument("quad needs 4 values");
  return coupling_table_json(
             build_coupling_table(load_text(lower).spec, load_text(upper).spec,
                                  {quad[0], quad[1], quad[2], quad[3]},
                                  rat_parse(p)))
      .dump();
}

std::string ergodic_text(const std::string& lambda, const std::string& beta,
                         const std::string& gamma, const std::string& phi, int M,
                         int d, const std::string& mode) {
  EpidemicParams p{rat_parse(lambda), rat_parse(beta), rat_parse(gamma),
                   rat_parse(phi), M, d};
  return ergodic_json(p, mode == "theorem_text" ? ErgodicityMode::TheoremText
                                                : ErgodicityMode::ProofSupported)
      .dump();
}

Configuration init_from(const py::object& spec, long sites, int M) {
  if (py::isinstance<py::str>(spec)) {
    const std::string s = spec.cast<std::string>();
    if (s == "all-0") return Configuration(size_t(sites), 0);
    if (s == "all-max") return Configuration(size_t(sites), M);
    throw std::invalid_argument("init must be all-0, all-max or a list");
  }
  return spec.cast<Configuration>();
}

py::dict sim_to_dict(const SimResult& r) {
  py::dict d;
  d["events"] = r.events;
  d["t_end"] = r.t_end;
  d["order_violations"] = r.order_violations;
  d["final_lower"] = r.final_lower;
  if (!r.final_upper.empty()) d["final_upper"] = r.final_upper;
  py::list trace;
  for (const TraceSample& s : r.trace) {
    py::dict row;
    row["t"] = s.t;
    row["rho"] = s.rho;
    row["lower_density"] = s.lower_density;
    row["upper_density"] = s.upper_density;
    row["events"] = s.events;
    trace.append(row);
  }
  d["trace"] = trace;
  return d;
}

StopRule stop_from(long events, double t_max) {
  if (events > 0) return StopRule::after_events(events);
  if (t_max > 0) return StopRule::at_time(t_max);
  throw std::invalid_argument("need events > 0 or t_max > 0");
}

py::dict simulate_single_py(const std::string& text, int d, int L,
                            const py::object& init, uint64_t seed, long events,
                            double t_max) {
  ModelFile m = load_text(text);
  Lattice lat{d, L};
  const long n = m.kernel.type == Kernel::Type::Pairs ? m.kernel.n_sites
                                                      : lat.sites();
  SimOptions opts;
  opts.death_dir = m.death_dir;
  return sim_to_dict(simulate_single(m.spec, m.kernel, lat,
                                     init_from(init, n, m.space.max_occupancy),
                                     stop_from(events, t_max), seed, opts));
}

py::dict simulate_coupled_py(const std::string& lower, const std::string& upper,
                             int d, int L, const py::object& init_lower,
                             const py::object& init_upper, uint64_t seed,
                             long events, double t_max, bool strict) {
  ModelFile lo = load_text(lower), up = load_text(upper);
  Lattice lat{d, L};
  const long n = lo.kernel.type == Kernel::Type::Pairs ? lo.kernel.n_sites
                                                       : lat.sites();
  SimOptions opts;
  opts.death_dir = lo.death_dir;
  opts.strict_order = strict;
  CoupledState init{init_from(init_lower, n, lo.space.max_occupancy),
                    init_from(init_upper, n, up.space.max_occupancy)};
  return sim_to_dict(simulate_coupled(lo.spec, up.spec, lo.kernel, lat, init,
                                      stop_from(events, t_max), seed, opts));
}

py::tuple cli_py(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_ipskit, m) {
  m.doc() = "exact order certification and simulation for lattice particle systems";

  m.def("model_epidemic", &epidemic_text, py::arg("lambda_"), py::arg("beta"),
        py::arg("gamma"), py::arg("phi"), py::arg("M"), py::arg("d") = 1);
  m.def("model_two_type_contact", &two_type_text, py::arg("lambda1"),
        py::arg("lambda2"), py::arg("labeling"), py::arg("d") = 1);
  m.def("model_tuberculosis", &tuberculosis_text, py::arg("lambda_"),
        py::arg("phi"), py::arg("M"), py::arg("d") = 1);
  m.def("model_conservative", &conservative_text, py::arg("c"), py::arg("M"),
        py::arg("k_max"), py::arg("d") = 1);
  m.def("model_metapop_allee", &metapop_text, py::arg("M"), py::arg("M_A"),
        py::arg("N_mig"), py::arg("lambda_"), py::arg("phi"), py::arg("phi_A"),
        py::arg("d") = 1);

  m.def("validate_model", &validate_text, py::arg("model"));
  m.def("certify_attractive", &certify_attractive_text, py::arg("model"),
        py::arg("jobs") = 1);
  m.def("certify_order", &certify_order_text, py::arg("lower"), py::arg("upper"),
        py::arg("jobs") = 1);
  m.def("oracle_increasing_sets", &oracle_text, py::arg("lower"),
        py::arg("upper"), py::arg("p") = "1/1", py::arg("cap") = 4);
  m.def("coupling_table", &coupling_text, py::arg("lower"), py::arg("upper"),
        py::arg("quad"), py::arg("p") = "1/1");
  m.def("ergodic_report", &ergodic_text, py::arg("lambda_"), py::arg("beta"),
        py::arg("gamma"), py::arg("phi"), py::arg("M"), py::arg("d") = 1,
        py::arg("mode") = "proof_supported");

  m.def("simulate_single", &simulate_single_py, py::arg("model"), py::arg("d"),
        py::arg("L"), py::arg("init"), py::arg("seed"), py::arg("events") = 0,
        py::arg("t_max") = 0.0);
  m.def("simulate_coupled", &simulate_coupled_py, py::arg("lower"),
        py::arg("upper"), py::arg("d"), py::arg("L"), py::arg("init_lower"),
        py::arg("init_upper"), py::arg("seed"), py::arg("events") = 0,
        py::arg("t_max") = 0.0, py::arg("strict") = true);

  m.def("cli", &cli_py, py::arg("args"),
        "run a CLI subcommand in-process; returns (exit_code, stdout, stderr)");
}
