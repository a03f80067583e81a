#ifndef IPS_MODEL_IO_HPP
#define IPS_MODEL_IO_HPP

#include <map>
#include <string>

#include "ips/rates.hpp"

namespace ips {

struct ModelParseError : std::runtime_error {
  explicit ModelParseError(const std::string& what) : std::runtime_error(what) {}
};

// One particle system as stored on disk: state space, kernel, death-kernel
// direction, sparse rate entries, plus free-form named parameters (used by
// the built-in constructors and the ergodicity front end).
struct ModelFile {
  int schema_version = 1;
  StateSpace space;
  RateSpec spec;
  Kernel kernel;
  DeathKernelDirection death_dir = DeathKernelDirection::Reverse;
  std::map<std::string, std::string> params;  // optional [params] table

  static ModelFile wrap(const RateSpec& spec, const Kernel& kernel,
                        DeathKernelDirection dir = DeathKernelDirection::Reverse);
};

// Parses the key-value model format. Unspecified rates default to zero.
ModelFile parse_model(const std::string& text);
ModelFile load_model(const std::string& path);

// Canonical text form: fixed key order, sorted rate entries, "num/den"
// rationals. export -> parse -> export is byte-identical.
std::string export_model(const ModelFile& model);

}  // namespace ips

#endif
