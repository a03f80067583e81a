#ifndef IPS_JSONIO_HPP
#define IPS_JSONIO_HPP

#include <json.hpp>

#include "ips/coupling.hpp"
#include "ips/ergodicity.hpp"
#include "ips/order.hpp"
#include "ips/rates.hpp"
#include "ips/simulate.hpp"

namespace ips {

// Insertion-ordered JSON so documents are stable for golden files.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json certificate_json(const Certificate& cert);
Json validation_json(const ValidationReport& report);
Json coupling_table_json(const CouplingTable& table);
Json oracle_json(const OracleResult& result);
Json ergodic_json(const EpidemicParams& params, ErgodicityMode mode);
Json sim_json(const SimResult& result);
Json equivalence_json(const EquivalenceReport& report);

std::string sim_trace_csv(const SimResult& result);

}  // namespace ips

#endif
