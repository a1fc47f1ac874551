// JSON and CSV encodings of the library's result types.
#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "gexp/core.hpp"
#include "gexp/coupling.hpp"
#include "gexp/gheat.hpp"
#include "gexp/harnack.hpp"
#include "gexp/kernels.hpp"
#include "gexp/simulate.hpp"

namespace gexp::cli {

using Json = nlohmann::ordered_json;

Json to_json(const VolatilityBand& band);
Json to_json(const SchemeMeta& meta);
Json to_json(const PdeSolution& sol);
Json to_json(const PbarEstimate& est);
Json to_json(const AxiomCheck& check);
Json to_json(const HarnackCertificate& cert);
Json to_json(const CouplingReport& rep);
Json to_json(const MomentCheck& check);
Json to_json(const DominanceResult& dom);
Json to_json(const LowerBoundRow& row);
Json to_json(const SupKernelRow& row);
Json to_json(const DualBoundRow& row);
Json to_json(const Ex38Report& rep);
Json to_json(const StationarityResult& res);
Json to_json(const KernelReport& rep);

/// Shortest round-trip decimal form, as used in every CSV cell.
std::string csv_real(double v);

/// "# gexp <version> schema=<n> config=<compact json>"
void write_csv_header(std::ostream& os, const Json& config);

void write_axioms_csv(std::ostream& os, std::span<const AxiomCheck> checks);
void write_certificates_csv(std::ostream& os, std::span<const HarnackCertificate> certs);
void write_coupling_csv(std::ostream& os, std::span<const CouplingReport> reps);
void write_ex38_csv(std::ostream& os, const Ex38Report& rep);

}  // namespace gexp::cli
