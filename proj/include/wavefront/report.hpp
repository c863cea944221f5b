#pragma once

#include <string>

#include "json.hpp"
#include "wavefront/config.hpp"

namespace wf {

/// {"version", "config_hash", "seed"}; embedded in every JSON artifact.
nlohmann::json provenance(const RunConfig& cfg);
/// One-line form of provenance() for CSV/matrix header comments.
std::string provenance_line(const RunConfig& cfg);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const GroupElement& h);
nlohmann::json to_json(const DirectionPatch& p);
nlohmann::json to_json(const FrequencyWindow& w);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const MicrolocalFit& f);
nlohmann::json to_json(const EnvelopeCheck& c);
nlohmann::json to_json(const NormPowerIntegral& n);
nlohmann::json to_json(const ConeApproxVerdict& v);
nlohmann::json to_json(const GeometricEquivalenceReport& r);
nlohmann::json to_json(const DecayReport& r);
/// Counts per verdict plus warnings; the per-cell data goes to CSV.
nlohmann::json scan_summary(const ScanResult& s);

/// Writes `j` (2-space indent, trailing newline).
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace wf
