#pragma once

#include "disp/bounds.hpp"
#include "disp/comparative.hpp"
#include "disp/consideration.hpp"
#include "disp/curvature.hpp"
#include "disp/margin_game.hpp"
#include "disp/oracle.hpp"
#include "disp/passthrough.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace disp {

using Json = nlohmann::ordered_json;

// consideration structures: explicit schema plus generator shorthands
Json structure_to_json(const ConsiderationStructure& cs);
ConsiderationStructure structure_from_json(const Json& j);

// "binomial:n=2,lambda=0.5", "independent:lambda=0.6,0.5,0.4",
// "spatial:n=4,k=2", or a path to a JSON file
ConsiderationStructure load_structure(const std::string& source);

// "unit", "linear:b=2.0", "exp:beta=1.5", "ces:eta=1.0", "table:path.csv"
DemandSpec parse_demand(const std::string& text);

Json profile_to_json(const EquilibriumProfile& profile);
EquilibriumProfile profile_from_json(const Json& j);

Json verification_to_json(const VerificationReport& rep);
Json deviation_to_json(const DeviationReport& rep, double tol);

Json report_to_json(const PassThroughReport& rep);
std::string report_to_csv(const PassThroughReport& rep);

Json envelope_to_json(const std::vector<EnvelopePoint>& pts);
std::string envelope_to_csv(const std::vector<EnvelopePoint>& pts);
Json critical_to_json(const CriticalElasticity& ce);

Json sim_to_json(const SimResult& res);
std::string sim_cdf_to_csv(const SimResult& res);
Json mc_to_json(const McPassthrough& mc);

Json verdict_to_json(const DominanceVerdict& v);
Json pgf_to_json(const PgfDominance& v);
Json twmean_to_json(const TwMeanComparison& v);
Json merger_to_json(const MergerDelta& d);
std::string merger_to_csv(const MergerDelta& d);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// shortest round-trip decimal form; nan/inf spelled out for CSV use
std::string num_str(double x);

} // namespace disp
