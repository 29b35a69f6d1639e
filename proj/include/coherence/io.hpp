#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "coherence/channels.hpp"
#include "coherence/harness.hpp"
#include "coherence/measures.hpp"
#include "coherence/qstate.hpp"

namespace coherence::io {

using Json = nlohmann::json;

/// Malformed document; `what()` names the offending entry, e.g. "rho[1][0]".
class ParseError : public InvariantError {
public:
  using InvariantError::InvariantError;
};

/// Nearest double to the 15-significant-digit decimal form of x.
double round15(double x);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where);
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& where);

Json to_json(const PureState& psi);
Json to_json(const DensityMatrix& rho);
Json to_json(const KrausSet& kraus);
Json to_json(const ChannelClassification& c);
Json to_json(const RoofResult& r);
Json to_json(const CampaignSummary& s, const CampaignConfig& cfg);

PureState pure_state_from_json(const Json& j);
DensityMatrix density_from_json(const Json& j);
/// Completeness failures surface as IncompleteKrausError with the residual.
KrausSet kraus_from_json(const Json& j);
/// Ensemble of a serialized RoofResult; checks probabilities and states.
Ensemble roof_ensemble_from_json(const Json& j);

using AnyState = std::variant<PureState, DensityMatrix>;

/// {"amplitudes": ...} parses as a pure state, {"rho": ...} as a density matrix.
AnyState state_from_json(const Json& j);
DensityMatrix as_density(const AnyState& s);

Json parse_text(const std::string& text, const std::string& source);
Json read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string dump(const Json& j);

} // namespace coherence::io
