#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhinf/errors.hpp"
#include "qhinf/qmodel.hpp"
#include "qhinf/realization.hpp"
#include "qhinf/synthesis.hpp"

namespace qhinf::io {

using Json = nlohmann::ordered_json;

/// Malformed or schema-violating input; `where` names the JSON path or byte offset.
class InputError : public Error {
 public:
  InputError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

Json matrix_to_json(const Matrix& m);
/// Complex entries become [re, im] pairs.
Json matrix_to_json(const CMatrix& m);
Matrix real_matrix_from_json(const Json& j, const std::string& path);
CMatrix complex_matrix_from_json(const Json& j, const std::string& path);

/// Model file: "plant" {A, B0, B1, B2, C1, D12, C2, D20, D21}, "theta" ("canonical" or a
/// matrix), "uncertainty" {E}, and optionally "slh" {R, Lambda, n_y}.
struct ModelFile {
  std::optional<OpenPlant> plant;
  std::optional<SLHModel> slh;
  CommutationStructure theta;
};

ModelFile parse_model(const Json& j);
Json model_to_json(const ModelFile& model);

/// Controller file: A_K, B_K1, B_K, C_K, B_K0, theta_K ("canonical") and a dims record.
Json controller_to_json(const CoherentController& k);
CoherentController parse_controller(const Json& j);

/// Input of the realization command: A_K, B_K, C_K, optional theta_K and dims.
struct ControllerTripleFile {
  Matrix A_K, B_K, C_K;
  CommutationStructure theta_K;
};
ControllerTripleFile parse_controller_triple(const Json& j);

Json care_solution_to_json(const CareSolution& s);
Json assumptions_to_json(const AssumptionReport& a);
Json trace_to_json(const std::vector<EpsEvaluation>& trace);
Json report_to_json(const SynthesisReport& r);

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  Json config = Json::object();
  std::string tool_version;
  std::uint64_t seed = 0;
  /// Reported on the console only; embedding it would break byte-identical outputs.
  double wall_clock_seconds = 0.0;
};

Json manifest_to_json(const RunManifest& m);

/// Serializes with two-space indentation, scalar arrays on one line and floating-point values
/// printed with 17 significant digits (non-finite values become null).
std::string dump(const Json& j);

Json parse_text(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qhinf::io
