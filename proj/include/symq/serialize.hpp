#pragma once

#include "symq/circuit.hpp"
#include "symq/invariants.hpp"
#include "symq/netlist.hpp"
#include "symq/quantizer.hpp"
#include "symq/williamson.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace symq {

using Json = nlohmann::ordered_json;

// Schema identifiers written into every top-level document; bump on breaking changes.
inline constexpr std::string_view kMatrixSchema = "symq.matrix/1";
inline constexpr std::string_view kNormalFormSchema = "symq.normal_form/1";
inline constexpr std::string_view kDofSchema = "symq.dof/1";
inline constexpr std::string_view kHamiltonianSchema = "symq.hamiltonian/1";
inline constexpr std::string_view kQuantizedSchema = "symq.quantized/1";
inline constexpr std::string_view kCrossValidationSchema = "symq.cross_validation/1";
inline constexpr std::string_view kInvariantsSchema = "symq.invariants/1";
inline constexpr std::string_view kErrorSchema = "symq.error/1";

// {"rows", "cols", "entries"} with row-major entries.
Json matrix_to_json(const RealMatrix& m);
Json vector_to_json(const RealVector& v);

// Accepts the matrix object above (with or without a schema field).
// Throws InvalidArgument on a malformed document.
RealMatrix matrix_from_json(const Json& doc);

// JSON object or CSV with one row per line; '#' lines and blank lines are skipped in CSV.
RealMatrix parse_matrix(std::string_view text);

Json counts_to_json(const DofClassification& cls);
Json to_json(const NormalForm& nf);
Json to_json(const HamiltonianSystem& hs);
Json to_json(const QuantizedModel& model, const std::string& provenance_ref = "");
Json to_json(const CrossValidation& report);
Json to_json(const InvariantSet& set);
Json to_json(const Diagnostic& d);
Json error_to_json(const std::exception& e);

std::string_view to_string(QuantizationRoute route) noexcept;
std::string_view to_string(NonlinearKind kind) noexcept;

} // namespace symq
