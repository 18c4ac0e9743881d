#pragma once

// JSON forms of boxes, correlator tables, membership reports and
// certificates (box.v1, correlators.v1, membership.v1, certificate.v1).
// Matrices are row-major arrays of [re, im] pairs.

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "margcert/boxes.hpp"
#include "margcert/entcert.hpp"
#include "margcert/polytopes.hpp"

namespace margcert::json_io {

using Json = nlohmann::json;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json to_json(const TripartiteBox& b);
TripartiteBox box_from_json(const Json& j);

Json to_json(const CorrelatorTable& t);
CorrelatorTable correlators_from_json(const Json& j);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const polytopes::MembershipReport& r, const std::string& mode);

Json to_json(const entcert::CertResult& c);
entcert::CertResult cert_from_json(const Json& j);

/// Marginal triple from a box.v1 or correlators.v1 document.
MarginalTriple marginals_from_document(const Json& j);

}  // namespace margcert::json_io
