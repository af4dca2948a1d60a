#pragma once

#include <string>

#include "cayley/exhaustion.hpp"
#include "cayley/graph.hpp"
#include "cayley/spectral.hpp"

namespace cayley {

// Round-trip exact decimal rendering (17 significant digits).
std::string format_double(double value);

// SHA-256 hex digest, used for artifact manifests.
std::string sha256_hex(const std::string& bytes);

// Patch exchange format: version, oracle descriptor, vertex list, adjacency
// quadruples (i, j, weight, multiplicity), vertex weights, frontier flags.
std::string serialize_patch(const Patch& patch);

// Region keys and weights plus the interior and coupling blocks, row-major.
std::string serialize_compressed(const CompressedOperator& op);

std::string serialize_certificate(const ExhaustionCertificate& cert);
ExhaustionCertificate parse_certificate(const std::string& text);

std::string serialize_curve(const IDSCurve& curve);
std::string serialize_verdict(const UniquenessVerdict& verdict, double lambda);
std::string serialize_eigen_report(const EigenReport& report);
std::string serialize_search(const EigenfunctionSearch& search,
                             const CompressedOperator& op);
std::string serialize_jump_report(const JumpReport& report);
std::string serialize_bound_report(const BoundReport& report);

} // namespace cayley
