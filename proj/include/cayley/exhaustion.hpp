#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cayley/graph.hpp"
#include "cayley/operators.hpp"

namespace cayley {

// Witness list for a one-by-one exhaustion of a region Omega, in complement
// form: with R_0 = Omega and R_{n+1} = R_n minus {removed_n}, each step
// requires witness_n outside R_n whose 1-ball meets R_n exactly in
// {removed_n}; at the end every vertex of Omega was removed exactly once.
struct ExhaustionCertificate {
    struct Step {
        VertexKey witness;
        VertexKey removed;
    };
    std::vector<Step> steps;
};

struct ExhaustionViolation {
    std::int64_t step; // first failing step, or steps.size() for a short certificate
    std::string reason;
};

// Deterministic replay of a certificate; nullopt means the certificate is valid.
std::optional<ExhaustionViolation> verify_exhaustion(const Patch& patch, const Region& region,
                                                     const ExhaustionCertificate& cert);

enum class SearchStrategy { greedy, backtracking };

struct SearchConfig {
    SearchStrategy strategy = SearchStrategy::backtracking;
    std::int64_t node_limit = 1000000;
};

struct SearchOutcome {
    enum class Status { found, none, unknown };
    Status status = Status::unknown;
    ExhaustionCertificate certificate; // when found
    std::string note;                  // which strategy succeeded / why unknown
    std::int64_t nodes_visited = 0;
};

// Greedy removal with canonical tie-breaks; with the backtracking strategy a
// greedy stall falls back to an exhaustive search over removal orders with
// memoized failed remainder sets, so `none` is only reported after the whole
// tree was explored. Greedy stalls alone report `unknown`.
SearchOutcome search_exhaustion(const Patch& patch, const Region& region,
                                const SearchConfig& config = {});

// Builds a certificate from a verified height function by repeatedly removing
// a minimal-height vertex, witnessed by one of its descending neighbors.
// A height-axiom violation discovered on the way throws DataError naming the
// offending vertex.
ExhaustionCertificate exhaustion_from_height(const Patch& patch,
                                             const std::vector<std::int64_t>& heights,
                                             const Region& region);

// ---------------------------------------------------------------------------
// lambda-uniqueness on finite regions by exact linear algebra

struct UniquenessVerdict {
    enum class Status { unique, witness, numerically_marginal };
    Status status = Status::unique;
    double min_singular_value = 0.0;
    double scale = 0.0; // largest singular value of the stacked system
    double tolerance = 0.0;
    Eigen::MatrixXd kernel_basis; // |Omega| x k, when status == witness
};

// Decides whether some nonzero function supported in Omega satisfies
// H phi = lambda phi, via the smallest singular value of the stacked system
// [interior - lambda I; coupling]. Witness when sigma_min <= tol * scale,
// unique when sigma_min > 10 * tol * scale, numerically_marginal between.
UniquenessVerdict decide_uniqueness(const CompressedOperator& op, double lambda,
                                    double tol = 1e-9);

struct EigenfunctionHit {
    double lambda = 0.0;
    std::int64_t multiplicity = 0;
    Eigen::MatrixXd basis;           // |Omega| x multiplicity, zero-extension eigenfunctions
    double coupling_residual = 0.0;  // smallest singular value of coupling * cluster basis
};

struct EigenfunctionSearch {
    std::vector<EigenfunctionHit> hits;
    double min_residual_seen = 0.0; // over all clusters, for diagnostics
    double cluster_tol = 0.0;
    double residual_tol = 0.0;
    double scale = 0.0;
};

// Finds every lambda at which lambda-uniqueness on Omega fails: diagonalizes
// the interior matrix in the m_V-weighted inner product, clusters eigenvalues,
// and intersects each eigenspace with the kernel of the coupling matrix.
// Tolerances default to cluster_tol = 1e-8 and residual_tol = 1e-9, both
// relative to the spectral scale of the interior matrix.
EigenfunctionSearch find_supported_eigenfunctions(const CompressedOperator& op,
                                                  double cluster_tol = 1e-8,
                                                  double residual_tol = 1e-9);

} // namespace cayley
