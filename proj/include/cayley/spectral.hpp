#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cayley/exhaustion.hpp"
#include "cayley/geometry.hpp"
#include "cayley/operators.hpp"

namespace cayley {

struct EigenReport {
    Eigen::VectorXd eigenvalues;  // ascending; one per region vertex
    Eigen::MatrixXd eigenvectors; // weighted-orthonormal, empty unless requested
    std::vector<std::pair<double, std::int64_t>> clusters; // (value, multiplicity)
    double residual_bound = 0.0; // max ||Av - lambda v|| / ||A|| over returned pairs
    std::int64_t region_size = 0;
};

// Symmetrizes by the square-root vertex weights and solves the dense real
// symmetric eigenproblem; tridiagonal interiors take the O(n^2) QL path when
// no vectors are requested. Dense solves are used at every size (the full
// spectrum is needed; a partial iterative solver could not deliver the
// eigenvalue-count invariant), with a hard cap guarding memory.
EigenReport eigensolve(const CompressedOperator& op, bool want_vectors = false,
                       double cluster_tol = 1e-8, std::int64_t dense_cap = 8000);

struct IDSCurve {
    std::vector<double> grid;   // ascending lambda samples
    std::vector<double> values; // N(lambda) normalized to [0,1] (tau_1 scale)
    std::int64_t region_size = 0;
    std::int64_t domain_size = 1; // |D|; tau scale = value * |D|
    std::string provenance;
};

// Empirical integrated density of states of a compression over a Folner set:
// N(lambda) = #{eigenvalues <= lambda} / region_size. The per-domain (tau)
// normalization is value * domain_size; both scales appear in serialized
// curves.
IDSCurve empirical_ids(const EigenReport& report, const std::vector<double>& grid,
                       std::int64_t domain_size = 1, std::string provenance = {});

// Closed-form integrated density of states of the combinatorial Laplacian on
// the two-sided line: 0 for lambda <= 0, arccos(1-lambda)/pi on [0,2], 1 above.
double exact_ids_line(double lambda);

struct JumpCandidate {
    double lambda = 0.0;
    std::vector<double> masses; // one per curve, in curve order
    bool stable = false;        // masses do not drift down by 50% or more
};

struct JumpReport {
    std::vector<JumpCandidate> candidates;
    double window = 0.0;
    double threshold = 0.0;
};

// Flags every grid point whose two-sided eigenvalue mass
// N(l+eps) - N(l-eps) stays above the threshold in all curves; adjacent
// flagged points merge into one candidate. Jumps of the limiting IDS survive
// as stable candidates; continuous spectrum washes out as the regions grow.
JumpReport detect_jumps(const std::vector<IDSCurve>& curves, double window, double threshold);

// Von Neumann trace of p(H) over a transversal D: (1/|D|) sum_x <p(H) d_x, d_x>,
// evaluated by finite-propagation local moments; exact up to round-off.
double vn_trace_poly(const GraphOracle& oracle, const WeightScheme& scheme, const Potential& q,
                     const std::vector<VertexKey>& transversal,
                     const std::vector<double>& coefficients,
                     std::int64_t vertex_cap = kDefaultVertexCap);

struct BoundReport {
    bool applicable = false; // uniqueness holds at lambda on the region
    bool pass = false;       // empirical mass <= bound + tol (when applicable)
    double lambda = 0.0;
    std::int64_t boundary2 = 0;          // |boundary_2 of Omega|
    std::int64_t packing = 0;            // P(Omega, F)
    double bound_tau = 0.0;              // |boundary_2| / P, tau scale
    double empirical_mass_tau = 0.0;     // |D| * mass / big region size
    double empirical_mass_tau1 = 0.0;    // mass / big region size
    double tol = 0.0;
    UniquenessVerdict verdict;
};

// Checks the trace bound tau(E_{lambda}) <= |boundary_2 Omega| / P(Omega, F)
// against the empirical eigenvalue mass found on a larger window. Reports
// not-applicable when lambda-uniqueness fails on the region; throws DataError
// when the region contains no transversal (P = 0; the bound is undefined).
BoundReport vn_bound_check(const Patch& patch, const Region& region,
                           const TransversalFamily& family, const WeightScheme& scheme,
                           const Potential& q, const EigenfunctionSearch& window_hits,
                           std::int64_t window_region_size, std::int64_t domain_size,
                           double lambda, double lambda_window, double tol);

} // namespace cayley
