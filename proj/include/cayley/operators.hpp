#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cayley/graph.hpp"
#include "cayley/weights.hpp"

namespace cayley {

// One row of the Schrodinger operator H = Delta + q at a vertex:
//   H phi(x) = ((1/m_V) sum m_E mult + q(x)) phi(x) - (1/m_V) sum m_E mult phi(t(e)).
// Entries are keyed by vertex; loops cancel between the two sums.
struct SparseRow {
    VertexKey origin;
    double diagonal = 0.0;
    std::vector<std::pair<VertexKey, double>> off_diagonal; // oracle order, merged per terminus
};

SparseRow operator_row(const GraphOracle& oracle, const WeightScheme& scheme,
                       const Potential& q, const VertexKey& x);

// The H - lambda = p_lambda - L decomposition:
// L phi(x) = (1/m_V) sum m_E mult phi(t(e)) and
// p_lambda(x) = q(x) - lambda + (1/m_V) sum m_E mult.
struct LpRow {
    VertexKey origin;
    std::vector<std::pair<VertexKey, double>> l_row;
    double p_lambda = 0.0;
};

LpRow lp_transform(const GraphOracle& oracle, const WeightScheme& scheme, const Potential& q,
                   double lambda, const VertexKey& x);

// <H^k delta_x, delta_x> computed by k sparse row applications confined to
// B(x, k); exact up to round-off (finite propagation speed).
double local_moment(const GraphOracle& oracle, const WeightScheme& scheme, const Potential& q,
                    const VertexKey& x, std::int32_t k,
                    std::int64_t vertex_cap = kDefaultVertexCap);

// The compression of H to a finite region Omega:
//   interior(i,j)  = H[Omega_i, Omega_j],
//   coupling(r, j) = H[ext_r, Omega_j] for the exterior neighbors ext_r of
//                    Omega (off-diagonal entries only; all other entries of
//                    those rows multiply zeros of a function supported in
//                    Omega).
// For a function phi supported in Omega, the full eigen-equation
// H phi = lambda phi is equivalent to (interior - lambda I) phi = 0 together
// with coupling * phi = 0; rows farther than one step from Omega vanish
// identically on phi.
struct CompressedOperator {
    std::vector<std::int32_t> region;          // patch indices, ascending
    std::vector<VertexKey> region_keys;
    std::vector<std::int32_t> exterior;        // patch indices of N_ext(Omega)
    std::vector<VertexKey> exterior_keys;
    Eigen::MatrixXd interior;                  // |Omega| x |Omega|
    Eigen::MatrixXd coupling;                  // |N_ext| x |Omega|
    Eigen::VectorXd vertex_weights;            // m_V on Omega
    bool lambda_independent = true;

    std::int64_t size() const { return interior.rows(); }
};

CompressedOperator compress(const Patch& patch, const WeightScheme& scheme, const Potential& q,
                            const Region& region);

// Max over entries of |m_V(x) H[x,y] - m_V(y) H[y,x]| on the interior matrix.
double weighted_symmetry_defect(const CompressedOperator& op);

} // namespace cayley
