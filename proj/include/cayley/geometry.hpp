#pragma once

#include <cstdint>
#include <vector>

#include "cayley/graph.hpp"

namespace cayley {

// The r-boundary of a region: vertices of the region at distance <= r from
// the complement. A geodesic from a region vertex to the complement stays in
// the region until its last step, so the distance-to-complement is computed
// by a multi-source BFS that starts at the exterior neighbors of the region
// and propagates only through region vertices. Requires a complete window.
Region thick_boundary(const Patch& patch, const Region& region, std::int32_t r);

// The r-interior: region minus its r-boundary.
Region r_interior(const Patch& patch, const Region& region, std::int32_t r);

// Greedy maximal r-net of the region in canonical index order. Distances are
// mesured in the full-patch path metric. The result is an r-net (pairwise
// distances > r) that is maximal: every region vertex lies within r of it.
Region maximal_net(const Patch& patch, const Region& region, std::int32_t r);

// Packing number of the region relative to the family of all transversals of
// the orbit partition: since transversals are unconstrained systems of
// representatives, the maximal number of disjoint transversals inside the
// region is exactly min over orbits of |region intersect orbit|.
std::int64_t packing_number(const Patch& patch, const Region& region,
                            const TransversalFamily& family);

// Uniform growth Vol(r) = max over orbit representatives of |B(rep, r)|,
// valid when the orbit partition comes from an isometric action.
std::int64_t growth_volume(const GraphOracle& oracle,
                           const std::vector<VertexKey>& orbit_reps, std::int32_t r,
                           std::int64_t vertex_cap = kDefaultVertexCap);

// Distances from a set of source indices through the whole patch
// (unreachable = -1).
std::vector<std::int32_t> patch_distances(const Patch& patch,
                                          const std::vector<std::int32_t>& sources);

// Checks that r is an inclusive-radius bound for the family on this window:
// every non-frontier patch vertex sees every orbit inside its r-ball.
bool verified_inclusive_radius(const Patch& patch, const TransversalFamily& family,
                               std::int32_t r);

} // namespace cayley
