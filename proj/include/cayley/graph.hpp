#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "cayley/errors.hpp"

namespace cayley {

// A vertex is identified by its canonical byte-string. Canonicalization is
// injective: equal vertices have equal strings.
using VertexKey = std::string;

// A bundle of parallel oriented edges x -> y. `weight` is the symmetric edge
// weight of a single edge of the bundle; the bundle contributes
// weight * multiplicity to weighted degrees and operator rows.
struct EdgeBundle {
    VertexKey terminus;
    double weight = 1.0;
    std::int32_t multiplicity = 1;
};

// Lazy local description of an infinite weighted graph. Implementations must
// be pure: repeated queries return identical lists in identical order, and
// every vertex satisfies (1/m_V(x)) * sum_e weight*mult <= degree_bound().
class GraphOracle {
public:
    virtual ~GraphOracle() = default;
    virtual std::vector<EdgeBundle> out_edges(const VertexKey& x) const = 0;
    virtual double vertex_weight(const VertexKey& x) const = 0;
    virtual double degree_bound() const = 0;
    // One-line description used in serialized artifacts.
    virtual std::string descriptor() const = 0;
};

// A finite, immutable window onto an infinite graph: the union of closed
// balls around the seeds ("core") plus the exterior 1-neighborhood of the
// core (the "frontier ring"). Vertices are indexed in breadth-first order
// from the seeds, ties broken by canonical byte-string order; consequently
// indices [0, core_size) are the core and [core_size, size) the ring.
//
// Adjacency stores every oracle edge whose endpoints both lie in the patch
// (for ring vertices as well), so boundary and operator-row computations at
// core vertices never re-query the oracle. `weighted_degree` is the full
// oracle value sum_{E_x} weight*mult, including edges that leave the patch.
class Patch {
public:
    struct Arc {
        std::int32_t to;
        double weight;
        std::int32_t multiplicity;
    };

    std::vector<VertexKey> keys;
    std::vector<std::vector<Arc>> adjacency;
    std::vector<double> vertex_weights;     // m_V
    std::vector<double> weighted_degrees;   // sum over all out-edges of weight*mult
    std::vector<std::uint8_t> frontier;     // 1 iff some out-edge leaves the patch
    std::vector<std::int32_t> seed_distance;
    std::int32_t core_size = 0;
    std::int32_t radius = 0;
    std::string oracle_descriptor;

    std::int32_t size() const { return static_cast<std::int32_t>(keys.size()); }

    // Index of a key, or -1 when absent.
    std::int32_t find(const VertexKey& key) const;
    std::int32_t require(const VertexKey& key) const;

    // Distinct in-patch neighbors of v (geometric adjacency, loops excluded).
    std::vector<std::int32_t> neighbors(std::int32_t v) const;

    const std::unordered_map<VertexKey, std::int32_t>& index() const { return index_; }

    friend Patch build_patch(const GraphOracle&, const std::vector<VertexKey>&,
                             std::int32_t, std::int64_t);

private:
    std::unordered_map<VertexKey, std::int32_t> index_;
};

// A subset of patch vertices, stored as sorted unique indices.
struct Region {
    std::vector<std::int32_t> members;

    static Region of(std::vector<std::int32_t> indices);
    static Region of_keys(const Patch& patch, const std::vector<VertexKey>& keys);
    bool contains(std::int32_t v) const;
    std::int64_t size() const { return static_cast<std::int64_t>(members.size()); }
    bool empty() const { return members.empty(); }
};

// Orbit structure of a vertex partition with finitely many classes. The
// associated family of sets is the family of all transversals (one vertex
// per orbit); fundamental domains of a group action are exactly these.
struct TransversalFamily {
    std::function<std::int32_t(const VertexKey&)> orbit_of; // negative = unknown
    std::int32_t orbit_count = 1;

    static TransversalFamily simply_transitive();
};

inline constexpr std::int64_t kDefaultVertexCap = 200000;

// Breadth-first materialization of union of B(seed, radius) plus the
// frontier ring. Audits the Sunada-Sy degree bound and in-patch weight
// symmetry while filling.
Patch build_patch(const GraphOracle& oracle, const std::vector<VertexKey>& seeds,
                  std::int32_t radius, std::int64_t vertex_cap = kDefaultVertexCap);

// Throws WindowError unless every region vertex has its full 1-ball inside
// the patch (frontier vertices may hide exterior structure).
void require_complete_window(const Patch& patch, const Region& region,
                             const char* operation);

// Membership mask of a region, for O(1) lookups.
std::vector<std::uint8_t> region_mask(const Patch& patch, const Region& region);

} // namespace cayley
