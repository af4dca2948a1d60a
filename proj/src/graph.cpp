#include "cayley/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace cayley {

std::int32_t Patch::find(const VertexKey& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

std::int32_t Patch::require(const VertexKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) throw WindowError("vertex '" + key + "' is not in the patch");
    return it->second;
}

std::vector<std::int32_t> Patch::neighbors(std::int32_t v) const {
    std::vector<std::int32_t> out;
    out.reserve(adjacency[v].size());
    for (const Arc& a : adjacency[v])
        if (a.to != v) out.push_back(a.to);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Region Region::of(std::vector<std::int32_t> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    Region r;
    r.members = std::move(indices);
    return r;
}

Region Region::of_keys(const Patch& patch, const std::vector<VertexKey>& keys) {
    std::vector<std::int32_t> idx;
    idx.reserve(keys.size());
    for (const VertexKey& k : keys) idx.push_back(patch.require(k));
    return of(std::move(idx));
}

bool Region::contains(std::int32_t v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

TransversalFamily TransversalFamily::simply_transitive() {
    TransversalFamily f;
    f.orbit_of = [](const VertexKey&) { return 0; };
    f.orbit_count = 1;
    return f;
}

namespace {

void audit_vertex(const GraphOracle& oracle, const VertexKey& key, double m_v,
                  double weighted_degree) {
    if (!(m_v > 0.0)) throw ConsistencyError("vertex weight must be positive at '" + key + "'");
    const double bound = oracle.degree_bound();
    if (weighted_degree / m_v > bound * (1.0 + 1e-12) + 1e-12)
        throw ConsistencyError("degree bound violated at '" + key + "': " +
                               std::to_string(weighted_degree / m_v) + " > " +
                               std::to_string(bound));
}

} // namespace

Patch build_patch(const GraphOracle& oracle, const std::vector<VertexKey>& seeds,
                  std::int32_t radius, std::int64_t vertex_cap) {
    if (seeds.empty()) throw DataError("build_patch: seeds must be non-empty");
    if (radius < 0) throw DataError("build_patch: radius must be non-negative");

    Patch patch;
    patch.radius = radius;
    patch.oracle_descriptor = oracle.descriptor();

    auto add_vertex = [&](const VertexKey& key, std::int32_t dist) {
        if (static_cast<std::int64_t>(patch.keys.size()) >= vertex_cap)
            throw ResourceError("build_patch: vertex cap of " + std::to_string(vertex_cap) +
                                " exceeded");
        patch.index_.emplace(key, patch.size());
        patch.keys.push_back(key);
        patch.seed_distance.push_back(dist);
    };

    std::vector<VertexKey> level(seeds);
    std::sort(level.begin(), level.end());
    level.erase(std::unique(level.begin(), level.end()), level.end());
    for (const VertexKey& s : level) add_vertex(s, 0);

    // Core levels 1..radius, then one more level as the frontier ring.
    std::vector<std::vector<EdgeBundle>> edges(patch.keys.size());
    std::int32_t first_unexpanded = 0;
    for (std::int32_t dist = 0; dist <= radius; ++dist) {
        const std::int32_t level_end = patch.size();
        std::vector<VertexKey> next;
        for (std::int32_t v = first_unexpanded; v < level_end; ++v) {
            edges.resize(patch.keys.size());
            edges[v] = oracle.out_edges(patch.keys[v]);
            for (const EdgeBundle& e : edges[v])
                if (patch.index_.find(e.terminus) == patch.index_.end())
                    next.push_back(e.terminus);
        }
        first_unexpanded = level_end;
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (const VertexKey& k : next)
            if (patch.index_.find(k) == patch.index_.end()) add_vertex(k, dist + 1);
    }
    patch.core_size = first_unexpanded;

    // Ring vertices are queried too so their weights and in-patch arcs are known.
    edges.resize(patch.keys.size());
    for (std::int32_t v = patch.core_size; v < patch.size(); ++v)
        edges[v] = oracle.out_edges(patch.keys[v]);

    const std::int32_t n = patch.size();
    patch.adjacency.resize(n);
    patch.vertex_weights.resize(n);
    patch.weighted_degrees.resize(n);
    patch.frontier.assign(n, 0);

    for (std::int32_t v = 0; v < n; ++v) {
        patch.vertex_weights[v] = oracle.vertex_weight(patch.keys[v]);
        double wdeg = 0.0;
        for (const EdgeBundle& e : edges[v]) {
            if (!(e.weight > 0.0) || e.multiplicity < 1)
                throw ConsistencyError("invalid edge bundle at '" + patch.keys[v] + "'");
            wdeg += e.weight * e.multiplicity;
            const std::int32_t to = patch.find(e.terminus);
            if (to < 0)
                patch.frontier[v] = 1;
            else
                patch.adjacency[v].push_back({to, e.weight, e.multiplicity});
        }
        patch.weighted_degrees[v] = wdeg;
        audit_vertex(oracle, patch.keys[v], patch.vertex_weights[v], wdeg);
    }

    // In-patch weight symmetry: aggregate bundle weight and multiplicity of
    // x -> y must match y -> x.
    std::map<std::pair<std::int32_t, std::int32_t>, std::pair<double, std::int64_t>> agg;
    for (std::int32_t v = 0; v < n; ++v)
        for (const Patch::Arc& a : patch.adjacency[v]) {
            auto& slot = agg[{v, a.to}];
            slot.first += a.weight * a.multiplicity;
            slot.second += a.multiplicity;
        }
    for (const auto& [arc, val] : agg) {
        auto rev = agg.find({arc.second, arc.first});
        const bool ok = rev != agg.end() && rev->second.second == val.second &&
                        std::abs(rev->second.first - val.first) <=
                            1e-12 * (std::abs(val.first) + 1.0);
        if (!ok)
            throw ConsistencyError("edge weights not symmetric between '" +
                                   patch.keys[arc.first] + "' and '" + patch.keys[arc.second] +
                                   "'");
    }
    return patch;
}

void require_complete_window(const Patch& patch, const Region& region, const char* operation) {
    for (std::int32_t v : region.members) {
        if (v < 0 || v >= patch.size())
            throw DataError(std::string(operation) + ": region index out of range");
        if (patch.frontier[v])
            throw WindowError(std::string(operation) + ": region vertex '" + patch.keys[v] +
                              "' touches the patch frontier; exterior neighbors may be hidden");
    }
}

std::vector<std::uint8_t> region_mask(const Patch& patch, const Region& region) {
    std::vector<std::uint8_t> mask(patch.size(), 0);
    for (std::int32_t v : region.members) mask[v] = 1;
    return mask;
}

} // namespace cayley
