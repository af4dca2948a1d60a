#include "cayley/geometry.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <string>

namespace cayley {

Region thick_boundary(const Patch& patch, const Region& region, std::int32_t r) {
    if (r < 1) throw DataError("thick_boundary: r must be >= 1");
    if (region.empty()) return Region{};
    require_complete_window(patch, region, "thick_boundary");

    const auto mask = region_mask(patch, region);
    // depth[v] = d(v, complement) for region vertices, seeded from exterior
    // neighbors at depth 0 and propagated through the region only.
    std::vector<std::int32_t> depth(patch.size(), -1);
    std::deque<std::int32_t> queue;
    for (std::int32_t v : region.members)
        for (std::int32_t u : patch.neighbors(v))
            if (!mask[u] && depth[u] < 0) {
                depth[u] = 0;
                queue.push_back(u);
            }
    while (!queue.empty()) {
        const std::int32_t v = queue.front();
        queue.pop_front();
        for (std::int32_t u : patch.neighbors(v))
            if (mask[u] && depth[u] < 0) {
                depth[u] = depth[v] + 1;
                queue.push_back(u);
            }
    }

    std::vector<std::int32_t> out;
    for (std::int32_t v : region.members)
        if (depth[v] >= 0 && depth[v] <= r) out.push_back(v);
    return Region::of(std::move(out));
}

Region r_interior(const Patch& patch, const Region& region, std::int32_t r) {
    const Region boundary = thick_boundary(patch, region, r);
    const auto bmask = region_mask(patch, boundary);
    std::vector<std::int32_t> out;
    for (std::int32_t v : region.members)
        if (!bmask[v]) out.push_back(v);
    return Region::of(std::move(out));
}

std::vector<std::int32_t> patch_distances(const Patch& patch,
                                          const std::vector<std::int32_t>& sources) {
    std::vector<std::int32_t> dist(patch.size(), -1);
    std::deque<std::int32_t> queue;
    for (std::int32_t s : sources)
        if (dist[s] < 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        const std::int32_t v = queue.front();
        queue.pop_front();
        for (std::int32_t u : patch.neighbors(v))
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    return dist;
}

Region maximal_net(const Patch& patch, const Region& region, std::int32_t r) {
    if (r < 0) throw DataError("maximal_net: r must be >= 0");
    if (r == 0) return region;

    // blocked[v] = within distance r of an already selected net vertex.
    std::vector<std::uint8_t> blocked(patch.size(), 0);
    std::vector<std::int32_t> net;
    for (std::int32_t v : region.members) {
        if (blocked[v]) continue;
        net.push_back(v);
        const auto dist = patch_distances(patch, {v});
        for (std::int32_t u = 0; u < patch.size(); ++u)
            if (dist[u] >= 0 && dist[u] <= r) blocked[u] = 1;
    }
    return Region::of(std::move(net));
}

std::int64_t packing_number(const Patch& patch, const Region& region,
                            const TransversalFamily& family) {
    if (family.orbit_count < 1) throw DataError("packing_number: orbit count must be >= 1");
    std::vector<std::int64_t> counts(family.orbit_count, 0);
    for (std::int32_t v : region.members) {
        const std::int32_t orbit = family.orbit_of(patch.keys[v]);
        if (orbit < 0 || orbit >= family.orbit_count)
            throw DataError("packing_number: unknown orbit label for vertex '" +
                            patch.keys[v] + "'");
        ++counts[orbit];
    }
    return *std::min_element(counts.begin(), counts.end());
}

std::int64_t growth_volume(const GraphOracle& oracle,
                           const std::vector<VertexKey>& orbit_reps, std::int32_t r,
                           std::int64_t vertex_cap) {
    if (orbit_reps.empty()) throw DataError("growth_volume: need at least one representative");
    if (r < 0) throw DataError("growth_volume: r must be >= 0");
    std::int64_t best = 0;
    for (const VertexKey& rep : orbit_reps) {
        // Ball size only; the ring materialized by build_patch is excluded.
        std::set<VertexKey> ball{rep};
        std::vector<VertexKey> level{rep};
        for (std::int32_t d = 0; d < r; ++d) {
            std::vector<VertexKey> next;
            for (const VertexKey& v : level)
                for (const EdgeBundle& e : oracle.out_edges(v))
                    if (ball.insert(e.terminus).second) next.push_back(e.terminus);
            if (static_cast<std::int64_t>(ball.size()) > vertex_cap)
                throw ResourceError("growth_volume: ball exceeds vertex cap of " +
                                    std::to_string(vertex_cap));
            level = std::move(next);
        }
        best = std::max(best, static_cast<std::int64_t>(ball.size()));
    }
    return best;
}

bool verified_inclusive_radius(const Patch& patch, const TransversalFamily& family,
                               std::int32_t r) {
    std::int64_t checked = 0;
    for (std::int32_t v = 0; v < patch.size(); ++v) {
        if (patch.frontier[v]) continue;
        // Only vertices whose r-ball is fully visible can certify the bound.
        if (patch.seed_distance[v] + r > patch.radius + 1) continue;
        ++checked;
        const auto dist = patch_distances(patch, {v});
        std::vector<std::uint8_t> seen(family.orbit_count, 0);
        for (std::int32_t u = 0; u < patch.size(); ++u)
            if (dist[u] >= 0 && dist[u] <= r) {
                const std::int32_t orbit = family.orbit_of(patch.keys[u]);
                if (orbit >= 0 && orbit < family.orbit_count) seen[orbit] = 1;
            }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;
    }
    return checked > 0;
}

} // namespace cayley
