#include "cayley/operators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace cayley {

namespace {

void validate_scheme(const GraphOracle& oracle, const WeightScheme& scheme, const VertexKey& x,
                     const std::vector<EdgeBundle>& edges) {
    if (scheme.kind != WeightScheme::Kind::markov) return;
    // A Markov avatar requires the edge probabilities m_E/m_V to sum to one.
    double total = 0.0;
    const double m_v = oracle.vertex_weight(x);
    for (const EdgeBundle& e : edges) total += e.weight * e.multiplicity;
    if (std::abs(total / m_v - 1.0) > 1e-9)
        throw ConsistencyError("markov scheme inconsistent with oracle at '" + x +
                               "': probabilities sum to " + std::to_string(total / m_v));
}

std::vector<std::pair<VertexKey, double>> merged_neighbor_weights(
    const std::vector<EdgeBundle>& edges) {
    std::vector<std::pair<VertexKey, double>> out;
    for (const EdgeBundle& e : edges) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const auto& p) { return p.first == e.terminus; });
        if (it == out.end())
            out.emplace_back(e.terminus, e.weight * e.multiplicity);
        else
            it->second += e.weight * e.multiplicity;
    }
    return out;
}

} // namespace

SparseRow operator_row(const GraphOracle& oracle, const WeightScheme& scheme,
                       const Potential& q, const VertexKey& x) {
    const auto edges = oracle.out_edges(x);
    validate_scheme(oracle, scheme, x, edges);
    const double m_v = oracle.vertex_weight(x);

    SparseRow row;
    row.origin = x;
    double weighted_degree = 0.0;
    for (const auto& [terminus, w] : merged_neighbor_weights(edges)) {
        weighted_degree += w;
        if (terminus == x)
            row.diagonal -= w / m_v; // loop: cancels against the degree term
        else
            row.off_diagonal.emplace_back(terminus, -w / m_v);
    }
    row.diagonal += weighted_degree / m_v + q(x);
    return row;
}

LpRow lp_transform(const GraphOracle& oracle, const WeightScheme& scheme, const Potential& q,
                   double lambda, const VertexKey& x) {
    const auto edges = oracle.out_edges(x);
    validate_scheme(oracle, scheme, x, edges);
    const double m_v = oracle.vertex_weight(x);

    LpRow row;
    row.origin = x;
    double weighted_degree = 0.0;
    for (const auto& [terminus, w] : merged_neighbor_weights(edges)) {
        weighted_degree += w;
        row.l_row.emplace_back(terminus, w / m_v);
    }
    row.p_lambda = q(x) - lambda + weighted_degree / m_v;
    return row;
}

double local_moment(const GraphOracle& oracle, const WeightScheme& scheme, const Potential& q,
                    const VertexKey& x, std::int32_t k, std::int64_t vertex_cap) {
    if (k < 0) throw DataError("local_moment: k must be >= 0");
    const double m_v = oracle.vertex_weight(x);
    if (k == 0) return m_v;

    // phi = H^j delta_x lives on B(x, j); scatter each support row.
    std::unordered_map<VertexKey, double> phi{{x, 1.0}};
    for (std::int32_t j = 0; j < k; ++j) {
        std::unordered_map<VertexKey, double> next;
        next.reserve(phi.size() * 4);
        if (static_cast<std::int64_t>(phi.size()) > vertex_cap)
            throw ResourceError("local_moment: ball exceeds vertex cap of " +
                                std::to_string(vertex_cap));
        for (const auto& [v, value] : phi) {
            const SparseRow row = operator_row(oracle, scheme, q, v);
            next[v] += row.diagonal * value;
            // H is weighted-symmetric: scattering the column of v equals
            // scattering its row scaled by the weight ratio.
            for (const auto& [u, entry] : row.off_diagonal)
                next[u] += entry * value * oracle.vertex_weight(v) / oracle.vertex_weight(u);
        }
        phi = std::move(next);
    }
    const auto it = phi.find(x);
    return (it == phi.end() ? 0.0 : it->second) * m_v;
}

CompressedOperator compress(const Patch& patch, const WeightScheme& scheme, const Potential& q,
                            const Region& region) {
    require_complete_window(patch, region, "compress");
    if (scheme.kind == WeightScheme::Kind::markov)
        for (std::int32_t v : region.members)
            if (std::abs(patch.weighted_degrees[v] / patch.vertex_weights[v] - 1.0) > 1e-9)
                throw ConsistencyError("markov scheme inconsistent with patch at '" +
                                       patch.keys[v] + "'");

    CompressedOperator op;
    op.region = region.members;
    const std::int64_t n = static_cast<std::int64_t>(op.region.size());
    std::unordered_map<std::int32_t, std::int64_t> column;
    for (std::int64_t i = 0; i < n; ++i) {
        column.emplace(op.region[i], i);
        op.region_keys.push_back(patch.keys[op.region[i]]);
    }

    const auto mask = region_mask(patch, region);
    std::vector<std::int32_t> exterior;
    for (std::int32_t v : region.members)
        for (std::int32_t u : patch.neighbors(v))
            if (!mask[u]) exterior.push_back(u);
    std::sort(exterior.begin(), exterior.end());
    exterior.erase(std::unique(exterior.begin(), exterior.end()), exterior.end());
    op.exterior = exterior;
    for (std::int32_t v : exterior) op.exterior_keys.push_back(patch.keys[v]);

    op.interior = Eigen::MatrixXd::Zero(n, n);
    op.coupling = Eigen::MatrixXd::Zero(static_cast<std::int64_t>(exterior.size()), n);
    op.vertex_weights = Eigen::VectorXd::Zero(n);

    auto row_at = [&](std::int32_t v, auto&& emit) {
        const double m_v = patch.vertex_weights[v];
        double diag = patch.weighted_degrees[v] / m_v + q(patch.keys[v]);
        for (const Patch::Arc& a : patch.adjacency[v]) {
            const double w = a.weight * a.multiplicity / m_v;
            if (a.to == v)
                diag -= w;
            else
                emit(a.to, -w);
        }
        emit(v, diag);
    };

    for (std::int64_t i = 0; i < n; ++i) {
        const std::int32_t v = op.region[i];
        op.vertex_weights[i] = patch.vertex_weights[v];
        row_at(v, [&](std::int32_t u, double value) {
            const auto it = column.find(u);
            if (it != column.end()) op.interior(i, it->second) += value;
        });
    }
    for (std::size_t r = 0; r < exterior.size(); ++r)
        row_at(exterior[r], [&](std::int32_t u, double value) {
            if (u == exterior[r]) return; // diagonal multiplies a zero of phi
            const auto it = column.find(u);
            if (it != column.end()) op.coupling(static_cast<std::int64_t>(r), it->second) += value;
        });
    return op;
}

double weighted_symmetry_defect(const CompressedOperator& op) {
    double worst = 0.0;
    const std::int64_t n = op.size();
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = i + 1; j < n; ++j)
            worst = std::max(worst, std::abs(op.vertex_weights[i] * op.interior(i, j) -
                                             op.vertex_weights[j] * op.interior(j, i)));
    return worst;
}

} // namespace cayley
