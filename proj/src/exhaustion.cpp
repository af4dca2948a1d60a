#include "cayley/exhaustion.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace cayley {

namespace {

struct ReplayState {
    std::vector<std::uint8_t> in_region; // mutable copy of the region mask
    std::vector<std::vector<std::int32_t>> nbrs;
    std::int64_t remaining = 0;

    ReplayState(const Patch& patch, const Region& region)
        : in_region(region_mask(patch, region)), remaining(region.size()) {
        nbrs.resize(patch.size());
        for (std::int32_t v = 0; v < patch.size(); ++v) nbrs[v] = patch.neighbors(v);
    }

    std::int64_t members_adjacent(std::int32_t x) const {
        std::int64_t count = 0;
        for (std::int32_t u : nbrs[x]) count += in_region[u];
        return count;
    }
};

} // namespace

std::optional<ExhaustionViolation> verify_exhaustion(const Patch& patch, const Region& region,
                                                     const ExhaustionCertificate& cert) {
    require_complete_window(patch, region, "verify_exhaustion");
    ReplayState state(patch, region);

    for (std::size_t n = 0; n < cert.steps.size(); ++n) {
        const auto step = static_cast<std::int64_t>(n);
        const std::int32_t x = patch.find(cert.steps[n].witness);
        const std::int32_t w = patch.find(cert.steps[n].removed);
        if (x < 0)
            return ExhaustionViolation{step, "witness '" + cert.steps[n].witness +
                                                 "' is not in the patch"};
        if (w < 0)
            return ExhaustionViolation{step, "removed vertex '" + cert.steps[n].removed +
                                                 "' is not in the patch"};
        if (state.in_region[x])
            return ExhaustionViolation{step, "witness '" + cert.steps[n].witness +
                                                 "' still belongs to the remaining region"};
        if (!state.in_region[w])
            return ExhaustionViolation{step, "removed vertex '" + cert.steps[n].removed +
                                                 "' is not in the remaining region"};
        const std::int64_t adjacent = state.members_adjacent(x);
        if (adjacent != 1)
            return ExhaustionViolation{step, "witness 1-ball meets the region in " +
                                                 std::to_string(adjacent) +
                                                 " vertices, expected exactly 1"};
        bool witness_sees_w = false;
        for (std::int32_t u : state.nbrs[x]) witness_sees_w |= (u == w);
        if (!witness_sees_w)
            return ExhaustionViolation{
                step, "the unique member next to the witness is not '" +
                          cert.steps[n].removed + "'"};
        state.in_region[w] = 0;
        --state.remaining;
    }
    if (state.remaining != 0)
        return ExhaustionViolation{static_cast<std::int64_t>(cert.steps.size()),
                                   std::to_string(state.remaining) +
                                       " region vertices were never removed"};
    return std::nullopt;
}

namespace {

// Shared scan state for greedy and backtracking search. count[x] = number of
// distinct neighbors of x inside the remaining region.
struct SearchState {
    const Patch& patch;
    std::vector<std::vector<std::int32_t>> nbrs;
    std::vector<std::uint8_t> in_region;
    std::vector<std::int32_t> count;
    std::vector<std::int32_t> active; // all vertices that can ever witness or be removed

    SearchState(const Patch& p, const Region& region) : patch(p) {
        nbrs.resize(p.size());
        for (std::int32_t v = 0; v < p.size(); ++v) nbrs[v] = p.neighbors(v);
        in_region = region_mask(p, region);
        count.assign(p.size(), 0);
        for (std::int32_t v = 0; v < p.size(); ++v)
            for (std::int32_t u : nbrs[v]) count[v] += in_region[u];
        std::vector<std::uint8_t> near(p.size(), 0);
        for (std::int32_t v : region.members) {
            near[v] = 1;
            for (std::int32_t u : nbrs[v]) near[u] = 1;
        }
        for (std::int32_t v = 0; v < p.size(); ++v)
            if (near[v]) active.push_back(v);
    }

    void remove(std::int32_t w) {
        in_region[w] = 0;
        for (std::int32_t u : nbrs[w]) --count[u];
    }
    void restore(std::int32_t w) {
        in_region[w] = 1;
        for (std::int32_t u : nbrs[w]) ++count[u];
    }

    // Distinct removable vertices in canonical order: w is removable when
    // some witness x outside the region sees exactly w inside it.
    std::vector<std::int32_t> removable() const {
        std::vector<std::int32_t> out;
        for (std::int32_t x : active) {
            if (in_region[x] || count[x] != 1) continue;
            for (std::int32_t u : nbrs[x])
                if (in_region[u]) {
                    out.push_back(u);
                    break;
                }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // Canonical witness of a removable vertex.
    std::int32_t witness_of(std::int32_t w) const {
        for (std::int32_t x : active)
            if (!in_region[x] && count[x] == 1)
                for (std::int32_t u : nbrs[x])
                    if (u == w) return x;
        return -1;
    }

    std::string pack() const {
        std::string bytes((active.size() + 7) / 8, '\0');
        for (std::size_t i = 0; i < active.size(); ++i)
            if (in_region[active[i]]) bytes[i / 8] |= static_cast<char>(1 << (i % 8));
        return bytes;
    }
};

bool greedy_pass(SearchState& state, std::int64_t remaining, ExhaustionCertificate& cert,
                 std::int64_t& nodes) {
    while (remaining > 0) {
        ++nodes;
        std::int32_t witness = -1, removed = -1;
        for (std::int32_t x : state.active) {
            if (state.in_region[x] || state.count[x] != 1) continue;
            witness = x;
            for (std::int32_t u : state.nbrs[x])
                if (state.in_region[u]) {
                    removed = u;
                    break;
                }
            break;
        }
        if (witness < 0) return false;
        cert.steps.push_back({state.patch.keys[witness], state.patch.keys[removed]});
        state.remove(removed);
        --remaining;
    }
    return true;
}

struct Backtracker {
    SearchState& state;
    std::int64_t node_limit;
    std::int64_t nodes = 0;
    bool exhausted = true;
    std::unordered_set<std::string> failed;
    ExhaustionCertificate cert;

    bool run(std::int64_t remaining) {
        if (remaining == 0) return true;
        if (++nodes > node_limit) {
            exhausted = false;
            return false;
        }
        const std::string key = state.pack();
        if (failed.count(key)) return false;
        for (std::int32_t w : state.removable()) {
            const std::int32_t x = state.witness_of(w);
            cert.steps.push_back({state.patch.keys[x], state.patch.keys[w]});
            state.remove(w);
            if (run(remaining - 1)) return true;
            state.restore(w);
            cert.steps.pop_back();
        }
        if (exhausted) failed.insert(key);
        return false;
    }
};

} // namespace

SearchOutcome search_exhaustion(const Patch& patch, const Region& region,
                                const SearchConfig& config) {
    require_complete_window(patch, region, "search_exhaustion");
    SearchOutcome outcome;

    {
        SearchState state(patch, region);
        ExhaustionCertificate cert;
        std::int64_t nodes = 0;
        if (greedy_pass(state, region.size(), cert, nodes)) {
            outcome.status = SearchOutcome::Status::found;
            outcome.certificate = std::move(cert);
            outcome.note = "greedy";
            outcome.nodes_visited = nodes;
            return outcome;
        }
        outcome.nodes_visited = nodes;
    }
    if (config.strategy == SearchStrategy::greedy) {
        outcome.status = SearchOutcome::Status::unknown;
        outcome.note = "greedy stalled; rerun with backtracking to certify nonexistence";
        return outcome;
    }

    SearchState state(patch, region);
    Backtracker bt{state, config.node_limit};
    if (bt.run(region.size())) {
        outcome.status = SearchOutcome::Status::found;
        outcome.certificate = std::move(bt.cert);
        outcome.note = "backtracking";
    } else if (bt.exhausted) {
        outcome.status = SearchOutcome::Status::none;
        outcome.note = "exhaustive";
    } else {
        outcome.status = SearchOutcome::Status::unknown;
        outcome.note = "node limit of " + std::to_string(config.node_limit) + " reached";
    }
    outcome.nodes_visited += bt.nodes;
    return outcome;
}

ExhaustionCertificate exhaustion_from_height(const Patch& patch,
                                             const std::vector<std::int64_t>& heights,
                                             const Region& region) {
    require_complete_window(patch, region, "exhaustion_from_height");
    ReplayState state(patch, region);
    ExhaustionCertificate cert;

    std::vector<std::int32_t> order(region.members);
    // Minimal height first, canonical index as the tie-break. Removing in
    // this order keeps every removal valid: a descending neighbor of the
    // current minimum sees no other remaining vertex.
    std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return heights[a] < heights[b];
    });

    for (std::int32_t y : order) {
        std::int32_t witness = -1;
        for (std::int32_t x : state.nbrs[y])
            if (heights[x] == heights[y] - 1 && !state.in_region[x]) {
                witness = x;
                break;
            }
        if (witness < 0)
            throw DataError("height axioms violated at '" + patch.keys[y] +
                            "': no available descending neighbor");
        if (state.members_adjacent(witness) != 1)
            throw DataError("height axioms violated at '" + patch.keys[witness] +
                            "': several remaining vertices raise its height");
        cert.steps.push_back({patch.keys[witness], patch.keys[y]});
        state.in_region[y] = 0;
    }
    return cert;
}

// ---------------------------------------------------------------------------

UniquenessVerdict decide_uniqueness(const CompressedOperator& op, double lambda, double tol) {
    UniquenessVerdict verdict;
    verdict.tolerance = tol;
    const std::int64_t n = op.size();
    if (n == 0) {
        verdict.status = UniquenessVerdict::Status::unique;
        verdict.min_singular_value = std::numeric_limits<double>::infinity();
        return verdict;
    }

    const std::int64_t e = op.coupling.rows();
    Eigen::MatrixXd stacked(n + e, n);
    stacked.topRows(n) = op.interior - lambda * Eigen::MatrixXd::Identity(n, n);
    if (e > 0) stacked.bottomRows(e) = op.coupling;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    verdict.scale = sigma(0);
    verdict.min_singular_value = sigma(sigma.size() - 1);

    if (verdict.scale == 0.0) { // all-zero system: everything is a witness
        verdict.status = UniquenessVerdict::Status::witness;
        verdict.kernel_basis = Eigen::MatrixXd::Identity(n, n);
        return verdict;
    }
    if (verdict.min_singular_value <= tol * verdict.scale) {
        verdict.status = UniquenessVerdict::Status::witness;
        std::int64_t k = 0;
        for (std::int64_t i = 0; i < sigma.size(); ++i)
            if (sigma(i) <= tol * verdict.scale) ++k;
        verdict.kernel_basis = svd.matrixV().rightCols(k);
    } else if (verdict.min_singular_value <= 10.0 * tol * verdict.scale) {
        verdict.status = UniquenessVerdict::Status::numerically_marginal;
    } else {
        verdict.status = UniquenessVerdict::Status::unique;
    }
    return verdict;
}

EigenfunctionSearch find_supported_eigenfunctions(const CompressedOperator& op,
                                                  double cluster_tol, double residual_tol) {
    EigenfunctionSearch search;
    search.cluster_tol = cluster_tol;
    search.residual_tol = residual_tol;
    search.min_residual_seen = std::numeric_limits<double>::infinity();
    const std::int64_t n = op.size();
    if (n == 0) {
        search.min_residual_seen = 0.0;
        return search;
    }

    // Symmetrize in the weighted inner product: S = D^{1/2} M D^{-1/2}.
    Eigen::VectorXd sqrt_w = op.vertex_weights.array().sqrt();
    Eigen::MatrixXd sym = op.interior;
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) sym(i, j) *= sqrt_w(i) / sqrt_w(j);
    sym = 0.5 * (sym + sym.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NumericalError("find_supported_eigenfunctions: eigensolver failed to converge");
    const Eigen::VectorXd& values = solver.eigenvalues();
    search.scale = std::max({std::abs(values(0)), std::abs(values(n - 1)), 1e-300});

    // Weighted-orthonormal eigenbasis of the compression.
    Eigen::MatrixXd basis = solver.eigenvectors();
    for (std::int64_t i = 0; i < n; ++i) basis.row(i) /= sqrt_w(i);

    const std::int64_t e = op.coupling.rows();
    std::int64_t begin = 0;
    while (begin < n) {
        std::int64_t end = begin + 1;
        while (end < n && values(end) - values(end - 1) <= cluster_tol * search.scale) ++end;
        const std::int64_t k = end - begin;
        const Eigen::MatrixXd cluster = basis.middleCols(begin, k);

        double residual = 0.0;
        std::int64_t multiplicity = k;
        Eigen::MatrixXd kernel = cluster;
        if (e > 0) {
            Eigen::BDCSVD<Eigen::MatrixXd> svd(op.coupling * cluster, Eigen::ComputeFullV);
            const auto& sigma = svd.singularValues();
            std::int64_t large = 0;
            for (std::int64_t i = 0; i < sigma.size(); ++i)
                if (sigma(i) > residual_tol * search.scale) ++large;
            multiplicity = k - large;
            residual = (k <= sigma.size()) ? sigma(sigma.size() - 1) : 0.0;
            if (multiplicity > 0) kernel = cluster * svd.matrixV().rightCols(multiplicity);
        }
        search.min_residual_seen = std::min(search.min_residual_seen, residual);
        if (multiplicity > 0) {
            EigenfunctionHit hit;
            hit.lambda = values.segment(begin, k).mean();
            hit.multiplicity = multiplicity;
            hit.basis = kernel;
            hit.coupling_residual = residual;
            search.hits.push_back(std::move(hit));
        }
        begin = end;
    }
    return search;
}

} // namespace cayley
