#include "cayley/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace cayley {

namespace {

bool is_tridiagonal(const Eigen::MatrixXd& m) {
    const std::int64_t n = m.rows();
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = i + 2; j < n; ++j)
            if (m(i, j) != 0.0 || m(j, i) != 0.0) return false;
    return true;
}

std::vector<std::pair<double, std::int64_t>> cluster_values(const Eigen::VectorXd& values,
                                                            double tol_abs) {
    std::vector<std::pair<double, std::int64_t>> out;
    std::int64_t begin = 0;
    const std::int64_t n = values.size();
    while (begin < n) {
        std::int64_t end = begin + 1;
        while (end < n && values(end) - values(end - 1) <= tol_abs) ++end;
        out.emplace_back(values.segment(begin, end - begin).mean(), end - begin);
        begin = end;
    }
    return out;
}

} // namespace

EigenReport eigensolve(const CompressedOperator& op, bool want_vectors, double cluster_tol,
                       std::int64_t dense_cap) {
    EigenReport report;
    report.region_size = op.size();
    const std::int64_t n = op.size();
    if (n == 0) throw DataError("eigensolve: empty region");
    if (n > dense_cap)
        throw ResourceError("eigensolve: region size " + std::to_string(n) +
                            " exceeds the dense cap of " + std::to_string(dense_cap));

    Eigen::VectorXd sqrt_w = op.vertex_weights.array().sqrt();
    Eigen::MatrixXd sym = op.interior;
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) sym(i, j) *= sqrt_w(i) / sqrt_w(j);
    sym = 0.5 * (sym + sym.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (!want_vectors && is_tridiagonal(sym)) {
        Eigen::VectorXd diag = sym.diagonal();
        Eigen::VectorXd sub(n - 1);
        for (std::int64_t i = 0; i + 1 < n; ++i) sub(i) = sym(i + 1, i);
        solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    } else {
        solver.compute(sym, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    }
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensolve: iteration failed to converge");

    report.eigenvalues = solver.eigenvalues();
    const double scale =
        std::max({std::abs(report.eigenvalues(0)), std::abs(report.eigenvalues(n - 1)), 1e-300});
    report.clusters = cluster_values(report.eigenvalues, cluster_tol * scale);

    if (want_vectors) {
        // Verified residual: columns of A V - V diag(lambda).
        const Eigen::MatrixXd residual =
            sym * solver.eigenvectors() -
            solver.eigenvectors() * report.eigenvalues.asDiagonal();
        report.residual_bound = residual.colwise().norm().maxCoeff() / scale;
        report.eigenvectors = solver.eigenvectors();
        for (std::int64_t i = 0; i < n; ++i) report.eigenvectors.row(i) /= sqrt_w(i);
    } else {
        // Backward-stability model of the symmetric QR iteration.
        report.residual_bound = 100.0 * static_cast<double>(n) *
                                std::numeric_limits<double>::epsilon();
    }
    return report;
}

IDSCurve empirical_ids(const EigenReport& report, const std::vector<double>& grid,
                       std::int64_t domain_size, std::string provenance) {
    if (report.region_size <= 0) throw DataError("empirical_ids: empty report");
    if (domain_size < 1) throw DataError("empirical_ids: domain size must be >= 1");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw DataError("empirical_ids: grid must be ascending");

    IDSCurve curve;
    curve.grid = grid;
    curve.region_size = report.region_size;
    curve.domain_size = domain_size;
    curve.provenance = std::move(provenance);
    curve.values.reserve(grid.size());
    const auto& ev = report.eigenvalues;
    std::int64_t count = 0;
    for (double lambda : grid) {
        while (count < ev.size() && ev(count) <= lambda) ++count;
        curve.values.push_back(static_cast<double>(count) /
                               static_cast<double>(report.region_size));
    }
    return curve;
}

double exact_ids_line(double lambda) {
    if (lambda <= 0.0) return 0.0;
    if (lambda >= 2.0) return 1.0;
    return std::acos(1.0 - lambda) / M_PI;
}

namespace {

double curve_value(const IDSCurve& curve, double x) {
    // Right-continuous step interpolation; clamped to the first sample below
    // the grid, so a window reaching past the grid edge adds no mass.
    const auto it = std::upper_bound(curve.grid.begin(), curve.grid.end(), x);
    if (it == curve.grid.begin()) return curve.values.front();
    return curve.values[static_cast<std::size_t>(it - curve.grid.begin()) - 1];
}

} // namespace

JumpReport detect_jumps(const std::vector<IDSCurve>& curves, double window, double threshold) {
    if (curves.size() < 3)
        throw DataError("detect_jumps: at least 3 curves over increasing regions required");
    for (const IDSCurve& c : curves)
        if (c.grid != curves.front().grid) throw DataError("detect_jumps: grids mismatch");
    if (!(window > 0.0)) throw DataError("detect_jumps: window must be positive");

    JumpReport report;
    report.window = window;
    report.threshold = threshold;

    const auto& grid = curves.front().grid;
    std::vector<std::uint8_t> flagged(grid.size(), 0);
    std::vector<std::vector<double>> masses(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool all = true;
        for (const IDSCurve& c : curves) {
            const double mass = curve_value(c, grid[i] + window) -
                                curve_value(c, grid[i] - window);
            masses[i].push_back(mass);
            all = all && mass >= threshold;
        }
        flagged[i] = all;
    }

    // Merge runs of flagged grid points into one candidate each, represented
    // by the point with the largest mass in the finest curve.
    std::size_t i = 0;
    while (i < grid.size()) {
        if (!flagged[i]) {
            ++i;
            continue;
        }
        std::size_t best = i, j = i;
        while (j < grid.size() && flagged[j]) {
            if (masses[j].back() > masses[best].back()) best = j;
            ++j;
        }
        JumpCandidate cand;
        cand.lambda = grid[best];
        cand.masses = masses[best];
        const double peak = *std::max_element(cand.masses.begin(), cand.masses.end());
        cand.stable = cand.masses.back() >= 0.5 * peak;
        report.candidates.push_back(std::move(cand));
        i = j;
    }
    return report;
}

double vn_trace_poly(const GraphOracle& oracle, const WeightScheme& scheme, const Potential& q,
                     const std::vector<VertexKey>& transversal,
                     const std::vector<double>& coefficients, std::int64_t vertex_cap) {
    if (transversal.empty()) throw DataError("vn_trace_poly: empty transversal");
    if (coefficients.empty()) return 0.0;
    double total = 0.0;
    for (const VertexKey& x : transversal)
        for (std::size_t k = 0; k < coefficients.size(); ++k)
            if (coefficients[k] != 0.0)
                total += coefficients[k] *
                         local_moment(oracle, scheme, q, x, static_cast<std::int32_t>(k),
                                      vertex_cap);
    return total / static_cast<double>(transversal.size());
}

BoundReport vn_bound_check(const Patch& patch, const Region& region,
                           const TransversalFamily& family, const WeightScheme& scheme,
                           const Potential& q, const EigenfunctionSearch& window_hits,
                           std::int64_t window_region_size, std::int64_t domain_size,
                           double lambda, double lambda_window, double tol) {
    BoundReport report;
    report.lambda = lambda;
    report.tol = tol;

    report.packing = packing_number(patch, region, family);
    if (report.packing < 1)
        throw DataError("vn_bound_check: the region contains no transversal; "
                        "the trace bound is undefined");
    report.boundary2 = thick_boundary(patch, region, 2).size();
    report.bound_tau =
        static_cast<double>(report.boundary2) / static_cast<double>(report.packing);

    report.verdict = decide_uniqueness(compress(patch, scheme, q, region), lambda);
    report.applicable = report.verdict.status == UniquenessVerdict::Status::unique;

    if (window_region_size <= 0) throw DataError("vn_bound_check: empty comparison window");
    std::int64_t mass = 0;
    for (const EigenfunctionHit& hit : window_hits.hits)
        if (std::abs(hit.lambda - lambda) <= lambda_window) mass += hit.multiplicity;
    report.empirical_mass_tau1 =
        static_cast<double>(mass) / static_cast<double>(window_region_size);
    report.empirical_mass_tau = report.empirical_mass_tau1 * static_cast<double>(domain_size);

    if (report.applicable)
        report.pass = report.empirical_mass_tau <= report.bound_tau + tol;
    return report;
}

} // namespace cayley
