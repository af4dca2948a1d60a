#include <doctest.h>

#include <cmath>

#include "cayley/io.hpp"
#include "cayley/spectral.hpp"
#include "helpers.hpp"

using namespace cayley;
using namespace testutil;

namespace {

// Test-only oracle: eigenvalues of the combinatorial Laplacian compressed to
// a path of m vertices are 1 - cos(k pi / (m+1)), by the sine-vector ansatz.
std::vector<double> dirichlet_path_eigenvalues(int m) {
    std::vector<double> out;
    for (int k = 1; k <= m; ++k) out.push_back(1.0 - std::cos(k * M_PI / (m + 1)));
    return out;
}

Region interval_region(const Patch& patch, int lo, int hi) {
    std::vector<VertexKey> keys;
    for (int k = lo; k <= hi; ++k) keys.push_back(std::to_string(k));
    return Region::of_keys(patch, keys);
}

// Test-only oracle: integral of f over [a,b] by adaptive Simpson.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double target) {
    const auto simpson = [&](double lo, double hi) {
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
    };
    std::function<double(double, double, double, double)> recurse =
        [&](double lo, double hi, double whole, double eps) -> double {
        const double mid = 0.5 * (lo + hi);
        const double left = simpson(lo, mid), right = simpson(mid, hi);
        if (std::abs(left + right - whole) <= 15.0 * eps)
            return left + right + (left + right - whole) / 15.0;
        return recurse(lo, mid, left, eps / 2.0) + recurse(mid, hi, right, eps / 2.0);
    };
    return recurse(a, b, simpson(a, b), target);
}

// Test-only oracle: moment integral of lambda^k against the exact line IDS.
// The substitution lambda = 1 - cos(theta) removes the inverse square-root
// endpoint singularities of dN, leaving a smooth integrand on [0, pi].
double line_moment_by_quadrature(int k, double target = 1e-11) {
    return adaptive_simpson(
               [k](double theta) { return std::pow(1.0 - std::cos(theta), k); }, 0.0, M_PI,
               target) /
           M_PI;
}

} // namespace

TEST_CASE("one-by-one matrix eigensolve") {
    const Patch patch = identity_patch(line(), 1);
    auto op = compress(patch, WeightScheme::combinatorial(), Potential::constant(0.75),
                       Region::of_keys(patch, {"0"}));
    const auto report = eigensolve(op);
    REQUIRE(report.eigenvalues.size() == 1);
    CHECK(report.eigenvalues(0) == doctest::Approx(1.75));
}

TEST_CASE("dirichlet eigenvalues of a path match the closed form to 1e-12") {
    const int m = 10;
    const Patch patch = identity_patch(line(), m + 1);
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                             interval_region(patch, 1, m));
    const auto report = eigensolve(op, true);
    const auto exact = dirichlet_path_eigenvalues(m);
    REQUIRE(report.eigenvalues.size() == m);
    for (int k = 0; k < m; ++k)
        CHECK(std::abs(report.eigenvalues(k) - exact[k]) <= 1e-12);
    CHECK(report.residual_bound <= 1e-12);
}

TEST_CASE("the diagonal graph center pair has eigenvalues 4/5 and 6/5") {
    const Patch patch = identity_patch(diagonal(), 1);
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                             Region::of_keys(patch, {"0|0", "0|1"}));
    const auto report = eigensolve(op);
    REQUIRE(report.eigenvalues.size() == 2);
    CHECK(report.eigenvalues(0) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(report.eigenvalues(1) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("exact line IDS values") {
    CHECK(exact_ids_line(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(exact_ids_line(0.0) == 0.0);
    CHECK(exact_ids_line(-3.0) == 0.0);
    CHECK(exact_ids_line(2.0) == 1.0);
    CHECK(exact_ids_line(5.0) == 1.0);
    CHECK(exact_ids_line(1.0 - std::sqrt(2.0) / 2.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("empirical IDS counts eigenvalues on the grid") {
    const int m = 1999;
    const Patch patch = identity_patch(line(), m + 1);
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                             interval_region(patch, 1, m));
    const auto report = eigensolve(op);

    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) grid.push_back(0.01 * i);
    const auto curve = empirical_ids(report, grid, 1, "line test");

    // Monotone in [0,1], pinned at the ends.
    CHECK(curve.values.front() == 0.0);
    CHECK(curve.values.back() == 1.0);
    for (std::size_t i = 1; i < curve.values.size(); ++i)
        CHECK(curve.values[i] >= curve.values[i - 1]);

    // Midpoint value and the 2/m sandwich against the exact IDS.
    const double mid = curve.values[100];
    CHECK(std::abs(mid - 0.5) <= 1e-3);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(curve.values[i] - exact_ids_line(grid[i])) <= 2.0 / m);
}

TEST_CASE("jump detection") {
    std::vector<double> grid;
    for (int i = 0; i <= 2000; ++i) grid.push_back(0.001 * i);

    SUBCASE("line curves have no candidates") {
        // The exact two-sided window mass peaks at N(2e) = arccos(1-2e)/pi
        // (about 0.064 for e = 0.01) where the band edge density diverges,
        // so the threshold must sit above that for a continuous spectrum.
        std::vector<IDSCurve> curves;
        for (int m : {101, 301, 901}) {
            const Patch patch = identity_patch(line(), m + 1);
            const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                                     interval_region(patch, 1, m));
            curves.push_back(empirical_ids(eigensolve(op), grid, 1, "line"));
        }
        const auto report = detect_jumps(curves, 0.01, 0.08);
        CHECK(report.candidates.empty());
    }
    SUBCASE("constant curves have no candidates") {
        IDSCurve flat;
        flat.grid = grid;
        flat.values.assign(grid.size(), 0.5);
        flat.region_size = 1;
        const auto report = detect_jumps({flat, flat, flat}, 0.01, 0.05);
        CHECK(report.candidates.empty());
    }
    SUBCASE("grid mismatch is rejected") {
        IDSCurve a, b;
        a.grid = {0.0, 1.0};
        a.values = {0.0, 1.0};
        b.grid = {0.0, 2.0};
        b.values = {0.0, 1.0};
        CHECK_THROWS_AS(detect_jumps({a, a, b}, 0.01, 0.05), DataError);
    }
}

TEST_CASE("von Neumann trace of polynomials on the line") {
    const auto oracle = make_cayley_oracle(line().spec, line().gens, WeightScheme::combinatorial());
    const WeightScheme scheme = WeightScheme::combinatorial();
    const Potential q = Potential::zero();

    CHECK(vn_trace_poly(*oracle, scheme, q, {"0"}, {1.0}) == doctest::Approx(1.0));
    CHECK(vn_trace_poly(*oracle, scheme, q, {"0"}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(vn_trace_poly(*oracle, scheme, q, {"0"}, {0.0, 0.0, 1.0}) == doctest::Approx(1.5));

    SUBCASE("independence of the transversal for the 2Z action") {
        for (int k = 0; k <= 6; ++k) {
            std::vector<double> mono(k + 1, 0.0);
            mono[k] = 1.0;
            const double a = vn_trace_poly(*oracle, scheme, q, {"0", "1"}, mono);
            const double b = vn_trace_poly(*oracle, scheme, q, {"0", "3"}, mono);
            CHECK(std::abs(a - b) <= 1e-12);
        }
    }
    SUBCASE("moments match the quadrature of the exact IDS to 1e-8") {
        for (int k = 0; k <= 6; ++k) {
            std::vector<double> mono(k + 1, 0.0);
            mono[k] = 1.0;
            const double traced = vn_trace_poly(*oracle, scheme, q, {"0"}, mono);
            const double integrated = line_moment_by_quadrature(k);
            CHECK(std::abs(traced - integrated) <= 1e-8);
        }
    }
}

TEST_CASE("trace bound reports") {
    const Patch patch = identity_patch(line(), 60);
    const Region omega = interval_region(patch, -50, 50);
    const TransversalFamily family = TransversalFamily::simply_transitive();

    // Larger window for the empirical mass.
    const auto big_op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                                 interval_region(patch, -58, 58));
    const auto hits = find_supported_eigenfunctions(big_op, 1e-8, 1e-6);

    SUBCASE("line intervals pass at generic lambda") {
        for (double lambda : {0.3, 0.7, 1.0, 1.5}) {
            const auto report =
                vn_bound_check(patch, omega, family, WeightScheme::combinatorial(),
                               Potential::zero(), hits, 117, 1, lambda, 2e-3, 1e-9);
            CAPTURE(lambda);
            CHECK(report.applicable);
            CHECK(report.pass);
            CHECK(report.boundary2 == 4);
            CHECK(report.packing == 101);
            CHECK(report.bound_tau == doctest::Approx(4.0 / 101.0));
            CHECK(report.empirical_mass_tau == 0.0);
        }
    }
    SUBCASE("region without a transversal is rejected") {
        const TransversalFamily parity = lattice_mod_family(1, 2);
        const Region evens = Region::of_keys(patch, {"0", "2", "4"});
        CHECK_THROWS_AS(vn_bound_check(patch, evens, parity, WeightScheme::combinatorial(),
                                       Potential::zero(), hits, 117, 2, 1.0, 2e-3, 1e-9),
                        DataError);
    }
}

TEST_CASE("trace bound is not applicable where uniqueness fails") {
    const Patch patch = identity_patch(diagonal(), 3);
    const Region omega = [&] {
        std::vector<VertexKey> keys;
        for (int k = -1; k <= 1; ++k)
            for (int bit = 0; bit <= 1; ++bit)
                keys.push_back(std::to_string(k) + "|" + (bit ? "1" : "0"));
        return Region::of_keys(patch, keys);
    }();
    const auto big_op = compress(patch, WeightScheme::combinatorial(), Potential::zero(), omega);
    const auto hits = find_supported_eigenfunctions(big_op);
    const auto report =
        vn_bound_check(patch, omega, TransversalFamily::simply_transitive(),
                       WeightScheme::combinatorial(), Potential::zero(), hits, omega.size(), 1,
                       1.2, 2e-3, 1e-9);
    CHECK_FALSE(report.applicable);
}
