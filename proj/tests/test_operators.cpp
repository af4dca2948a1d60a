#include <doctest.h>

#include "helpers.hpp"

using namespace cayley;
using namespace testutil;

namespace {

double row_entry(const SparseRow& row, const VertexKey& key) {
    for (const auto& [k, v] : row.off_diagonal)
        if (k == key) return v;
    return 0.0;
}

} // namespace

TEST_CASE("combinatorial row on the line: 1 on the diagonal, -1/2 to the sides") {
    const auto oracle = make_cayley_oracle(line().spec, line().gens, WeightScheme::combinatorial());
    const auto row = operator_row(*oracle, WeightScheme::combinatorial(), Potential::zero(), "0");
    CHECK(row.diagonal == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(row_entry(row, "1") == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(row_entry(row, "-1") == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("unit row on the line is the combinatorial Laplacian times the degree") {
    const auto oracle = make_cayley_oracle(line().spec, line().gens, WeightScheme::unit());
    const auto row = operator_row(*oracle, WeightScheme::unit(), Potential::zero(), "0");
    CHECK(row.diagonal == doctest::Approx(2.0));
    CHECK(row_entry(row, "1") == doctest::Approx(-1.0));
    CHECK(row_entry(row, "-1") == doctest::Approx(-1.0));
}

TEST_CASE("diagonal generating set row: diagonal 1, five neighbors at -1/5") {
    const auto oracle =
        make_cayley_oracle(diagonal().spec, diagonal().gens, WeightScheme::combinatorial());
    const auto row =
        operator_row(*oracle, WeightScheme::combinatorial(), Potential::zero(), "0|0");
    CHECK(row.diagonal == doctest::Approx(1.0));
    REQUIRE(row.off_diagonal.size() == 5);
    for (const auto& [k, v] : row.off_diagonal) CHECK(v == doctest::Approx(-0.2));
}

TEST_CASE("potential shifts only the diagonal") {
    const auto oracle = make_cayley_oracle(line().spec, line().gens, WeightScheme::combinatorial());
    const auto row =
        operator_row(*oracle, WeightScheme::combinatorial(), Potential::constant(0.25), "3");
    CHECK(row.diagonal == doctest::Approx(1.25));
    CHECK(row_entry(row, "2") == doctest::Approx(-0.5));
}

TEST_CASE("lp transform ties H - lambda to p_lambda - L") {
    const auto oracle = make_cayley_oracle(line().spec, line().gens, WeightScheme::combinatorial());
    SUBCASE("line values at lambda 0") {
        const auto lp = lp_transform(*oracle, WeightScheme::combinatorial(), Potential::zero(),
                                     0.0, "0");
        CHECK(lp.p_lambda == doctest::Approx(1.0));
        REQUIRE(lp.l_row.size() == 2);
        for (const auto& [k, v] : lp.l_row) CHECK(v == doctest::Approx(0.5));
    }
    SUBCASE("diagonal set at lambda 6/5 has constant p = -1/5") {
        const auto diag =
            make_cayley_oracle(diagonal().spec, diagonal().gens, WeightScheme::combinatorial());
        const auto lp = lp_transform(*diag, WeightScheme::combinatorial(), Potential::zero(),
                                     1.2, "5|1");
        CHECK(lp.p_lambda == doctest::Approx(-0.2).epsilon(1e-12));
    }
    SUBCASE("identity (H - lambda) = (p_lambda - L) holds entrywise") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> lam(-2.0, 4.0);
        for (const auto& g : {line(), diagonal(), lamplighter_ab()}) {
            const auto orc = make_cayley_oracle(g.spec, g.gens, WeightScheme::combinatorial());
            const auto G = make_group(g.spec);
            const Potential q = Potential::constant(0.3);
            for (int i = 0; i < 20; ++i) {
                const VertexKey x = random_element(*G, g.gens, 4, rng);
                const double lambda = lam(rng);
                const auto row = operator_row(*orc, WeightScheme::combinatorial(), q, x);
                const auto lp = lp_transform(*orc, WeightScheme::combinatorial(), q, lambda, x);
                CHECK(std::abs((row.diagonal - lambda) - lp.p_lambda) <= 1e-15);
                REQUIRE(lp.l_row.size() == row.off_diagonal.size());
                for (std::size_t k = 0; k < lp.l_row.size(); ++k) {
                    CHECK(lp.l_row[k].first == row.off_diagonal[k].first);
                    CHECK(std::abs(row.off_diagonal[k].second + lp.l_row[k].second) <= 1e-15);
                }
            }
        }
    }
}

TEST_CASE("local moments on the line") {
    const auto oracle = make_cayley_oracle(line().spec, line().gens, WeightScheme::combinatorial());
    const WeightScheme scheme = WeightScheme::combinatorial();
    const Potential q = Potential::zero();
    CHECK(local_moment(*oracle, scheme, q, "0", 0) == doctest::Approx(1.0));
    CHECK(local_moment(*oracle, scheme, q, "0", 1) == doctest::Approx(1.0));
    CHECK(local_moment(*oracle, scheme, q, "0", 2) == doctest::Approx(1.5));
    CHECK(local_moment(*oracle, scheme, q, "17", 2) == doctest::Approx(1.5));
}

TEST_CASE("compression of a line singleton") {
    const Patch patch = identity_patch(line(), 1);
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                             Region::of_keys(patch, {"0"}));
    REQUIRE(op.size() == 1);
    CHECK(op.interior(0, 0) == doctest::Approx(1.0));
    REQUIRE(op.coupling.rows() == 2);
    CHECK(op.coupling(0, 0) == doctest::Approx(-0.5));
    CHECK(op.coupling(1, 0) == doctest::Approx(-0.5));
}

TEST_CASE("compression of the empty region is empty") {
    const Patch patch = identity_patch(line(), 1);
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(), Region{});
    CHECK(op.size() == 0);
    CHECK(op.coupling.rows() == 0);
}

TEST_CASE("compression of the two-vertex center of the diagonal graph") {
    const Patch patch = identity_patch(diagonal(), 1);
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                             Region::of_keys(patch, {"0|0", "0|1"}));
    REQUIRE(op.size() == 2);
    CHECK(op.interior(0, 0) == doctest::Approx(1.0));
    CHECK(op.interior(1, 1) == doctest::Approx(1.0));
    CHECK(op.interior(0, 1) == doctest::Approx(-0.2));
    CHECK(op.interior(1, 0) == doctest::Approx(-0.2));
    // Four exterior neighbors, each adjacent to both region vertices.
    CHECK(op.coupling.rows() == 4);
    for (std::int64_t r = 0; r < 4; ++r) {
        CHECK(op.coupling(r, 0) == doctest::Approx(-0.2));
        CHECK(op.coupling(r, 1) == doctest::Approx(-0.2));
    }
    CHECK(weighted_symmetry_defect(op) <= 1e-15);
}

TEST_CASE("markov scheme rows are stochastic with unit diagonal") {
    // Direction order is a, b, a^-1, b^-1; probabilities must pair up.
    std::vector<double> probs = {0.3, 0.2, 0.3, 0.2};
    const auto oracle = make_cayley_oracle(lamplighter_ab().spec, lamplighter_ab().gens,
                                           WeightScheme::markov(probs));
    const auto row =
        operator_row(*oracle, WeightScheme::markov(probs), Potential::zero(), "|0");
    CHECK(row.diagonal == doctest::Approx(1.0));
    double mass = 0.0;
    for (const auto& [k, v] : row.off_diagonal) {
        CHECK(v < 0.0);
        mass += -v;
    }
    CHECK(mass == doctest::Approx(1.0));
}

TEST_CASE("asymmetric markov probabilities are rejected") {
    std::vector<double> probs = {0.4, 0.2, 0.2, 0.2}; // p(a) != p(a^-1)
    CHECK_THROWS_AS(make_cayley_oracle(lamplighter_ab().spec, lamplighter_ab().gens,
                                       WeightScheme::markov(probs)),
                    ConsistencyError);
}

TEST_CASE("scheme scale invariance: (c m_V, c m_E) leaves rows unchanged") {
    for (double c : {2.0, 1.0 / 3.0}) {
        CAPTURE(c);
        for (const auto& g : {line(), diagonal()}) {
            const auto base =
                make_cayley_oracle(g.spec, g.gens, WeightScheme::combinatorial());
            const auto scaled =
                make_cayley_oracle(g.spec, g.gens, WeightScheme::combinatorial(c));
            const auto unit_base = make_cayley_oracle(g.spec, g.gens, WeightScheme::unit());
            const auto unit_scaled =
                make_cayley_oracle(g.spec, g.gens, WeightScheme::unit(c));
            const VertexKey x = identity_key(g.spec);
            for (auto [a, b] : {std::pair{base, scaled}, std::pair{unit_base, unit_scaled}}) {
                const auto ra =
                    operator_row(*a, WeightScheme::combinatorial(), Potential::zero(), x);
                const auto rb =
                    operator_row(*b, WeightScheme::combinatorial(), Potential::zero(), x);
                CHECK(std::abs(ra.diagonal - rb.diagonal) <= 1e-15);
                REQUIRE(ra.off_diagonal.size() == rb.off_diagonal.size());
                for (std::size_t i = 0; i < ra.off_diagonal.size(); ++i)
                    CHECK(std::abs(ra.off_diagonal[i].second - rb.off_diagonal[i].second) <=
                          1e-15);
            }
        }
    }
}

TEST_CASE("weighted symmetry and positivity of compressions") {
    std::mt19937_64 rng(13);
    for (const auto& g : {line(), ladder(), diagonal(), lamplighter_ac(), affine_ab()}) {
        CAPTURE(g.label);
        const Patch patch = identity_patch(g, 4);
        for (int trial = 0; trial < 5; ++trial) {
            const Region omega = random_region(patch, 3, 0.5, rng);
            if (omega.empty()) continue;
            const auto op =
                compress(patch, WeightScheme::combinatorial(), Potential::zero(), omega);
            CHECK(weighted_symmetry_defect(op) <= 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.interior);
            CHECK(es.eigenvalues()(0) >= -1e-10);
        }
    }
}
