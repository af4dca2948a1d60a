#include <doctest.h>

#include "helpers.hpp"

using namespace cayley;
using namespace testutil;

namespace {

Region ladder_strip(const Patch& patch, std::int32_t n) {
    std::vector<VertexKey> keys;
    for (std::int32_t k = -n; k <= n; ++k)
        for (int bit = 0; bit <= 1; ++bit)
            keys.push_back(std::to_string(k) + "|" + (bit ? "1" : "0"));
    return Region::of_keys(patch, keys);
}

} // namespace

TEST_CASE("empty certificate verifies the empty region") {
    const Patch patch = identity_patch(line(), 2);
    CHECK_FALSE(verify_exhaustion(patch, Region{}, {}).has_value());
}

TEST_CASE("the ladder strip peels from the right, witnessed one column out") {
    const Patch patch = identity_patch(ladder(), 3);
    const Region omega = ladder_strip(patch, 1);
    ExhaustionCertificate cert;
    cert.steps = {
        {"2|1", "1|1"}, {"2|0", "1|0"}, {"1|1", "0|1"},
        {"1|0", "0|0"}, {"0|1", "-1|1"}, {"0|0", "-1|0"},
    };
    const auto violation = verify_exhaustion(patch, omega, cert);
    if (violation) CAPTURE(violation->reason);
    CHECK_FALSE(violation.has_value());
    CHECK(cert.steps.size() == 6);
}

TEST_CASE("bad certificates are rejected with the failing step") {
    const Patch patch = identity_patch(ladder(), 3);
    const Region omega = ladder_strip(patch, 1);

    SUBCASE("witness whose unique member is not the claimed one") {
        ExhaustionCertificate cert;
        cert.steps = {{"2|0", "1|1"}};
        const auto violation = verify_exhaustion(patch, omega, cert);
        REQUIRE(violation.has_value());
        CHECK(violation->step == 0);
        CHECK(violation->reason.find("unique member") != std::string::npos);
    }
    SUBCASE("witness adjacent to two remaining vertices") {
        const Region small = Region::of_keys(patch, {"0|1", "1|0"});
        ExhaustionCertificate cert;
        cert.steps = {{"1|1", "0|1"}, {"2|0", "1|0"}};
        const auto violation = verify_exhaustion(patch, small, cert);
        REQUIRE(violation.has_value());
        CHECK(violation->step == 0);
        CHECK(violation->reason.find("2 vertices") != std::string::npos);
    }
    SUBCASE("witness still inside the region") {
        ExhaustionCertificate cert;
        cert.steps = {{"1|1", "0|1"}};
        const auto violation = verify_exhaustion(patch, omega, cert);
        REQUIRE(violation.has_value());
        CHECK(violation->reason.find("still belongs") != std::string::npos);
    }
    SUBCASE("short certificate leaves vertices unremoved") {
        ExhaustionCertificate cert;
        cert.steps = {{"2|1", "1|1"}};
        const auto violation = verify_exhaustion(patch, omega, cert);
        REQUIRE(violation.has_value());
        CHECK(violation->step == 1);
        CHECK(violation->reason.find("never removed") != std::string::npos);
    }
}

TEST_CASE("search finds certificates on ladder strips up to n = 10") {
    const Patch patch = identity_patch(ladder(), 12);
    for (std::int32_t n = 1; n <= 10; ++n) {
        CAPTURE(n);
        const Region omega = ladder_strip(patch, n);
        const auto outcome = search_exhaustion(patch, omega);
        REQUIRE(outcome.status == SearchOutcome::Status::found);
        CHECK(outcome.certificate.steps.size() == static_cast<std::size_t>(omega.size()));
        CHECK_FALSE(verify_exhaustion(patch, omega, outcome.certificate).has_value());
    }
}

TEST_CASE("the diagonal graph strip admits no exhaustion (exhaustive search)") {
    const Patch patch = identity_patch(diagonal(), 3);
    const Region omega = ladder_strip(patch, 1);
    const auto outcome = search_exhaustion(patch, omega);
    CHECK(outcome.status == SearchOutcome::Status::none);
    CHECK(outcome.note == "exhaustive");
}

TEST_CASE("singleton regions exhaust in one step") {
    const Patch patch = identity_patch(line(), 2);
    const auto outcome = search_exhaustion(patch, Region::of_keys(patch, {"0"}));
    REQUIRE(outcome.status == SearchOutcome::Status::found);
    REQUIRE(outcome.certificate.steps.size() == 1);
    CHECK(outcome.certificate.steps[0].removed == "0");
    CHECK(outcome.certificate.steps[0].witness == "-1"); // canonical tie-break
}

TEST_CASE("exhaustion from the identity height on a line interval") {
    const Patch patch = identity_patch(line(), 4);
    const auto G = make_group(GroupSpec::lattice(1));
    const auto cert_h = certify_height(*G, line().gens, {{}, {1}});
    REQUIRE(cert_h.accepted);
    const auto h = height_table(
        patch, [&](const VertexKey& k) { return evaluate_height(*G, cert_h, k); });

    const Region omega = Region::of_keys(patch, {"-1", "0", "1"});
    const auto cert = exhaustion_from_height(patch, h, omega);
    REQUIRE(cert.steps.size() == 3);
    CHECK(cert.steps[0].removed == "-1");
    CHECK(cert.steps[0].witness == "-2");
    CHECK(cert.steps[1].removed == "0");
    CHECK(cert.steps[1].witness == "-1");
    CHECK(cert.steps[2].removed == "1");
    CHECK(cert.steps[2].witness == "0");
    CHECK_FALSE(verify_exhaustion(patch, omega, cert).has_value());

    CHECK(exhaustion_from_height(patch, h, Region{}).steps.empty());
}

TEST_CASE("height exhaustions verify on random lamplighter regions") {
    const auto g = lamplighter_ac();
    const Patch patch = identity_patch(g, 5);
    const auto G = make_group(g.spec);
    const auto cert_h = certify_height(*G, g.gens, {{}, {1, 0}});
    REQUIRE(cert_h.accepted);
    const auto h = height_table(
        patch, [&](const VertexKey& k) { return evaluate_height(*G, cert_h, k); });

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const Region omega = random_region(patch, 4, 0.4, rng);
        const auto cert = exhaustion_from_height(patch, h, omega);
        CHECK_FALSE(verify_exhaustion(patch, omega, cert).has_value());
    }
}

TEST_CASE("lambda-uniqueness on the empty region is trivial") {
    const Patch patch = identity_patch(line(), 1);
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(), Region{});
    const auto verdict = decide_uniqueness(op, 0.5);
    CHECK(verdict.status == UniquenessVerdict::Status::unique);
}

TEST_CASE("the diagonal graph center pair carries the 6/5 eigenfunction") {
    const Patch patch = identity_patch(diagonal(), 2);
    const Region center = Region::of_keys(patch, {"0|0", "0|1"});
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(), center);

    SUBCASE("uniqueness fails exactly at 6/5 with kernel (1,-1)") {
        const auto verdict = decide_uniqueness(op, 1.2);
        REQUIRE(verdict.status == UniquenessVerdict::Status::witness);
        REQUIRE(verdict.kernel_basis.cols() == 1);
        const double ratio = verdict.kernel_basis(0, 0) / verdict.kernel_basis(1, 0);
        CHECK(ratio == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("uniqueness holds away from 6/5") {
        CHECK(decide_uniqueness(op, 0.8).status == UniquenessVerdict::Status::unique);
        CHECK(decide_uniqueness(op, 1.0).status == UniquenessVerdict::Status::unique);
    }
    SUBCASE("eigenfunction search finds exactly one hit") {
        const auto search = find_supported_eigenfunctions(op);
        REQUIRE(search.hits.size() == 1);
        CHECK(search.hits[0].lambda == doctest::Approx(1.2).epsilon(1e-12));
        CHECK(search.hits[0].multiplicity == 1);
        CHECK(search.hits[0].coupling_residual <= 1e-12);
        const auto& basis = search.hits[0].basis;
        CHECK(basis(0, 0) / basis(1, 0) == doctest::Approx(-1.0).epsilon(1e-9));
    }
}

TEST_CASE("the full strip at 6/5: a three-dimensional kernel of vertical pairs") {
    const Patch patch = identity_patch(diagonal(), 3);
    std::vector<VertexKey> keys;
    for (int k = -1; k <= 1; ++k)
        for (int bit = 0; bit <= 1; ++bit)
            keys.push_back(std::to_string(k) + "|" + (bit ? "1" : "0"));
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                             Region::of_keys(patch, keys));
    const auto verdict = decide_uniqueness(op, 1.2);
    REQUIRE(verdict.status == UniquenessVerdict::Status::witness);
    CHECK(verdict.kernel_basis.cols() == 3); // one vertical pair per column k
    // Every kernel vector solves the stacked system within the tolerance.
    Eigen::MatrixXd stacked(op.interior.rows() + op.coupling.rows(), op.interior.cols());
    stacked.topRows(op.interior.rows()) =
        op.interior - 1.2 * Eigen::MatrixXd::Identity(op.size(), op.size());
    stacked.bottomRows(op.coupling.rows()) = op.coupling;
    for (std::int64_t c = 0; c < verdict.kernel_basis.cols(); ++c) {
        const Eigen::VectorXd phi = verdict.kernel_basis.col(c);
        CHECK((stacked * phi).norm() <= verdict.tolerance * verdict.scale * phi.norm());
    }
}

TEST_CASE("line intervals are lambda-unique everywhere") {
    const Patch patch = identity_patch(line(), 7);
    std::vector<VertexKey> keys;
    for (int k = -5; k <= 5; ++k) keys.push_back(std::to_string(k));
    const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(),
                             Region::of_keys(patch, keys));
    CHECK(decide_uniqueness(op, 0.7).status == UniquenessVerdict::Status::unique);
    CHECK(decide_uniqueness(op, 0.7).min_singular_value > 1e-8);
    const auto search = find_supported_eigenfunctions(op, 1e-8, 1e-6);
    CHECK(search.hits.empty());
    CHECK(search.min_residual_seen > 1e-6);
}

TEST_CASE("uniqueness verdicts match the eigenfunction search") {
    std::mt19937_64 rng(31);
    const Patch patch = identity_patch(diagonal(), 4);
    std::uniform_real_distribution<double> lam(0.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Region omega = random_region(patch, 3, 0.5, rng);
        if (omega.empty()) continue;
        const auto op = compress(patch, WeightScheme::combinatorial(), Potential::zero(), omega);
        const auto search = find_supported_eigenfunctions(op);
        for (int k = 0; k < 8; ++k) {
            const double lambda = lam(rng);
            const auto verdict = decide_uniqueness(op, lambda);
            bool near_hit = false;
            for (const auto& hit : search.hits)
                near_hit |= std::abs(hit.lambda - lambda) <= 1e-6;
            if (verdict.status == UniquenessVerdict::Status::witness) CHECK(near_hit);
            if (!near_hit) CHECK(verdict.status != UniquenessVerdict::Status::witness);
        }
        for (const auto& hit : search.hits) {
            const auto verdict = decide_uniqueness(op, hit.lambda);
            CHECK(verdict.status == UniquenessVerdict::Status::witness);
        }
    }
}
