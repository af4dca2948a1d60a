#pragma once

#include <random>
#include <vector>

#include "cayley/exhaustion.hpp"
#include "cayley/geometry.hpp"
#include "cayley/groups.hpp"
#include "cayley/operators.hpp"

namespace testutil {

using namespace cayley;

struct BuiltinGraph {
    GroupSpec spec;
    GeneratingSet gens;
    std::string label;
};

inline BuiltinGraph line() {
    return {GroupSpec::lattice(1), builtin_generators(GroupSpec::lattice(1), "standard"),
            "line"};
}
inline BuiltinGraph plane() {
    return {GroupSpec::lattice(2), builtin_generators(GroupSpec::lattice(2), "standard"),
            "plane"};
}
inline BuiltinGraph ladder() {
    return {GroupSpec::cross_c2(), builtin_generators(GroupSpec::cross_c2(), "ladder"),
            "ladder"};
}
inline BuiltinGraph diagonal() {
    return {GroupSpec::cross_c2(), builtin_generators(GroupSpec::cross_c2(), "diagonal"),
            "diagonal"};
}
inline BuiltinGraph lamplighter_ac() {
    return {GroupSpec::lamplighter_group(),
            builtin_generators(GroupSpec::lamplighter_group(), "ac"), "lamplighter-ac"};
}
inline BuiltinGraph lamplighter_ab() {
    return {GroupSpec::lamplighter_group(),
            builtin_generators(GroupSpec::lamplighter_group(), "ab"), "lamplighter-ab"};
}
inline BuiltinGraph affine_ab() {
    return {GroupSpec::bs12(), builtin_generators(GroupSpec::bs12(), "ab"), "affine-ab"};
}

inline VertexKey identity_key(const GroupSpec& spec) {
    if (spec.kind == GroupKind::regular_tree) return "|0";
    return make_group(spec)->identity();
}

// A patch centered at the identity, wide enough for region operations of the
// given radius.
inline Patch identity_patch(const BuiltinGraph& g, std::int32_t radius,
                            const WeightScheme& scheme = WeightScheme::combinatorial()) {
    const auto oracle = make_cayley_oracle(g.spec, g.gens, scheme);
    return build_patch(*oracle, {identity_key(g.spec)}, radius);
}

// Random non-frontier subregion of the ball of the given radius.
inline Region random_region(const Patch& patch, std::int32_t radius, double density,
                            std::mt19937_64& rng) {
    std::bernoulli_distribution keep(density);
    std::vector<std::int32_t> members;
    for (std::int32_t v = 0; v < patch.core_size; ++v)
        if (patch.seed_distance[v] <= radius && !patch.frontier[v] && keep(rng))
            members.push_back(v);
    return Region::of(std::move(members));
}

// Random group elements as products of generator directions.
inline VertexKey random_element(const Group& group, const GeneratingSet& gens,
                                std::int32_t length, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, gens.generators.size() - 1);
    std::bernoulli_distribution invert(0.5);
    VertexKey g = group.identity();
    for (std::int32_t i = 0; i < length; ++i) {
        VertexKey s = group.canonicalize(gens.generators[pick(rng)]);
        if (invert(rng)) s = group.inverse(s);
        g = group.multiply(g, s);
    }
    return g;
}

} // namespace testutil
