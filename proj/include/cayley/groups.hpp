#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cayley/graph.hpp"
#include "cayley/weights.hpp"

namespace cayley {

enum class GroupKind {
    int_lattice,          // Z^d, elements "k1,k2,..."
    int_cross_c2,         // Z x Z/2, elements "k|0" / "k|1"
    lamplighter,          // F2[X,X^-1] x| Z, elements "p1 p2 ...|k"
    baumslag_solitar_1_2, // affine maps x -> 2^k x + b, elements "k|num/2^e"
    regular_tree          // q-regular tree with a fixed end, elements "word|level"
};

struct GroupSpec {
    GroupKind kind = GroupKind::int_lattice;
    std::int32_t lattice_dim = 1; // int_lattice
    std::int32_t tree_degree = 3; // regular_tree

    std::string name() const;
    static GroupSpec lattice(std::int32_t dim) { return {GroupKind::int_lattice, dim, 3}; }
    static GroupSpec cross_c2() { return {GroupKind::int_cross_c2, 1, 3}; }
    static GroupSpec lamplighter_group() { return {GroupKind::lamplighter, 1, 3}; }
    static GroupSpec bs12() { return {GroupKind::baumslag_solitar_1_2, 1, 3}; }
    static GroupSpec tree(std::int32_t q) { return {GroupKind::regular_tree, 1, q}; }
};

// Exact arithmetic in a built-in group, on canonical strings. Canonical
// forms are bijective with the group elements; all operations re-emit
// canonical forms and throw DataError on malformed input.
class Group {
public:
    virtual ~Group() = default;
    const GroupSpec& spec() const { return spec_; }

    virtual VertexKey identity() const = 0;
    virtual VertexKey multiply(const VertexKey& a, const VertexKey& b) const = 0;
    virtual VertexKey inverse(const VertexKey& a) const = 0;
    // Parses and re-emits; rejects anything that is not a normal form.
    virtual VertexKey canonicalize(const VertexKey& a) const = 0;
    // Image of the element in the free part of the abelianization
    // (the full coordinate vector for Z^d, the cursor/exponent otherwise).
    // Every homomorphism to Z factors through this vector.
    virtual std::vector<std::int64_t> free_abelian_image(const VertexKey& a) const = 0;
    virtual std::int32_t free_abelian_rank() const = 0;

protected:
    explicit Group(GroupSpec spec) : spec_(spec) {}
    GroupSpec spec_;
};

// Throws DataError for regular_tree (not a group; its graph is built from
// parent pointers by make_cayley_oracle).
std::shared_ptr<const Group> make_group(const GroupSpec& spec);

// Edge conventions for Cayley graphs:
//  - simple: one geometric edge per element of S u S^-1 (multiplicity 1 even
//    for involutions and inverse pairs);
//  - serre: edge set (G x S) together with its formal reversals, so an
//    involution or an inverse pair inside S yields multiplicity 2.
enum class EdgeConvention { simple, serre };

struct GeneratingSet {
    std::vector<VertexKey> generators;
    EdgeConvention convention = EdgeConvention::simple;
};

// Named built-in generating sets:
//   int_lattice: "standard";  int_cross_c2: "ladder" (two generators),
//   "diagonal" (the four-generator set with both diagonals);
//   lamplighter: "ac" (shift + toggle), "ab" (shift + shifted toggle);
//   baumslag_solitar_1_2: "ab" (doubling + translation).
GeneratingSet builtin_generators(const GroupSpec& spec, const std::string& name,
                                 EdgeConvention convention = EdgeConvention::simple);

// The weighted Cayley graph of (spec, gens) with weights from the scheme.
// For regular_tree the generating set is ignored and the q-regular tree with
// a fixed end is produced.
std::shared_ptr<const GraphOracle> make_cayley_oracle(const GroupSpec& spec,
                                                      const GeneratingSet& gens,
                                                      const WeightScheme& scheme);

// ---------------------------------------------------------------------------
// Height functions

struct HeightSpec {
    enum class Kind { homomorphism, busemann_tree };
    Kind kind = Kind::homomorphism;
    // homomorphism kind: aligned with GeneratingSet::generators.
    std::vector<std::int64_t> generator_heights;
};

struct HeightCertificate {
    bool accepted = false;
    std::string detail; // explanation; on rejection names the violating generator
    std::vector<std::int64_t> covector; // h = <covector, free_abelian_image>
    VertexKey raising_generator;        // the unique generator with h = +1 (up to inverse)
};

// Accepts iff the generator heights extend to a homomorphism h: G -> Z and
// realize the split S = {t} u K with |h(t)| = 1 and h = 0 on K (up to
// inverses). Acceptance certifies the three height-function axioms globally:
// 1-Lipschitz continuity because generator heights lie in {-1,0,1}; a unique
// ascending neighbor g*t because t is the only direction of height +1; and a
// descending neighbor g*t^-1.
HeightCertificate certify_height(const Group& group, const GeneratingSet& gens,
                                 const HeightSpec& height);

std::int64_t evaluate_height(const Group& group, const HeightCertificate& cert,
                             const VertexKey& x);

// Level of a regular-tree vertex (the Busemann function of the fixed end).
std::int64_t tree_busemann_height(const VertexKey& x);

// Heights of all patch vertices.
std::vector<std::int64_t> height_table(const Patch& patch,
                                       const std::function<std::int64_t(const VertexKey&)>& h);

struct HeightViolation {
    std::int32_t vertex;
    char axiom; // 'A', 'B' or 'C'
    std::string detail;
};

struct HeightAxiomReport {
    std::vector<HeightViolation> violations;
    std::int64_t checked = 0;
    bool ok() const { return violations.empty(); }
};

// Local check of the height-function axioms on every sampled vertex:
// (A) |h(x)-h(y)| <= d(x,y) over pairs at distance <= 2 around the vertex,
// (B) exactly one neighbor at height h+1, (C) at least one at height h-1.
// The sample must not touch the patch frontier.
HeightAxiomReport verify_height_axioms(const Patch& patch,
                                       const std::vector<std::int64_t>& heights,
                                       const Region& sample);

// ---------------------------------------------------------------------------
// Folner sets

struct FolnerSet {
    std::vector<VertexKey> vertices;
    std::int64_t boundary_size = 0;
    std::int64_t ratio_num = 0; // |boundary| / |set|, exact
    std::int64_t ratio_den = 1;
    double ratio() const { return static_cast<double>(ratio_num) / static_cast<double>(ratio_den); }
};

// Built-in Folner family member n of (spec, gens) together with the exact
// boundary ratio. Families: boxes [-n,n]^d for Z^d; strips |k| <= n for
// Z x Z/2; lamp support and cursor in [-n,n] for the lamplighter; for the
// affine group the box |k| <= n, b in 2^-n Z, |b| <= (n+1) 2^n. Throws for
// the regular tree (no Folner sequence exists in a non-amenable graph).
FolnerSet folner_set(const GroupSpec& spec, const GeneratingSet& gens, std::int32_t n);

// ---------------------------------------------------------------------------
// Orbit structures for built-in actions

// Orbits of the sublattice (m Z)^d acting on Z^d by translation.
TransversalFamily lattice_mod_family(std::int32_t dim, std::int64_t modulus);

// Orbits of the Z factor acting on Z x Z/2: two orbits, one per bit.
TransversalFamily cross_c2_bit_family();

} // namespace cayley
