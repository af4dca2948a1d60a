#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cayley/graph.hpp"

namespace cayley {

// How a graph is weighted, i.e. which avatar of the Laplacian the assembled
// operator is.
//
//  - combinatorial: the simple-random-walk normalization. On constant-degree
//    graphs the weights are m_V = 1, m_E = 1/degree, which makes the delta
//    functions orthonormal and Delta = I - M with M the simple random walk.
//  - unit: m_V = 1, m_E = 1, so Delta = D - A with A the adjacency operator.
//  - markov: a reversible walk with w = 1 and per-direction probabilities
//    p(u) = p(u^{-1}), sum 1; Delta = I - M.
//
// `scale` replaces (m_V, m_E) by (c*m_V, c*m_E); no assembled operator
// changes under it.
struct WeightScheme {
    enum class Kind { combinatorial, unit, markov };

    Kind kind = Kind::combinatorial;
    double scale = 1.0;
    // markov only: probability of each distinct direction, aligned with the
    // oracle's expanded direction list; empty means uniform per edge.
    std::vector<double> markov_probabilities;

    static WeightScheme combinatorial(double scale = 1.0) {
        return WeightScheme{Kind::combinatorial, scale, {}};
    }
    static WeightScheme unit(double scale = 1.0) {
        return WeightScheme{Kind::unit, scale, {}};
    }
    static WeightScheme markov(std::vector<double> probabilities = {}, double scale = 1.0) {
        return WeightScheme{Kind::markov, scale, std::move(probabilities)};
    }
    std::string name() const;
};

// Bounded real potential q on the vertex set.
class Potential {
public:
    static Potential zero();
    static Potential constant(double value);
    // Explicit values; vertices outside the map take `fallback`.
    static Potential tabulated(std::unordered_map<VertexKey, double> values,
                               double fallback = 0.0);
    // q(x) = table[h(x) - base], clamped to the table ends.
    static Potential height_profile(std::function<std::int64_t(const VertexKey&)> height,
                                    std::vector<double> table, std::int64_t base);

    double operator()(const VertexKey& x) const;
    double bound() const { return bound_; }
    const std::string& name() const { return name_; }

private:
    Potential() = default;
    std::function<double(const VertexKey&)> eval_;
    double bound_ = 0.0;
    std::string name_ = "zero";
};

} // namespace cayley
