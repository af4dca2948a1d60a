#include "cayley/weights.hpp"

#include <algorithm>
#include <cmath>

#include "cayley/errors.hpp"

namespace cayley {

double Potential::operator()(const VertexKey& x) const { return eval_(x); }

std::string WeightScheme::name() const {
    switch (kind) {
        case Kind::combinatorial: return "combinatorial";
        case Kind::unit: return "unit";
        case Kind::markov: return "markov";
    }
    return "unknown";
}

Potential Potential::zero() {
    Potential q;
    q.eval_ = [](const VertexKey&) { return 0.0; };
    q.bound_ = 0.0;
    q.name_ = "zero";
    return q;
}

Potential Potential::constant(double value) {
    Potential q;
    q.eval_ = [value](const VertexKey&) { return value; };
    q.bound_ = std::abs(value);
    q.name_ = "constant";
    return q;
}

Potential Potential::tabulated(std::unordered_map<VertexKey, double> values, double fallback) {
    Potential q;
    double bound = std::abs(fallback);
    for (const auto& [k, v] : values) bound = std::max(bound, std::abs(v));
    q.bound_ = bound;
    q.eval_ = [table = std::move(values), fallback](const VertexKey& x) {
        auto it = table.find(x);
        return it == table.end() ? fallback : it->second;
    };
    q.name_ = "tabulated";
    return q;
}

Potential Potential::height_profile(std::function<std::int64_t(const VertexKey&)> height,
                                    std::vector<double> table, std::int64_t base) {
    if (table.empty()) throw DataError("height profile table must be non-empty");
    Potential q;
    double bound = 0.0;
    for (double v : table) bound = std::max(bound, std::abs(v));
    q.bound_ = bound;
    q.eval_ = [h = std::move(height), t = std::move(table), base](const VertexKey& x) {
        std::int64_t idx = h(x) - base;
        idx = std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(t.size()) - 1);
        return t[static_cast<std::size_t>(idx)];
    };
    q.name_ = "height_profile";
    return q;
}

} // namespace cayley
