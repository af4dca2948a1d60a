#include "cayley/groups.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace cayley {

namespace {

[[noreturn]] void bad_element(const VertexKey& key, const char* why) {
    throw DataError("malformed element '" + key + "': " + why);
}

std::int64_t parse_int(const std::string& text, const VertexKey& context) {
    if (text.empty()) bad_element(context, "empty integer field");
    std::size_t pos = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(text, &pos);
    } catch (const std::exception&) {
        bad_element(context, "not an integer");
    }
    if (pos != text.size()) bad_element(context, "trailing characters in integer field");
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = text.find(sep, start);
        if (at == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, at - start));
        start = at + 1;
    }
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
    __int128 s = static_cast<__int128>(a) + b;
    if (s > INT64_MAX || s < INT64_MIN) throw DataError(std::string(what) + ": integer overflow");
    return static_cast<std::int64_t>(s);
}

std::int64_t checked_shift(std::int64_t a, std::int64_t bits, const char* what) {
    if (bits < 0 || bits > 62) throw DataError(std::string(what) + ": exponent out of range");
    __int128 s = static_cast<__int128>(a) << bits;
    if (s > INT64_MAX || s < INT64_MIN) throw DataError(std::string(what) + ": integer overflow");
    return static_cast<std::int64_t>(s);
}

// ---------------------------------------------------------------------------
// Z^d

struct LatticeElem {
    std::vector<std::int64_t> coords;
};

class LatticeGroup final : public Group {
public:
    explicit LatticeGroup(GroupSpec spec) : Group(spec) {
        if (spec.lattice_dim < 1) throw DataError("int_lattice: dimension must be >= 1");
    }

    LatticeElem parse(const VertexKey& key) const {
        const auto parts = split(key, ',');
        if (static_cast<std::int32_t>(parts.size()) != spec_.lattice_dim)
            bad_element(key, "wrong coordinate count");
        LatticeElem e;
        for (const auto& p : parts) e.coords.push_back(parse_int(p, key));
        return e;
    }

    static VertexKey emit(const LatticeElem& e) {
        std::string out;
        for (std::size_t i = 0; i < e.coords.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(e.coords[i]);
        }
        return out;
    }

    VertexKey identity() const override {
        return emit(LatticeElem{std::vector<std::int64_t>(spec_.lattice_dim, 0)});
    }
    VertexKey multiply(const VertexKey& a, const VertexKey& b) const override {
        LatticeElem ea = parse(a), eb = parse(b);
        for (std::int32_t i = 0; i < spec_.lattice_dim; ++i)
            ea.coords[i] = checked_add(ea.coords[i], eb.coords[i], "int_lattice");
        return emit(ea);
    }
    VertexKey inverse(const VertexKey& a) const override {
        LatticeElem e = parse(a);
        for (auto& c : e.coords) c = -c;
        return emit(e);
    }
    VertexKey canonicalize(const VertexKey& a) const override { return emit(parse(a)); }
    std::vector<std::int64_t> free_abelian_image(const VertexKey& a) const override {
        return parse(a).coords;
    }
    std::int32_t free_abelian_rank() const override { return spec_.lattice_dim; }
};

// ---------------------------------------------------------------------------
// Z x Z/2

class CrossC2Group final : public Group {
public:
    explicit CrossC2Group(GroupSpec spec) : Group(spec) {}

    static std::pair<std::int64_t, int> parse(const VertexKey& key) {
        const auto parts = split(key, '|');
        if (parts.size() != 2) bad_element(key, "expected 'k|bit'");
        const std::int64_t k = parse_int(parts[0], key);
        if (parts[1] != "0" && parts[1] != "1") bad_element(key, "bit must be 0 or 1");
        return {k, parts[1] == "1" ? 1 : 0};
    }
    static VertexKey emit(std::int64_t k, int bit) {
        return std::to_string(k) + "|" + (bit ? "1" : "0");
    }

    VertexKey identity() const override { return emit(0, 0); }
    VertexKey multiply(const VertexKey& a, const VertexKey& b) const override {
        const auto [ka, xa] = parse(a);
        const auto [kb, xb] = parse(b);
        return emit(checked_add(ka, kb, "int_cross_c2"), xa ^ xb);
    }
    VertexKey inverse(const VertexKey& a) const override {
        const auto [k, x] = parse(a);
        return emit(-k, x);
    }
    VertexKey canonicalize(const VertexKey& a) const override {
        const auto [k, x] = parse(a);
        return emit(k, x);
    }
    std::vector<std::int64_t> free_abelian_image(const VertexKey& a) const override {
        return {parse(a).first};
    }
    std::int32_t free_abelian_rank() const override { return 1; }
};

// ---------------------------------------------------------------------------
// Lamplighter F2[X,X^-1] x| Z. Element (f, k): f = finite set of lit lamp
// positions, k = cursor. Product (f1,k1)(f2,k2) = (f1 + shift_{k1} f2, k1+k2),
// where shift moves supports to the right, so right multiplication by the
// cursor generator increases the position.

struct LampElem {
    std::vector<std::int64_t> lamps; // strictly increasing
    std::int64_t cursor = 0;
};

class LamplighterGroup final : public Group {
public:
    explicit LamplighterGroup(GroupSpec spec) : Group(spec) {}

    static LampElem parse(const VertexKey& key) {
        const auto parts = split(key, '|');
        if (parts.size() != 2) bad_element(key, "expected 'p1 p2 ...|k'");
        LampElem e;
        e.cursor = parse_int(parts[1], key);
        if (!parts[0].empty()) {
            std::istringstream in(parts[0]);
            std::string tok;
            while (in >> tok) e.lamps.push_back(parse_int(tok, key));
        }
        for (std::size_t i = 1; i < e.lamps.size(); ++i)
            if (e.lamps[i - 1] >= e.lamps[i])
                bad_element(key, "lamp positions must be strictly increasing");
        return e;
    }
    static VertexKey emit(const LampElem& e) {
        std::string out;
        for (std::size_t i = 0; i < e.lamps.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(e.lamps[i]);
        }
        out += '|';
        out += std::to_string(e.cursor);
        return out;
    }

    VertexKey identity() const override { return "|0"; }
    VertexKey multiply(const VertexKey& a, const VertexKey& b) const override {
        const LampElem ea = parse(a), eb = parse(b);
        // Symmetric difference of ea.lamps and eb.lamps shifted by ea.cursor.
        LampElem out;
        out.cursor = checked_add(ea.cursor, eb.cursor, "lamplighter");
        std::size_t i = 0, j = 0;
        while (i < ea.lamps.size() || j < eb.lamps.size()) {
            const std::int64_t va = i < ea.lamps.size() ? ea.lamps[i] : INT64_MAX;
            const std::int64_t vb = j < eb.lamps.size()
                                        ? checked_add(eb.lamps[j], ea.cursor, "lamplighter")
                                        : INT64_MAX;
            if (va < vb) {
                out.lamps.push_back(va);
                ++i;
            } else if (vb < va) {
                out.lamps.push_back(vb);
                ++j;
            } else {
                ++i;
                ++j;
            }
        }
        return emit(out);
    }
    VertexKey inverse(const VertexKey& a) const override {
        const LampElem e = parse(a);
        LampElem out;
        out.cursor = -e.cursor;
        for (std::int64_t p : e.lamps)
            out.lamps.push_back(checked_add(p, -e.cursor, "lamplighter"));
        std::sort(out.lamps.begin(), out.lamps.end());
        return emit(out);
    }
    VertexKey canonicalize(const VertexKey& a) const override { return emit(parse(a)); }
    std::vector<std::int64_t> free_abelian_image(const VertexKey& a) const override {
        return {parse(a).cursor};
    }
    std::int32_t free_abelian_rank() const override { return 1; }
};

// ---------------------------------------------------------------------------
// The affine group generated by x -> 2x and x -> x+1 (a Baumslag-Solitar
// group of type (1,2)). Element (k, b) is the map x -> 2^k x + b with b a
// dyadic rational stored as num/2^e in lowest terms. Composition gives
// (k1,b1)(k2,b2) = (k1+k2, 2^{k1} b2 + b1).

struct Dyadic {
    std::int64_t num = 0;
    std::int64_t exp = 0; // denominator 2^exp, exp >= 0

    void normalize() {
        if (num == 0) {
            exp = 0;
            return;
        }
        while (exp > 0 && num % 2 == 0) {
            num /= 2;
            --exp;
        }
    }
    // this + 2^shift * other
    Dyadic add_scaled(const Dyadic& other, std::int64_t shift) const {
        Dyadic o = other;
        std::int64_t oexp = o.exp - shift; // other value = o.num / 2^oexp
        std::int64_t onum = o.num;
        if (oexp < 0) {
            onum = checked_shift(onum, -oexp, "affine group");
            oexp = 0;
        }
        const std::int64_t e = std::max(exp, oexp);
        const std::int64_t a = checked_shift(num, e - exp, "affine group");
        const std::int64_t b = checked_shift(onum, e - oexp, "affine group");
        Dyadic r{checked_add(a, b, "affine group"), e};
        r.normalize();
        return r;
    }
};

struct BS12Elem {
    std::int64_t k = 0;
    Dyadic b;
};

class BS12Group final : public Group {
public:
    explicit BS12Group(GroupSpec spec) : Group(spec) {}

    static BS12Elem parse(const VertexKey& key) {
        const auto parts = split(key, '|');
        if (parts.size() != 2) bad_element(key, "expected 'k|num/2^e'");
        BS12Elem e;
        e.k = parse_int(parts[0], key);
        const auto frac = split(parts[1], '/');
        if (frac.size() != 2 || frac[1].size() < 3 || frac[1][0] != '2' || frac[1][1] != '^')
            bad_element(key, "expected dyadic 'num/2^e'");
        e.b.num = parse_int(frac[0], key);
        e.b.exp = parse_int(frac[1].substr(2), key);
        if (e.b.exp < 0) bad_element(key, "negative denominator exponent");
        if (e.b.num == 0 && e.b.exp != 0) bad_element(key, "zero must be written 0/2^0");
        if (e.b.exp > 0 && e.b.num % 2 == 0) bad_element(key, "dyadic not in lowest terms");
        return e;
    }
    static VertexKey emit(const BS12Elem& e) {
        return std::to_string(e.k) + "|" + std::to_string(e.b.num) + "/2^" +
               std::to_string(e.b.exp);
    }

    VertexKey identity() const override { return "0|0/2^0"; }
    VertexKey multiply(const VertexKey& a, const VertexKey& b) const override {
        const BS12Elem x = parse(a), y = parse(b);
        BS12Elem out;
        out.k = checked_add(x.k, y.k, "affine group");
        out.b = x.b.add_scaled(y.b, x.k); // b1 + 2^{k1} b2
        return emit(out);
    }
    VertexKey inverse(const VertexKey& a) const override {
        const BS12Elem x = parse(a);
        // (k,b)^-1 = (-k, -b/2^k)
        BS12Elem out;
        out.k = -x.k;
        Dyadic nb{x.b.num == 0 ? 0 : -x.b.num, x.b.exp};
        out.b = Dyadic{0, 0}.add_scaled(nb, -x.k);
        return emit(out);
    }
    VertexKey canonicalize(const VertexKey& a) const override { return emit(parse(a)); }
    std::vector<std::int64_t> free_abelian_image(const VertexKey& a) const override {
        return {parse(a).k};
    }
    std::int32_t free_abelian_rank() const override { return 1; }
};

// ---------------------------------------------------------------------------
// q-regular tree with a fixed end. A vertex is reached from the base vertex
// by going m steps toward the end and then descending along a word w over
// child labels {0..q-2}; by convention child 0 of an ancestor is the one the
// base vertex hangs under, so a canonical pair has m = 0, w empty, or
// w[0] != '0'. The serialized form is "w|level" with level = m - |w| (the
// Busemann function of the end, increasing toward it).

struct TreeVertex {
    std::int64_t m = 0;
    std::string word;
};

TreeVertex tree_parse(const VertexKey& key, std::int32_t q) {
    const auto parts = split(key, '|');
    if (parts.size() != 2) bad_element(key, "expected 'word|level'");
    const std::int64_t level = parse_int(parts[1], key);
    TreeVertex v;
    v.word = parts[0];
    for (char c : v.word)
        if (c < '0' || c >= '0' + (q - 1)) bad_element(key, "child label out of range");
    v.m = level + static_cast<std::int64_t>(v.word.size());
    if (v.m < 0) bad_element(key, "level below the base ray");
    if (v.m > 0 && !v.word.empty() && v.word[0] == '0')
        bad_element(key, "non-canonical descent through the base ray");
    return v;
}

VertexKey tree_emit(const TreeVertex& v) {
    return v.word + "|" + std::to_string(v.m - static_cast<std::int64_t>(v.word.size()));
}

// ---------------------------------------------------------------------------
// Direction expansion for Cayley oracles

struct DirectionTable {
    std::vector<VertexKey> directions;        // distinct, fixed order
    std::vector<std::int32_t> multiplicities; // per direction
    std::int64_t total = 0;                   // sum of multiplicities
};

DirectionTable expand_directions(const Group& group, const GeneratingSet& gens) {
    if (gens.generators.empty()) throw DataError("generating set is empty");
    std::vector<VertexKey> canonical;
    const VertexKey id = group.identity();
    for (const VertexKey& g : gens.generators) {
        const VertexKey c = group.canonicalize(g);
        if (c == id) throw DataError("identity is never a generator");
        if (std::find(canonical.begin(), canonical.end(), c) != canonical.end())
            throw DataError("duplicate generator '" + c + "'");
        canonical.push_back(c);
    }

    DirectionTable table;
    auto push = [&](const VertexKey& u) {
        auto it = std::find(table.directions.begin(), table.directions.end(), u);
        if (it == table.directions.end()) {
            table.directions.push_back(u);
            table.multiplicities.push_back(1);
        } else if (gens.convention == EdgeConvention::serre) {
            ++table.multiplicities[it - table.directions.begin()];
        }
    };
    for (const VertexKey& s : canonical) push(s);
    for (const VertexKey& s : canonical) push(group.inverse(s));
    table.total = 0;
    for (std::int32_t m : table.multiplicities) table.total += m;
    return table;
}

class CayleyGraphOracle final : public GraphOracle {
public:
    CayleyGraphOracle(std::shared_ptr<const Group> group, const GeneratingSet& gens,
                      const WeightScheme& scheme)
        : group_(std::move(group)), table_(expand_directions(*group_, gens)) {
        const double c = scheme.scale;
        if (!(c > 0.0)) throw DataError("weight scale must be positive");
        vertex_weight_ = c;
        edge_weights_.resize(table_.directions.size());
        switch (scheme.kind) {
            case WeightScheme::Kind::combinatorial:
                // Constant degree: normalize so that m_V = 1.
                for (std::size_t i = 0; i < edge_weights_.size(); ++i)
                    edge_weights_[i] = c / static_cast<double>(table_.total);
                degree_bound_ = 1.0;
                break;
            case WeightScheme::Kind::unit:
                for (std::size_t i = 0; i < edge_weights_.size(); ++i) edge_weights_[i] = c;
                degree_bound_ = static_cast<double>(table_.total);
                break;
            case WeightScheme::Kind::markov: {
                std::vector<double> probs = scheme.markov_probabilities;
                if (probs.empty()) {
                    for (std::int32_t m : table_.multiplicities)
                        probs.push_back(static_cast<double>(m) /
                                        static_cast<double>(table_.total));
                }
                if (probs.size() != table_.directions.size())
                    throw ConsistencyError("markov probabilities must match the " +
                                           std::to_string(table_.directions.size()) +
                                           " distinct directions");
                double sum = 0.0;
                for (double p : probs) {
                    if (!(p > 0.0)) throw ConsistencyError("markov probabilities must be positive");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-12)
                    throw ConsistencyError("markov probabilities sum to " + std::to_string(sum) +
                                           ", expected 1");
                for (std::size_t i = 0; i < probs.size(); ++i) {
                    const VertexKey inv = group_->inverse(table_.directions[i]);
                    const auto it =
                        std::find(table_.directions.begin(), table_.directions.end(), inv);
                    const std::size_t j = it - table_.directions.begin();
                    if (std::abs(probs[i] - probs[j]) > 1e-12)
                        throw ConsistencyError("markov probabilities not symmetric on '" +
                                               table_.directions[i] + "'");
                    edge_weights_[i] = c * probs[i] / table_.multiplicities[i];
                }
                degree_bound_ = 1.0;
                break;
            }
        }
        descriptor_ = "cayley group=" + group_->spec().name() + " directions=" +
                      std::to_string(table_.directions.size()) + " degree=" +
                      std::to_string(table_.total) + " scheme=" + scheme.name();
    }

    std::vector<EdgeBundle> out_edges(const VertexKey& x) const override {
        std::vector<EdgeBundle> out;
        out.reserve(table_.directions.size());
        for (std::size_t i = 0; i < table_.directions.size(); ++i)
            out.push_back(EdgeBundle{group_->multiply(x, table_.directions[i]),
                                     edge_weights_[i], table_.multiplicities[i]});
        return out;
    }
    double vertex_weight(const VertexKey&) const override { return vertex_weight_; }
    double degree_bound() const override { return degree_bound_; }
    std::string descriptor() const override { return descriptor_; }

    const DirectionTable& directions() const { return table_; }

private:
    std::shared_ptr<const Group> group_;
    DirectionTable table_;
    std::vector<double> edge_weights_;
    double vertex_weight_ = 1.0;
    double degree_bound_ = 1.0;
    std::string descriptor_;
};

class RegularTreeOracle final : public GraphOracle {
public:
    RegularTreeOracle(std::int32_t q, const WeightScheme& scheme) : q_(q) {
        if (q < 3) throw DataError("regular_tree: degree must be >= 3");
        const double c = scheme.scale;
        if (!(c > 0.0)) throw DataError("weight scale must be positive");
        vertex_weight_ = c;
        switch (scheme.kind) {
            case WeightScheme::Kind::combinatorial:
                edge_weight_ = c / q;
                degree_bound_ = 1.0;
                break;
            case WeightScheme::Kind::unit:
                edge_weight_ = c;
                degree_bound_ = q;
                break;
            case WeightScheme::Kind::markov:
                if (!scheme.markov_probabilities.empty())
                    throw DataError("regular_tree supports only the uniform walk");
                edge_weight_ = c / q;
                degree_bound_ = 1.0;
                break;
        }
        descriptor_ = "tree q=" + std::to_string(q) + " scheme=" + scheme.name();
    }

    std::vector<EdgeBundle> out_edges(const VertexKey& x) const override {
        const TreeVertex v = tree_parse(x, q_);
        std::vector<EdgeBundle> out;
        out.reserve(q_);
        // Parent (toward the end).
        if (!v.word.empty()) {
            TreeVertex p{v.m, v.word.substr(0, v.word.size() - 1)};
            out.push_back({tree_emit(p), edge_weight_, 1});
        } else {
            out.push_back({tree_emit(TreeVertex{v.m + 1, ""}), edge_weight_, 1});
        }
        // Children.
        if (v.word.empty() && v.m > 0) {
            out.push_back({tree_emit(TreeVertex{v.m - 1, ""}), edge_weight_, 1});
            for (char c = '1'; c < '0' + (q_ - 1); ++c)
                out.push_back({tree_emit(TreeVertex{v.m, std::string(1, c)}), edge_weight_, 1});
        } else {
            for (char c = '0'; c < '0' + (q_ - 1); ++c)
                out.push_back({tree_emit(TreeVertex{v.m, v.word + c}), edge_weight_, 1});
        }
        return out;
    }
    double vertex_weight(const VertexKey&) const override { return vertex_weight_; }
    double degree_bound() const override { return degree_bound_; }
    std::string descriptor() const override { return descriptor_; }

private:
    std::int32_t q_;
    double edge_weight_ = 1.0;
    double vertex_weight_ = 1.0;
    double degree_bound_ = 1.0;
    std::string descriptor_;
};

} // namespace

std::string GroupSpec::name() const {
    switch (kind) {
        case GroupKind::int_lattice: return "int_lattice(" + std::to_string(lattice_dim) + ")";
        case GroupKind::int_cross_c2: return "int_cross_c2";
        case GroupKind::lamplighter: return "lamplighter";
        case GroupKind::baumslag_solitar_1_2: return "baumslag_solitar_1_2";
        case GroupKind::regular_tree: return "regular_tree(" + std::to_string(tree_degree) + ")";
    }
    return "unknown";
}

std::shared_ptr<const Group> make_group(const GroupSpec& spec) {
    switch (spec.kind) {
        case GroupKind::int_lattice: return std::make_shared<LatticeGroup>(spec);
        case GroupKind::int_cross_c2: return std::make_shared<CrossC2Group>(spec);
        case GroupKind::lamplighter: return std::make_shared<LamplighterGroup>(spec);
        case GroupKind::baumslag_solitar_1_2: return std::make_shared<BS12Group>(spec);
        case GroupKind::regular_tree:
            throw DataError("regular_tree is not a group; use make_cayley_oracle directly");
    }
    throw DataError("unknown group kind");
}

GeneratingSet builtin_generators(const GroupSpec& spec, const std::string& name,
                                 EdgeConvention convention) {
    GeneratingSet gens;
    gens.convention = convention;
    switch (spec.kind) {
        case GroupKind::int_lattice:
            if (name == "standard") {
                for (std::int32_t i = 0; i < spec.lattice_dim; ++i) {
                    std::string key;
                    for (std::int32_t j = 0; j < spec.lattice_dim; ++j) {
                        if (j) key += ',';
                        key += (i == j) ? "1" : "0";
                    }
                    gens.generators.push_back(key);
                }
                return gens;
            }
            break;
        case GroupKind::int_cross_c2:
            if (name == "ladder") {
                gens.generators = {"1|0", "0|1"};
                return gens;
            }
            if (name == "diagonal") {
                gens.generators = {"1|0", "0|1", "1|1", "-1|1"};
                return gens;
            }
            break;
        case GroupKind::lamplighter:
            if (name == "ac") {
                gens.generators = {"|1", "0|0"};
                return gens;
            }
            if (name == "ab") {
                gens.generators = {"|1", "1|1"};
                return gens;
            }
            break;
        case GroupKind::baumslag_solitar_1_2:
            if (name == "ab") {
                gens.generators = {"1|0/2^0", "0|1/2^0"};
                return gens;
            }
            break;
        case GroupKind::regular_tree:
            break;
    }
    throw DataError("no built-in generating set '" + name + "' for " + spec.name());
}

std::shared_ptr<const GraphOracle> make_cayley_oracle(const GroupSpec& spec,
                                                      const GeneratingSet& gens,
                                                      const WeightScheme& scheme) {
    if (spec.kind == GroupKind::regular_tree)
        return std::make_shared<RegularTreeOracle>(spec.tree_degree, scheme);
    return std::make_shared<CayleyGraphOracle>(make_group(spec), gens, scheme);
}

// ---------------------------------------------------------------------------
// Heights

HeightCertificate certify_height(const Group& group, const GeneratingSet& gens,
                                 const HeightSpec& height) {
    HeightCertificate cert;
    if (height.kind != HeightSpec::Kind::homomorphism)
        throw DataError("certify_height requires a homomorphism height");
    if (height.generator_heights.size() != gens.generators.size())
        throw DataError("one height value per generator required");

    const std::int32_t rank = group.free_abelian_rank();
    std::vector<std::vector<std::int64_t>> images;
    std::vector<VertexKey> canonical;
    for (const VertexKey& g : gens.generators) {
        canonical.push_back(group.canonicalize(g));
        images.push_back(group.free_abelian_image(canonical.back()));
    }

    // Solve <c, image_i> = h_i for an integer covector c. Any homomorphism
    // to Z kills torsion and commutators, so it factors through these images.
    std::vector<std::int64_t> covector(rank, 0);
    if (rank == 1) {
        bool have = false;
        for (std::size_t i = 0; i < images.size(); ++i) {
            if (images[i][0] == 0) continue;
            if (height.generator_heights[i] % images[i][0] != 0) {
                cert.detail = "height of generator '" + canonical[i] +
                              "' does not extend to a homomorphism";
                return cert;
            }
            const std::int64_t a = height.generator_heights[i] / images[i][0];
            if (have && a != covector[0]) {
                cert.detail = "heights are inconsistent at generator '" + canonical[i] + "'";
                return cert;
            }
            covector[0] = a;
            have = true;
        }
    } else {
        // Least squares on doubles, rounded and verified exactly below. The
        // generators span R^rank, so the solution is unique when consistent.
        std::vector<std::vector<double>> ata(rank, std::vector<double>(rank, 0.0));
        std::vector<double> atb(rank, 0.0);
        for (std::size_t i = 0; i < images.size(); ++i)
            for (std::int32_t r = 0; r < rank; ++r) {
                for (std::int32_t s = 0; s < rank; ++s)
                    ata[r][s] += static_cast<double>(images[i][r]) * images[i][s];
                atb[r] += static_cast<double>(images[i][r]) * height.generator_heights[i];
            }
        // Gaussian elimination.
        for (std::int32_t col = 0; col < rank; ++col) {
            std::int32_t pivot = col;
            for (std::int32_t r = col + 1; r < rank; ++r)
                if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
            std::swap(ata[col], ata[pivot]);
            std::swap(atb[col], atb[pivot]);
            if (std::abs(ata[col][col]) < 1e-12) {
                cert.detail = "generators do not determine the height homomorphism";
                return cert;
            }
            for (std::int32_t r = 0; r < rank; ++r) {
                if (r == col) continue;
                const double f = ata[r][col] / ata[col][col];
                for (std::int32_t s = col; s < rank; ++s) ata[r][s] -= f * ata[col][s];
                atb[r] -= f * atb[col];
            }
        }
        for (std::int32_t r = 0; r < rank; ++r)
            covector[r] = std::llround(atb[r] / ata[r][r]);
    }

    // Exact consistency of every generator against the covector.
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::int64_t v = 0;
        for (std::int32_t r = 0; r < rank; ++r)
            v = checked_add(v, covector[r] * images[i][r], "height");
        if (v != height.generator_heights[i]) {
            cert.detail = "height of generator '" + canonical[i] +
                          "' does not extend to a homomorphism";
            return cert;
        }
    }

    // Split form S = {t} u K: all heights in {-1,0,1} with exactly one
    // height-one generator up to inverse.
    std::vector<std::size_t> raisers;
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        const std::int64_t h = height.generator_heights[i];
        if (h != -1 && h != 0 && h != 1) {
            cert.detail = "generator '" + canonical[i] + "' has |height| > 1";
            return cert;
        }
        if (h != 0) raisers.push_back(i);
    }
    if (raisers.empty()) {
        cert.detail = "no generator of height 1: heights cannot reach all levels";
        return cert;
    }
    const VertexKey first = canonical[raisers[0]];
    const VertexKey first_inv = group.inverse(first);
    for (std::size_t idx : raisers)
        if (canonical[idx] != first && canonical[idx] != first_inv) {
            cert.detail = "two height-raising generators: '" + first + "' and '" +
                          canonical[idx] + "'";
            return cert;
        }

    cert.accepted = true;
    cert.covector = covector;
    cert.raising_generator =
        height.generator_heights[raisers[0]] == 1 ? first : first_inv;
    cert.detail = "split generating set certified; the axioms hold at every vertex";
    return cert;
}

std::int64_t evaluate_height(const Group& group, const HeightCertificate& cert,
                             const VertexKey& x) {
    if (!cert.accepted) throw DataError("evaluate_height: certificate was rejected");
    const auto image = group.free_abelian_image(x);
    std::int64_t v = 0;
    for (std::size_t r = 0; r < image.size(); ++r)
        v = checked_add(v, cert.covector[r] * image[r], "height");
    return v;
}

std::int64_t tree_busemann_height(const VertexKey& x) {
    const auto parts = split(x, '|');
    if (parts.size() != 2) bad_element(x, "expected 'word|level'");
    return parse_int(parts[1], x);
}

std::vector<std::int64_t> height_table(const Patch& patch,
                                       const std::function<std::int64_t(const VertexKey&)>& h) {
    std::vector<std::int64_t> out(patch.size());
    for (std::int32_t v = 0; v < patch.size(); ++v) out[v] = h(patch.keys[v]);
    return out;
}

HeightAxiomReport verify_height_axioms(const Patch& patch,
                                       const std::vector<std::int64_t>& heights,
                                       const Region& sample) {
    require_complete_window(patch, sample, "verify_height_axioms");
    HeightAxiomReport report;
    auto adjacent = [&](std::int32_t x, std::int32_t y) {
        for (const Patch::Arc& a : patch.adjacency[x])
            if (a.to == y) return true;
        return false;
    };
    for (std::int32_t b : sample.members) {
        ++report.checked;
        const auto nbrs = patch.neighbors(b);
        std::int32_t raising = 0, lowering = 0;
        for (std::int32_t c : nbrs) {
            if (heights[c] == heights[b] + 1) ++raising;
            if (heights[c] == heights[b] - 1) ++lowering;
        }
        if (raising != 1)
            report.violations.push_back({b, 'B',
                                         std::to_string(raising) +
                                             " neighbors raise the height at '" +
                                             patch.keys[b] + "'"});
        if (lowering < 1)
            report.violations.push_back(
                {b, 'C', "no neighbor lowers the height at '" + patch.keys[b] + "'"});
        // Pairs at distance <= 2 through b.
        std::vector<std::int32_t> ball(nbrs);
        ball.push_back(b);
        for (std::size_t i = 0; i < ball.size(); ++i)
            for (std::size_t j = i + 1; j < ball.size(); ++j) {
                const std::int32_t x = ball[i], y = ball[j];
                const std::int64_t gap = std::llabs(heights[x] - heights[y]);
                const std::int32_t d = (x == b || y == b || adjacent(x, y)) ? 1 : 2;
                if (gap > d)
                    report.violations.push_back(
                        {b, 'A', "height gap " + std::to_string(gap) + " between '" +
                                     patch.keys[x] + "' and '" + patch.keys[y] +
                                     "' at distance " + std::to_string(d)});
            }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Folner sets

namespace {

std::int64_t ipow(std::int64_t base, std::int32_t e) {
    std::int64_t v = 1;
    while (e-- > 0) v *= base;
    return v;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    while (b) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

} // namespace

FolnerSet folner_set(const GroupSpec& spec, const GeneratingSet& gens, std::int32_t n) {
    if (n < 1) throw DataError("folner_set: n must be >= 1");
    if (spec.kind == GroupKind::regular_tree)
        throw DataError("folner_set: non-amenable built-in (regular tree)");

    FolnerSet out;
    std::function<bool(const VertexKey&)> member;

    switch (spec.kind) {
        case GroupKind::int_lattice: {
            const std::int32_t d = spec.lattice_dim;
            std::vector<std::int64_t> coords(d, -n);
            while (true) {
                LatticeElem e{coords};
                out.vertices.push_back(LatticeGroup::emit(e));
                std::int32_t i = 0;
                while (i < d && ++coords[i] > n) coords[i++] = -n;
                if (i == d) break;
            }
            member = [d, n](const VertexKey& key) {
                const auto parts = split(key, ',');
                for (const auto& p : parts)
                    if (std::llabs(parse_int(p, key)) > n) return false;
                return static_cast<std::int32_t>(parts.size()) == d;
            };
            break;
        }
        case GroupKind::int_cross_c2: {
            for (std::int64_t k = -n; k <= n; ++k)
                for (int bit = 0; bit <= 1; ++bit)
                    out.vertices.push_back(CrossC2Group::emit(k, bit));
            member = [n](const VertexKey& key) {
                return std::llabs(CrossC2Group::parse(key).first) <= n;
            };
            break;
        }
        case GroupKind::lamplighter: {
            const std::int32_t window = 2 * n + 1;
            if (window > 24) throw ResourceError("folner_set: lamplighter window too large");
            for (std::int64_t k = -n; k <= n; ++k)
                for (std::uint64_t mask = 0; mask < (1ull << window); ++mask) {
                    LampElem e;
                    e.cursor = k;
                    for (std::int32_t b = 0; b < window; ++b)
                        if (mask & (1ull << b)) e.lamps.push_back(b - n);
                    out.vertices.push_back(LamplighterGroup::emit(e));
                }
            member = [n](const VertexKey& key) {
                const LampElem e = LamplighterGroup::parse(key);
                if (std::llabs(e.cursor) > n) return false;
                for (std::int64_t p : e.lamps)
                    if (std::llabs(p) > n) return false;
                return true;
            };
            break;
        }
        case GroupKind::baumslag_solitar_1_2: {
            // Box family: |k| <= n, b in 2^-n Z with |b| <= (n+1) 2^n. The
            // range of b absorbs the b-translations 2^k, |k| <= n, while the
            // grid 2^-n Z absorbs them exactly, so the boundary fraction
            // decays in n.
            const std::int64_t M = (n + 1) * ipow(4, n); // |num * 2^{n-exp}| bound
            for (std::int64_t k = -n; k <= n; ++k)
                for (std::int64_t m = -M; m <= M; ++m) {
                    Dyadic b{m, n};
                    b.normalize();
                    out.vertices.push_back(BS12Group::emit(BS12Elem{k, b}));
                }
            member = [n, M](const VertexKey& key) {
                const BS12Elem e = BS12Group::parse(key);
                if (std::llabs(e.k) > n) return false;
                if (e.b.exp > n) return false;
                const std::int64_t num = checked_shift(e.b.num, n - e.b.exp, "folner");
                return std::llabs(num) <= M;
            };
            break;
        }
        case GroupKind::regular_tree:
            break; // unreachable
    }

    const auto oracle = make_cayley_oracle(spec, gens, WeightScheme::unit());
    for (const VertexKey& v : out.vertices)
        for (const EdgeBundle& e : oracle->out_edges(v))
            if (!member(e.terminus)) {
                ++out.boundary_size;
                break;
            }
    const std::int64_t size = static_cast<std::int64_t>(out.vertices.size());
    const std::int64_t g = std::max<std::int64_t>(1, gcd64(out.boundary_size, size));
    out.ratio_num = out.boundary_size / g;
    out.ratio_den = size / g;
    return out;
}

TransversalFamily lattice_mod_family(std::int32_t dim, std::int64_t modulus) {
    if (modulus < 1) throw DataError("lattice_mod_family: modulus must be >= 1");
    TransversalFamily f;
    f.orbit_count = static_cast<std::int32_t>(ipow(modulus, dim));
    f.orbit_of = [dim, modulus](const VertexKey& key) -> std::int32_t {
        const auto parts = split(key, ',');
        if (static_cast<std::int32_t>(parts.size()) != dim) return -1;
        std::int64_t orbit = 0;
        for (const auto& p : parts) {
            const std::int64_t c = parse_int(p, key);
            orbit = orbit * modulus + ((c % modulus) + modulus) % modulus;
        }
        return static_cast<std::int32_t>(orbit);
    };
    return f;
}

TransversalFamily cross_c2_bit_family() {
    TransversalFamily f;
    f.orbit_count = 2;
    f.orbit_of = [](const VertexKey& key) -> std::int32_t {
        return CrossC2Group::parse(key).second;
    };
    return f;
}

} // namespace cayley
