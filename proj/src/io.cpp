#include "cayley/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace cayley {

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), compact single-buffer implementation.

namespace {

constexpr std::array<std::uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

} // namespace

std::string sha256_hex(const std::string& bytes) {
    std::array<std::uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                      0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::string data = bytes;
    const std::uint64_t bit_len = static_cast<std::uint64_t>(bytes.size()) * 8;
    data.push_back('\x80');
    while (data.size() % 64 != 56) data.push_back('\0');
    for (int i = 7; i >= 0; --i) data.push_back(static_cast<char>((bit_len >> (8 * i)) & 0xff));

    std::array<std::uint32_t, 64> w{};
    for (std::size_t block = 0; block < data.size(); block += 64) {
        for (int t = 0; t < 16; ++t)
            w[t] = (static_cast<std::uint32_t>(static_cast<unsigned char>(data[block + 4 * t])) << 24) |
                   (static_cast<std::uint32_t>(static_cast<unsigned char>(data[block + 4 * t + 1])) << 16) |
                   (static_cast<std::uint32_t>(static_cast<unsigned char>(data[block + 4 * t + 2])) << 8) |
                   static_cast<std::uint32_t>(static_cast<unsigned char>(data[block + 4 * t + 3]));
        for (int t = 16; t < 64; ++t) {
            const std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
            const std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
            w[t] = w[t - 16] + s0 + w[t - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, hh] = h;
        for (int t = 0; t < 64; ++t) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t temp1 = hh + s1 + ch + kSha256K[t] + w[t];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t temp2 = s0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + temp1;
            d = c;
            c = b;
            b = a;
            a = temp1 + temp2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }
    std::string hex;
    hex.reserve(64);
    for (std::uint32_t word : h) {
        char buf[9];
        std::snprintf(buf, sizeof(buf), "%08x", word);
        hex += buf;
    }
    return hex;
}

// ---------------------------------------------------------------------------

std::string serialize_patch(const Patch& patch) {
    std::ostringstream out;
    out << "cayleylab-patch version 1\n";
    out << "oracle " << patch.oracle_descriptor << "\n";
    out << "radius " << patch.radius << "\n";
    out << "core " << patch.core_size << "\n";
    out << "vertices " << patch.size() << "\n";
    for (const VertexKey& key : patch.keys) out << key << "\n";
    std::int64_t arcs = 0;
    for (const auto& list : patch.adjacency) arcs += static_cast<std::int64_t>(list.size());
    out << "adjacency " << arcs << "\n";
    for (std::int32_t v = 0; v < patch.size(); ++v)
        for (const Patch::Arc& a : patch.adjacency[v])
            out << v << " " << a.to << " " << format_double(a.weight) << " " << a.multiplicity
                << "\n";
    out << "vertex_weights\n";
    for (double w : patch.vertex_weights) out << format_double(w) << "\n";
    out << "frontier\n";
    for (std::uint8_t f : patch.frontier) out << int(f) << "\n";
    return out.str();
}

std::string serialize_compressed(const CompressedOperator& op) {
    std::ostringstream out;
    out << "cayleylab-compressed version 1\n";
    out << "region " << op.region_keys.size() << "\n";
    for (const VertexKey& key : op.region_keys) out << key << "\n";
    out << "exterior " << op.exterior_keys.size() << "\n";
    for (const VertexKey& key : op.exterior_keys) out << key << "\n";
    out << "vertex_weights\n";
    for (std::int64_t i = 0; i < op.vertex_weights.size(); ++i)
        out << format_double(op.vertex_weights(i)) << "\n";
    out << "interior row-major\n";
    for (std::int64_t i = 0; i < op.interior.rows(); ++i) {
        for (std::int64_t j = 0; j < op.interior.cols(); ++j)
            out << (j ? " " : "") << format_double(op.interior(i, j));
        out << "\n";
    }
    out << "coupling row-major\n";
    for (std::int64_t i = 0; i < op.coupling.rows(); ++i) {
        for (std::int64_t j = 0; j < op.coupling.cols(); ++j)
            out << (j ? " " : "") << format_double(op.coupling(i, j));
        out << "\n";
    }
    return out.str();
}

std::string serialize_certificate(const ExhaustionCertificate& cert) {
    std::ostringstream out;
    out << "cayleylab-exhaustion version 1\n";
    out << "steps " << cert.steps.size() << "\n";
    for (const auto& step : cert.steps) out << step.witness << "\t" << step.removed << "\n";
    return out.str();
}

ExhaustionCertificate parse_certificate(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("cayleylab-exhaustion", 0) != 0)
        throw DataError("certificate: bad header");
    if (!std::getline(in, line) || line.rfind("steps ", 0) != 0)
        throw DataError("certificate: missing step count");
    ExhaustionCertificate cert;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError("certificate: malformed step line");
        cert.steps.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return cert;
}

std::string serialize_curve(const IDSCurve& curve) {
    std::ostringstream out;
    out << "# cayleylab-ids version 1\n";
    out << "# provenance: " << curve.provenance << "\n";
    out << "# region_size: " << curve.region_size << "\n";
    out << "# domain_size: " << curve.domain_size << "\n";
    out << "# normalization: tau1; multiply by domain_size for tau\n";
    out << "# columns: lambda N\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << format_double(curve.grid[i]) << " " << format_double(curve.values[i]) << "\n";
    return out.str();
}

namespace {

const char* status_name(UniquenessVerdict::Status s) {
    switch (s) {
        case UniquenessVerdict::Status::unique: return "unique";
        case UniquenessVerdict::Status::witness: return "witness";
        case UniquenessVerdict::Status::numerically_marginal: return "numerically_marginal";
    }
    return "unknown";
}

} // namespace

std::string serialize_verdict(const UniquenessVerdict& verdict, double lambda) {
    std::ostringstream out;
    out << "cayleylab-verdict version 1\n";
    out << "lambda: " << format_double(lambda) << "\n";
    out << "status: " << status_name(verdict.status) << "\n";
    out << "min_singular_value: " << format_double(verdict.min_singular_value) << "\n";
    out << "scale: " << format_double(verdict.scale) << "\n";
    out << "tolerance: " << format_double(verdict.tolerance) << "\n";
    if (verdict.status == UniquenessVerdict::Status::witness) {
        out << "kernel_dimension: " << verdict.kernel_basis.cols() << "\n";
        for (std::int64_t c = 0; c < verdict.kernel_basis.cols(); ++c) {
            out << "kernel_vector_" << c << ":";
            for (std::int64_t r = 0; r < verdict.kernel_basis.rows(); ++r)
                out << " " << format_double(verdict.kernel_basis(r, c));
            out << "\n";
        }
    }
    return out.str();
}

std::string serialize_eigen_report(const EigenReport& report) {
    std::ostringstream out;
    out << "cayleylab-eigenreport version 1\n";
    out << "region_size: " << report.region_size << "\n";
    out << "residual_bound: " << format_double(report.residual_bound) << "\n";
    out << "clusters " << report.clusters.size() << "\n";
    for (const auto& [value, mult] : report.clusters)
        out << format_double(value) << " " << mult << "\n";
    out << "eigenvalues " << report.eigenvalues.size() << "\n";
    for (std::int64_t i = 0; i < report.eigenvalues.size(); ++i)
        out << format_double(report.eigenvalues(i)) << "\n";
    return out.str();
}

std::string serialize_search(const EigenfunctionSearch& search, const CompressedOperator& op) {
    std::ostringstream out;
    out << "cayleylab-eigensearch version 1\n";
    out << "region_size: " << op.size() << "\n";
    out << "cluster_tol: " << format_double(search.cluster_tol) << "\n";
    out << "residual_tol: " << format_double(search.residual_tol) << "\n";
    out << "min_residual_seen: " << format_double(search.min_residual_seen) << "\n";
    out << "hits " << search.hits.size() << "\n";
    for (const EigenfunctionHit& hit : search.hits) {
        out << "lambda: " << format_double(hit.lambda) << " multiplicity: " << hit.multiplicity
            << " coupling_residual: " << format_double(hit.coupling_residual) << "\n";
        for (std::int64_t c = 0; c < hit.basis.cols(); ++c) {
            out << "vector:";
            for (std::int64_t r = 0; r < hit.basis.rows(); ++r) {
                out << " " << op.region_keys[r] << "=" << format_double(hit.basis(r, c));
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string serialize_jump_report(const JumpReport& report) {
    std::ostringstream out;
    out << "cayleylab-jumps version 1\n";
    out << "window: " << format_double(report.window) << "\n";
    out << "threshold: " << format_double(report.threshold) << "\n";
    out << "candidates " << report.candidates.size() << "\n";
    for (const JumpCandidate& cand : report.candidates) {
        out << "lambda: " << format_double(cand.lambda) << " stable: "
            << (cand.stable ? "yes" : "no") << " masses:";
        for (double m : cand.masses) out << " " << format_double(m);
        out << "\n";
    }
    return out.str();
}

std::string serialize_bound_report(const BoundReport& report) {
    std::ostringstream out;
    out << "cayleylab-bound version 1\n";
    out << "lambda: " << format_double(report.lambda) << "\n";
    out << "applicable: " << (report.applicable ? "yes" : "no (uniqueness fails)") << "\n";
    out << "boundary2: " << report.boundary2 << "\n";
    out << "packing: " << report.packing << "\n";
    out << "bound_tau: " << format_double(report.bound_tau) << "\n";
    out << "empirical_mass_tau: " << format_double(report.empirical_mass_tau) << "\n";
    out << "empirical_mass_tau1: " << format_double(report.empirical_mass_tau1) << "\n";
    out << "tolerance: " << format_double(report.tol) << "\n";
    out << "uniqueness_sigma_min: " << format_double(report.verdict.min_singular_value) << "\n";
    if (report.applicable) out << "pass: " << (report.pass ? "yes" : "no") << "\n";
    return out.str();
}

} // namespace cayley
