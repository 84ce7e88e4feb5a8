#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fracsol/error.hpp"
#include "fracsol/io.hpp"

namespace fracsol {

namespace {

constexpr char kMagic[4] = {'F', 'L', 'D', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>((v >> (8 * k)) & 0xFFU));
}

void put_f64(std::vector<unsigned char>& out, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<unsigned char>((bits >> (8 * k)) & 0xFFU));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(p[k]) << (8 * k);
    return v;
}

double get_f64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(p[k]) << (8 * k);
    return std::bit_cast<double>(v);
}

[[noreturn]] void fail_format(const std::string& what) { throw Error(ErrorKind::io, "field file: " + what); }

}  // namespace

nlohmann::json domain_to_json(const DomainSpec& d) {
    nlohmann::json j;
    j["kind"] = to_string(d.kind);
    j["scale"] = d.scale;
    switch (d.kind) {
        case DomainKind::rectangle:
            j["L1"] = d.a;
            j["L2"] = d.b;
            break;
        case DomainKind::strip:
            j["width"] = d.a;
            j["length"] = d.b;
            break;
        case DomainKind::parallelogram:
            j["h1"] = {d.h1.x, d.h1.y};
            j["h2"] = {d.h2.x, d.h2.y};
            break;
        case DomainKind::equilateral_triangle:
            j["side"] = d.a;
            break;
        case DomainKind::triangle_30_60_90:
            j["hypotenuse"] = d.a;
            break;
    }
    return j;
}

DomainSpec domain_from_json(const nlohmann::json& j) {
    const DomainKind kind = domain_kind_from_string(j.at("kind").get<std::string>());
    const double scale = j.at("scale").get<double>();
    auto vec = [&](const char* key) {
        const auto& a = j.at(key);
        if (!a.is_array() || a.size() != 2) fail_validation(std::string("domain.") + key + " must be a 2-vector");
        return Vec2{a[0].get<double>(), a[1].get<double>()};
    };
    DomainSpec d;
    switch (kind) {
        case DomainKind::rectangle:
            d = DomainSpec::rectangle(j.at("L1").get<double>(), j.at("L2").get<double>(), scale);
            break;
        case DomainKind::strip:
            d = DomainSpec::strip(j.at("width").get<double>(), j.at("length").get<double>(), scale);
            break;
        case DomainKind::parallelogram:
            d = DomainSpec::parallelogram(vec("h1"), vec("h2"), scale);
            break;
        case DomainKind::equilateral_triangle:
            d = DomainSpec::equilateral_triangle(j.at("side").get<double>(), scale);
            break;
        case DomainKind::triangle_30_60_90:
            d = DomainSpec::triangle_30_60_90(j.at("hypotenuse").get<double>(), scale);
            break;
    }
    d.validate();
    return d;
}

nlohmann::json bc_to_json(const BoundaryCondition& bc) {
    nlohmann::json j;
    j["regime"] = to_string(bc.regime);
    if (bc.regime == Regime::quasi_periodic) j["theta"] = {bc.theta1, bc.theta2};
    if (bc.regime == Regime::mixed_dn) j["dirichlet_axis"] = bc.dirichlet_axis;
    return j;
}

BoundaryCondition bc_from_json(const nlohmann::json& j) {
    const Regime r = regime_from_string(j.at("regime").get<std::string>());
    switch (r) {
        case Regime::neumann: return BoundaryCondition::neumann();
        case Regime::dirichlet: return BoundaryCondition::dirichlet();
        case Regime::periodic: return BoundaryCondition::periodic();
        case Regime::quasi_periodic: {
            const auto& t = j.at("theta");
            if (!t.is_array() || t.size() != 2) fail_validation("bc.theta must be a pair of phases");
            return BoundaryCondition::quasi_periodic(t[0].get<double>(), t[1].get<double>());
        }
        case Regime::mixed_dn: return BoundaryCondition::mixed_dn(j.at("dirichlet_axis").get<int>());
    }
    return {};
}

std::vector<unsigned char> encode_field(const Field& u, const FieldMeta& meta) {
    const Grid& g = u.grid();
    nlohmann::json h;
    h["domain"] = domain_to_json(g.domain);
    h["bc"] = bc_to_json(meta.bc);
    h["dims"] = {g.dims[0], g.dims[1]};
    h["s"] = meta.s;
    h["q"] = meta.q;
    h["scalar_kind"] = u.is_complex() ? "complex" : "real";
    h["lambda"] = meta.lambda;
    h["residual"] = meta.residual;
    h["provenance"] = meta.provenance;
    const std::string text = h.dump();
    std::vector<unsigned char> out(kMagic, kMagic + 4);
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out.insert(out.end(), text.begin(), text.end());
    out.reserve(out.size() + u.size() * 8 * (u.is_complex() ? 2 : 1));
    for (std::size_t n = 0; n < u.size(); ++n) {
        put_f64(out, u.re()[n]);
        if (u.is_complex()) put_f64(out, u.im()[n]);
    }
    return out;
}

FieldFile decode_field(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) fail_format("bad magic");
    const std::uint32_t hl = get_u32(bytes.data() + 4);
    if (bytes.size() < 8ULL + hl) fail_format("truncated header");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + hl);
    } catch (const nlohmann::json::exception& e) {
        fail_format(std::string("header is not valid JSON: ") + e.what());
    }
    FieldFile f;
    try {
        const DomainSpec dom = domain_from_json(h.at("domain"));
        f.meta.bc = bc_from_json(h.at("bc"));
        const auto& d = h.at("dims");
        const std::array<int, 2> dims{d.at(0).get<int>(), d.at(1).get<int>()};
        f.meta.s = h.at("s").get<double>();
        f.meta.q = h.at("q").get<double>();
        f.meta.lambda = h.at("lambda").get<double>();
        f.meta.residual = h.at("residual").get<double>();
        f.meta.provenance = h.value("provenance", nlohmann::json::object());
        const std::string kind = h.at("scalar_kind").get<std::string>();
        if (kind != "real" && kind != "complex") fail_format("scalar_kind must be real or complex");
        const bool complex = kind == "complex";
        const GridPtr grid = build_grid_dims(dom, dims);
        const std::size_t n = grid->size();
        const std::size_t want = n * 8 * (complex ? 2 : 1);
        if (bytes.size() - 8 - hl != want) fail_format("payload length does not match dims");
        std::vector<double> re(n), im(complex ? n : 0);
        const unsigned char* p = bytes.data() + 8 + hl;
        for (std::size_t k = 0; k < n; ++k) {
            re[k] = get_f64(p);
            p += 8;
            if (complex) {
                im[k] = get_f64(p);
                p += 8;
            }
        }
        f.field = Field(grid, std::move(re), std::move(im));
    } catch (const nlohmann::json::exception& e) {
        fail_format(std::string("header field missing or mistyped: ") + e.what());
    }
    return f;
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    const std::string text = j.dump(2) + "\n";
    write_bytes(path, std::vector<unsigned char>(text.begin(), text.end()));
}

void write_field_file(const std::filesystem::path& path, const Field& u, const FieldMeta& meta) {
    write_bytes(path, encode_field(u, meta));
}

FieldFile read_field_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::io, "cannot open field file '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_field(bytes);
}

}  // namespace fracsol
