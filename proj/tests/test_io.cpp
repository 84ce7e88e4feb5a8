#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "fracsol/commands.hpp"
#include "fracsol/config.hpp"
#include "fracsol/io.hpp"
#include "helpers.hpp"

using namespace fracsol;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "fracsol_test_io" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "run.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

json small_square() {
    return json{{"domain", {{"kind", "rectangle"}, {"scale", 1.0}}},
                {"bc", {{"regime", "neumann"}}},
                {"grid", {{"resolution", 16}}},
                {"s", 0.5},
                {"q", 4.0},
                {"seed", 3},
                {"output", {{"name", "sq"}}}};
}

std::vector<unsigned char> slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& p) {
    std::ifstream is(p);
    return json::parse(is);
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::io;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("field file round trip is bit exact") {
    const auto g = build_grid_dims(DomainSpec::rectangle(1, 1.5, 2.0), {8, 10});
    for (bool complex : {false, true}) {
        Field u = testing::random_field(g, 5, complex);
        u.re()[0] = -0.0;
        u.re()[1] = std::numeric_limits<double>::denorm_min();
        u.re()[2] = 1e300;
        FieldMeta m;
        m.bc = complex ? BoundaryCondition::quasi_periodic(0.3, 1.2) : BoundaryCondition::neumann();
        m.s = 0.4;
        m.q = 3.0;
        m.lambda = 1.25;
        m.residual = 1e-9;
        m.provenance = {{"command", "test"}};
        const auto bytes = encode_field(u, m);
        const FieldFile back = decode_field(bytes);
        REQUIRE(back.field.size() == u.size());
        REQUIRE(back.field.is_complex() == complex);
        CHECK(std::memcmp(back.field.re().data(), u.re().data(), u.size() * 8) == 0);
        if (complex) CHECK(std::memcmp(back.field.im().data(), u.im().data(), u.size() * 8) == 0);
        CHECK(back.field.grid().dims == g->dims);
        CHECK(back.meta.lambda == m.lambda);
        CHECK(back.meta.bc.theta2 == m.bc.theta2);
        CHECK(encode_field(back.field, back.meta) == bytes);

        // layout: magic, u32 little-endian header length, JSON header, float64 payload
        REQUIRE(std::memcmp(bytes.data(), "FLD1", 4) == 0);
        const std::uint32_t hl = bytes[4] | (bytes[5] << 8) | (bytes[6] << 16) | (static_cast<std::uint32_t>(bytes[7]) << 24);
        const json h = json::parse(bytes.begin() + 8, bytes.begin() + 8 + hl);
        for (const char* key : {"domain", "bc", "dims", "s", "q", "scalar_kind", "lambda", "residual", "provenance"}) {
            CHECK(h.contains(key));
        }
        CHECK(h["scalar_kind"] == (complex ? "complex" : "real"));
        CHECK(bytes.size() - 8 - hl == u.size() * 8 * (complex ? 2 : 1));
        double first = 0.0;
        std::memcpy(&first, bytes.data() + 8 + hl + 8 * (complex ? 6 : 3), 8);
        CHECK(first == u.re()[3]);
    }
}

TEST_CASE("field file format errors") {
    const auto g = build_grid(DomainSpec::rectangle(1, 1), 8);
    const auto bytes = encode_field(testing::random_field(g, 1), FieldMeta{});
    auto bad = bytes;
    bad[0] = 'X';
    CHECK(kind_of([&] { decode_field(bad); }) == ErrorKind::io);
    auto cut = bytes;
    cut.resize(cut.size() - 3);
    CHECK(message_of([&] { decode_field(cut); }).find("payload length") != std::string::npos);
    auto shorthead = std::vector<unsigned char>(bytes.begin(), bytes.begin() + 20);
    CHECK(kind_of([&] { decode_field(shorthead); }) == ErrorKind::io);
    CHECK(kind_of([&] { read_field_file("/nonexistent/x.fld"); }) == ErrorKind::io);
}

TEST_CASE("config parsing") {
    const RunConfig c = parse_config(small_square().dump(), ".");
    CHECK(c.solve.s == 0.5);
    CHECK(c.name == "sq");
    CHECK(c.solve.seed == 3);

    json j = small_square();
    j["solver"] = {{"max_iter", 10}};
    CHECK(message_of([&] { parse_config(j.dump(), "."); }).find("unknown key 'solver.max_iter'") != std::string::npos);

    const std::string broken = "{\n  \"s\": 0.5,\n  \"q\": 4,\n  oops\n}";
    CHECK(message_of([&] { parse_config(broken, "."); }).find("line 4") != std::string::npos);

    j = small_square();
    j.erase("s");
    CHECK(message_of([&] { parse_config(j.dump(), "."); }).find("'<root>.s'") != std::string::npos);

    j = small_square();
    j["q"] = 2.0;
    const std::string m = message_of([&] { parse_config(j.dump(), "."); });
    CHECK(m.find("q∈(2,2*_s)") != std::string::npos);

    j = small_square();
    j["solver"] = {{"init", {{"kind", "corner_bump"}}}};
    CHECK(kind_of([&] { parse_config(j.dump(), "."); }) == ErrorKind::validation);
    CHECK(kind_of([&] { load_config("/nonexistent/run.json"); }) == ErrorKind::io);
    CHECK(exit_code(ErrorKind::validation) == 2);
    CHECK(exit_code(ErrorKind::convergence) == 3);
    CHECK(exit_code(ErrorKind::io) == 4);
}

TEST_CASE("solve command: constant regime, determinism and mandatory seed") {
    const fs::path dir = scratch("solve");
    CommandOptions opt;
    opt.config = write_config(dir, small_square());
    opt.out = dir / "a";
    REQUIRE(cmd_solve(opt) == 0);
    const json r = read_json(dir / "a" / "sq.json");
    CHECK(r["report_version"] == kReportVersion);
    CHECK(r["solution"]["lambda"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r["constant_quotient"].get<double>() == doctest::Approx(1.0));
    opt.out = dir / "b";
    REQUIRE(cmd_solve(opt) == 0);
    CHECK(slurp(dir / "a" / "sq.fld") == slurp(dir / "b" / "sq.fld"));
    CHECK(slurp(dir / "a" / "sq.json") == slurp(dir / "b" / "sq.json"));

    json j = small_square();
    j.erase("seed");
    opt.config = write_config(dir, j);
    CHECK(kind_of([&] { cmd_solve(opt); }) == ErrorKind::validation);
    opt.seed = 11;
    CHECK(cmd_solve(opt) == 0);

    j = small_square();
    j["solver"] = {{"max_iters", 1}, {"init", {{"kind", "constant_plus_noise"}, {"amplitude", 0.5}}}};
    opt.config = write_config(dir, j);
    opt.out = dir / "c";
    CHECK(cmd_solve(opt) == 3);
    CHECK(fs::exists(dir / "c" / "sq.json"));
}

TEST_CASE("render, extend and diagnose commands") {
    const fs::path dir = scratch("render");
    const auto g = build_grid(DomainSpec::rectangle(1, 1), 8);
    Field one(g, false);
    for (auto& x : one.re()) x = 1.0;
    FieldMeta m;
    m.s = 0.5;
    m.q = 4.0;
    write_field_file(dir / "c.fld", one, m);

    const auto img = render_image(one);
    const std::string head = "P5\n8 8\n255\n";
    REQUIRE(img.size() == head.size() + 64);
    CHECK(std::string(img.begin(), img.begin() + head.size()) == head);
    for (std::size_t k = head.size(); k < img.size(); ++k) CHECK(img[k] == img[head.size()]);

    CommandOptions opt;
    opt.out = dir;
    opt.field = dir / "c.fld";
    opt.overlay = true;
    CHECK(cmd_render(opt) == 0);
    CHECK(fs::exists(dir / "c.pgm"));
    CHECK(fs::exists(dir / "c_overlay.ppm"));
    opt.copies = std::array<int, 2>{4, 2};
    CHECK(cmd_extend(opt) == 0);
    const FieldFile ext = read_field_file(dir / "c_ext.fld");
    CHECK(ext.field.grid().dims == std::array<int, 2>{32, 16});
    CHECK(read_json(dir / "c_ext.json")["accepted"] == true);
    opt.mode = "odd";
    CHECK(kind_of([&] { cmd_extend(opt); }) == ErrorKind::validation);
    opt.mode.reset();
    CHECK(cmd_diagnose(opt) == 0);
    CHECK(read_json(dir / "c_diagnose.json")["concentration"]["diffuse"] == true);
}

TEST_CASE("stverify command") {
    const fs::path dir = scratch("stverify");
    json j = small_square();
    j["stverify"] = {{"fields", 2}};
    CommandOptions opt;
    opt.config = write_config(dir, j);
    opt.out = dir;
    REQUIRE(cmd_stverify(opt) == 0);
    const json r = read_json(dir / "sq_stverify.json");
    CHECK(r["max_gap"].get<double>() < 1e-8);
    CHECK(r["cutoff_defect"].size() == 5);
    j["s"] = 0.25;
    j["q"] = 2.5;
    opt.config = write_config(dir, j);
    REQUIRE(cmd_stverify(opt) == 0);
    CHECK(read_json(dir / "sq_stverify.json")["max_gap"].get<double>() < 1e-4);
    j["bc"] = {{"regime", "periodic"}};
    opt.config = write_config(dir, j);
    CHECK(kind_of([&] { cmd_stverify(opt); }) == ErrorKind::validation);
}

TEST_CASE("sweep command: failures are flagged and threads do not change results") {
    const fs::path dir = scratch("sweep");
    json j = small_square();
    j["grid"] = {{"resolution", 8}};
    j["sweep"] = {{"R_list", {0.5, 1.0, 2.0}}};
    CommandOptions opt;
    opt.config = write_config(dir, j);
    opt.out = dir / "t1";
    CHECK(cmd_sweep(opt) == 0);
    const json r = read_json(dir / "t1" / "sq_sweep.json");
    REQUIRE(r["entries"].size() == 3);
    CHECK(r["entries"][0]["ok"] == false);
    CHECK_FALSE(r["entries"][0]["error"].get<std::string>().empty());
    CHECK(r["entries"][1]["ok"] == true);
    CHECK(r["entries"][1]["lambda"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));

    opt.threads = 3;
    opt.out = dir / "t3";
    CHECK(cmd_sweep(opt) == 0);
    CHECK(slurp(dir / "t1" / "sq_R1.fld") == slurp(dir / "t3" / "sq_R1.fld"));
    CHECK(slurp(dir / "t1" / "sq_R2.fld") == slurp(dir / "t3" / "sq_R2.fld"));
    CHECK(slurp(dir / "t1" / "sq_sweep.json") == slurp(dir / "t3" / "sq_sweep.json"));

    j["sweep"] = {{"R_list", json::array()}};
    opt.config = write_config(dir, j);
    CHECK(kind_of([&] { cmd_sweep(opt); }) == ErrorKind::validation);
}
