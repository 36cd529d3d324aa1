#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "jpo/trace_io.hpp"

using namespace jpo;
namespace fs = std::filesystem;

namespace {

QuadratureTrace sample_trace() {
    QuadratureTrace t;
    t.sample_rate = 250.0;
    t.seed = 0xdeadbeefcafef00dULL;
    for (int k = 0; k < 100; ++k) {
        t.i_samples.push_back(0.1 * k);
        t.q_samples.push_back(-0.05 * k + 1.0);
    }
    return t;
}

fs::path tmp_file(const char* name) {
    return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("binary round trip is bit exact") {
    auto t = sample_trace();
    auto path = tmp_file("trace_roundtrip.jpotrace");
    write_trace_binary(path, t);
    auto r = read_trace_binary(path);
    CHECK(r.sample_rate == t.sample_rate);
    CHECK(r.seed == t.seed);
    REQUIRE(r.size() == t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(r.i_samples[k] == t.i_samples[k]);
        CHECK(r.q_samples[k] == t.q_samples[k]);
    }
    fs::remove(path);
}

TEST_CASE("header fields live at their documented offsets") {
    auto t = sample_trace();
    auto path = tmp_file("trace_header.jpotrace");
    write_trace_binary(path, t);
    std::ifstream in(path, std::ios::binary);
    char buf[64];
    in.read(buf, 64);
    REQUIRE(in.gcount() == 64);
    CHECK(std::memcmp(buf, "JPOTRACE", 8) == 0);
    std::uint16_t version;
    std::memcpy(&version, buf + 8, 2);
    CHECK(version == 1);
    double fs;
    std::memcpy(&fs, buf + 10, 8);
    CHECK(fs == 250.0);
    std::uint64_t count, seed;
    std::memcpy(&count, buf + 18, 8);
    std::memcpy(&seed, buf + 26, 8);
    CHECK(count == 100);
    CHECK(seed == 0xdeadbeefcafef00dULL);
    CHECK(fs::file_size(path) == 64 + 100 * 2 * 8);
    fs::remove(path);
}

TEST_CASE("malformed files raise TraceFormatError") {
    auto path = tmp_file("trace_bad.jpotrace");

    {  // bad magic
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << "NOTATRACE" << std::string(64, '\0');
    }
    CHECK_THROWS_AS(read_trace_binary(path), TraceFormatError);

    {  // short header
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << "JPOTRACE";
    }
    CHECK_THROWS_AS(read_trace_binary(path), TraceFormatError);

    // truncated payload: write a good file, chop its tail
    auto t = sample_trace();
    write_trace_binary(path, t);
    fs::resize_file(path, 64 + 50 * 2 * 8);
    CHECK_THROWS_WITH_AS(read_trace_binary(path),
                         doctest::Contains("100"), TraceFormatError);

    // wrong version
    write_trace_binary(path, t);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        std::uint16_t v = 9;
        f.write(reinterpret_cast<char*>(&v), 2);
    }
    CHECK_THROWS_AS(read_trace_binary(path), TraceFormatError);
    fs::remove(path);
}

TEST_CASE("csv round trip") {
    auto t = sample_trace();
    auto path = tmp_file("trace_roundtrip.csv");
    write_trace_csv(path, t);
    auto r = read_trace_csv(path);
    CHECK(r.sample_rate == doctest::Approx(t.sample_rate).epsilon(1e-12));
    REQUIRE(r.size() == t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        CHECK(r.i_samples[k] == t.i_samples[k]);
    // Extension dispatch.
    auto rr = read_trace_any(path);
    CHECK(rr.size() == t.size());
    fs::remove(path);

    std::ofstream(path) << "wrong,header\n1,2\n";
    CHECK_THROWS_AS(read_trace_csv(path), TraceFormatError);
    fs::remove(path);
}
