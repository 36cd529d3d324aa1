#include "jpo/trace_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

namespace jpo {

namespace {

// All fields little endian; this code assumes a little-endian host.
template <typename T>
void put(std::array<char, kTraceHeaderSize>& buf, std::size_t offset, T value) {
    std::memcpy(buf.data() + offset, &value, sizeof(T));
}

template <typename T>
T get(const std::array<char, kTraceHeaderSize>& buf, std::size_t offset) {
    T value;
    std::memcpy(&value, buf.data() + offset, sizeof(T));
    return value;
}

}  // namespace

void write_trace_binary(const std::filesystem::path& path,
                        const QuadratureTrace& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    std::array<char, kTraceHeaderSize> header{};
    std::memcpy(header.data(), kTraceMagic, 8);
    put<std::uint16_t>(header, 8, kTraceVersion);
    put<double>(header, 10, trace.sample_rate);
    put<std::uint64_t>(header, 18, trace.size());
    put<std::uint64_t>(header, 26, trace.seed);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::vector<double> interleaved(2 * trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        interleaved[2 * k] = trace.i_samples[k];
        interleaved[2 * k + 1] = trace.q_samples[k];
    }
    out.write(reinterpret_cast<const char*>(interleaved.data()),
              static_cast<std::streamsize>(interleaved.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

QuadratureTrace read_trace_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::array<char, kTraceHeaderSize> header{};
    in.read(header.data(), static_cast<std::streamsize>(header.size()));
    if (in.gcount() != static_cast<std::streamsize>(header.size()))
        throw TraceFormatError("file shorter than the 64-byte header");
    if (std::memcmp(header.data(), kTraceMagic, 8) != 0)
        throw TraceFormatError("bad magic at offset 0 (expected JPOTRACE)");
    const auto version = get<std::uint16_t>(header, 8);
    if (version != kTraceVersion) {
        std::ostringstream os;
        os << "unsupported trace version " << version << " at offset 8";
        throw TraceFormatError(os.str());
    }
    QuadratureTrace trace;
    trace.sample_rate = get<double>(header, 10);
    const auto count = get<std::uint64_t>(header, 18);
    trace.seed = get<std::uint64_t>(header, 26);
    if (!(trace.sample_rate > 0.0))
        throw TraceFormatError("non-positive sample_rate at offset 10");

    std::vector<double> interleaved(2 * count);
    in.read(reinterpret_cast<char*>(interleaved.data()),
            static_cast<std::streamsize>(interleaved.size() * sizeof(double)));
    const auto got = static_cast<std::size_t>(in.gcount()) / (2 * sizeof(double));
    if (got != count) {
        std::ostringstream os;
        os << "truncated payload: header promises " << count
           << " samples, file holds " << got;
        throw TraceFormatError(os.str());
    }
    trace.i_samples.resize(count);
    trace.q_samples.resize(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        trace.i_samples[k] = interleaved[2 * k];
        trace.q_samples[k] = interleaved[2 * k + 1];
    }
    return trace;
}

void write_trace_csv(const std::filesystem::path& path,
                     const QuadratureTrace& trace) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "t,i,q\n";
    out.precision(17);
    for (std::size_t k = 0; k < trace.size(); ++k)
        out << static_cast<double>(k) / trace.sample_rate << ','
            << trace.i_samples[k] << ',' << trace.q_samples[k] << '\n';
}

QuadratureTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,i,q", 0) != 0)
        throw TraceFormatError("missing t,i,q header in " + path.string());
    QuadratureTrace trace;
    double t0 = 0.0, t1 = 0.0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double t, i, q;
        char c1, c2;
        if (!(ls >> t >> c1 >> i >> c2 >> q) || c1 != ',' || c2 != ',')
            throw TraceFormatError("malformed CSV row " + std::to_string(row + 2));
        if (row == 0) t0 = t;
        if (row == 1) t1 = t;
        trace.i_samples.push_back(i);
        trace.q_samples.push_back(q);
        ++row;
    }
    if (row < 2) throw TraceFormatError("trace needs at least 2 samples");
    trace.sample_rate = 1.0 / (t1 - t0);
    return trace;
}

QuadratureTrace read_trace_any(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    if (ext == ".csv") return read_trace_csv(path);
    return read_trace_binary(path);
}

}  // namespace jpo
