// Trace persistence. Binary layout (little endian, 64-byte header):
//   offset  0  magic "JPOTRACE" (8 bytes)
//   offset  8  version u16 (currently 1)
//   offset 10  sample_rate f64
//   offset 18  sample count u64
//   offset 26  seed u64
//   offset 34  reserved, zero-filled to byte 64
// followed by interleaved f64 (I, Q) pairs. CSV export carries a `t,i,q`
// header and doubles as an import path for externally recorded data.
#pragma once

#include <filesystem>
#include <stdexcept>

#include "jpo/dynamics.hpp"

namespace jpo {

inline constexpr char kTraceMagic[8] = {'J', 'P', 'O', 'T', 'R', 'A', 'C', 'E'};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kTraceHeaderSize = 64;

struct TraceFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_trace_binary(const std::filesystem::path& path,
                        const QuadratureTrace& trace);

// Throws TraceFormatError naming the byte offset for a bad magic/version
// and the expected vs actual sample count for truncated payloads.
QuadratureTrace read_trace_binary(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path,
                     const QuadratureTrace& trace);

QuadratureTrace read_trace_csv(const std::filesystem::path& path);

// Dispatches on extension: ".jpotrace"/".bin" binary, ".csv" text.
QuadratureTrace read_trace_any(const std::filesystem::path& path);

}  // namespace jpo
