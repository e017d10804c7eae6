#pragma once

// File formats: the binary "PRSP v1" container for spike and weight matrices,
// a plain-text spike format, and the JSON layer manifest.
//
// PRSP v1 layout (all integers little-endian):
//
//   offset  size  field
//        0     4  magic "PRSP"
//        4     1  version = 1
//        5     1  kind: 0 = spike, 1 = weight int8, 2 = weight float32
//        6     2  reserved, zero
//        8     4  rows (uint32)
//       12     4  cols (uint32)
//       16     -  payload
//
// Spike payload: each row takes ceil(cols/8) bytes; bit b of byte t is column
// 8t + b; padding bits are zero. Int8 payload: row-major signed bytes.
// Float32 payload: row-major IEEE-754 binary32.
//
// Text spikes: one row per line of '0'/'1' characters, column 0 first. Blank
// lines and lines starting with '#' are ignored.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prosparse/spike_matrix.hpp"

namespace prosparse::io {

inline constexpr std::array<std::uint8_t, 4> prsp_magic{'P', 'R', 'S', 'P'};
inline constexpr std::uint8_t prsp_version = 1;
inline constexpr std::size_t prsp_header_size = 16;

enum class PayloadKind : std::uint8_t { spike = 0, weight_int8 = 1, weight_float32 = 2 };

struct PrspHeader {
    PayloadKind kind = PayloadKind::spike;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
};

using Bytes = std::vector<std::uint8_t>;
using AnyWeights = std::variant<WeightMatrix<std::int8_t>, WeightMatrix<float>>;

namespace wire {

inline void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
    return v;
}

inline std::uint32_t checked_dim(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max())
        throw usage_error(std::string(what) + " does not fit the 32-bit PRSP header");
    return static_cast<std::uint32_t>(v);
}

inline Bytes header(PayloadKind kind, std::size_t rows, std::size_t cols) {
    Bytes out(prsp_magic.begin(), prsp_magic.end());
    out.push_back(prsp_version);
    out.push_back(static_cast<std::uint8_t>(kind));
    out.push_back(0);
    out.push_back(0);
    put_u32(out, checked_dim(rows, "row count"));
    put_u32(out, checked_dim(cols, "column count"));
    return out;
}

inline std::size_t element_bytes(PayloadKind kind, std::size_t cols) {
    switch (kind) {
        case PayloadKind::spike: return (cols + 7) / 8;
        case PayloadKind::weight_int8: return cols;
        default: return cols * 4;
    }
}

}  // namespace wire

// Validates the header and that the buffer holds exactly the payload it declares.
inline PrspHeader read_header(std::span<const std::uint8_t> in) {
    if (in.size() < prsp_header_size) throw format_error("truncated PRSP header", in.size());
    for (std::size_t i = 0; i < prsp_magic.size(); ++i)
        if (in[i] != prsp_magic[i]) throw format_error("bad magic, expected 'PRSP'", i);
    if (in[4] != prsp_version) throw format_error("unsupported PRSP version " + std::to_string(in[4]), 4);
    if (in[5] > 2) throw format_error("unknown payload kind " + std::to_string(in[5]), 5);
    if (in[6] != 0 || in[7] != 0) throw format_error("reserved header bytes must be zero", in[6] != 0 ? 6 : 7);

    PrspHeader h{static_cast<PayloadKind>(in[5]), wire::get_u32(in, 8), wire::get_u32(in, 12)};
    if (h.rows == 0) throw format_error("row count must be >= 1", 8);
    if (h.cols == 0) throw format_error("column count must be >= 1", 12);

    // 64-bit arithmetic: rows < 2^32 and row bytes < 2^34 cannot overflow it.
    const std::uint64_t row_bytes = wire::element_bytes(h.kind, h.cols);
    const std::uint64_t payload = std::uint64_t{h.rows} * row_bytes;
    if (payload > std::numeric_limits<std::size_t>::max() - prsp_header_size)
        throw format_error("declared dimensions overflow the addressable size", 8);
    const std::size_t expect = prsp_header_size + static_cast<std::size_t>(payload);
    if (in.size() < expect) throw format_error("truncated payload", in.size());
    if (in.size() > expect) throw format_error("trailing bytes after payload", expect);
    return h;
}

inline Bytes encode_spikes(const SpikeMatrix& m) {
    Bytes out = wire::header(PayloadKind::spike, m.rows(), m.cols());
    const std::size_t row_bytes = (m.cols() + 7) / 8;
    out.reserve(out.size() + m.rows() * row_bytes);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto words = m.row_words(r);
        for (std::size_t t = 0; t < row_bytes; ++t)
            out.push_back(static_cast<std::uint8_t>(words[t / 8] >> (8 * (t % 8))));
    }
    return out;
}

inline SpikeMatrix decode_spikes(std::span<const std::uint8_t> in) {
    const PrspHeader h = read_header(in);
    if (h.kind != PayloadKind::spike) throw format_error("expected a spike payload", 5);
    SpikeMatrix m(h.rows, h.cols);
    const std::size_t row_bytes = (h.cols + 7) / 8;
    const unsigned tail_bits = h.cols % 8;
    const std::uint8_t pad_mask = tail_bits == 0 ? 0 : static_cast<std::uint8_t>(0xFFu << tail_bits);
    std::size_t off = prsp_header_size;
    std::vector<std::uint64_t> words(m.words_per_row());
    for (std::size_t r = 0; r < h.rows; ++r) {
        std::fill(words.begin(), words.end(), 0);
        for (std::size_t t = 0; t < row_bytes; ++t, ++off) {
            const std::uint8_t b = in[off];
            if (t + 1 == row_bytes && (b & pad_mask) != 0) throw format_error("nonzero padding bits in spike row", off);
            words[t / 8] |= static_cast<std::uint64_t>(b) << (8 * (t % 8));
        }
        for (std::size_t w = 0; w < words.size(); ++w)
            for (std::uint64_t bits = words[w]; bits != 0; bits &= bits - 1)
                m.set(r, w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }
    return m;
}

inline Bytes encode_weights(const WeightMatrix<std::int8_t>& w) {
    Bytes out = wire::header(PayloadKind::weight_int8, w.rows(), w.cols());
    for (auto v : w.data()) out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

inline Bytes encode_weights(const WeightMatrix<float>& w) {
    static_assert(std::numeric_limits<float>::is_iec559, "float must be IEEE-754 binary32");
    Bytes out = wire::header(PayloadKind::weight_float32, w.rows(), w.cols());
    for (auto v : w.data()) wire::put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

inline AnyWeights decode_weights(std::span<const std::uint8_t> in) {
    const PrspHeader h = read_header(in);
    const std::size_t n = std::size_t{h.rows} * h.cols;
    if (h.kind == PayloadKind::weight_int8) {
        std::vector<std::int8_t> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::int8_t>(in[prsp_header_size + i]);
        return WeightMatrix<std::int8_t>(h.rows, h.cols, std::move(v));
    }
    if (h.kind == PayloadKind::weight_float32) {
        std::vector<float> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = std::bit_cast<float>(wire::get_u32(in, prsp_header_size + 4 * i));
        return WeightMatrix<float>(h.rows, h.cols, std::move(v));
    }
    throw format_error("expected a weight payload", 5);
}

inline Bytes read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw io_error("read failed: " + path.string());
    return data;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f) throw io_error("write failed: " + path.string());
}

inline void save_spike_matrix(const std::filesystem::path& path, const SpikeMatrix& m) {
    write_file(path, encode_spikes(m));
}

inline SpikeMatrix load_spike_matrix(const std::filesystem::path& path) { return decode_spikes(read_file(path)); }

template <class W>
void save_weights(const std::filesystem::path& path, const WeightMatrix<W>& w) {
    write_file(path, encode_weights(w));
}

inline AnyWeights load_weights(const std::filesystem::path& path) { return decode_weights(read_file(path)); }

// Header only; checks magic/version/size but skips the payload decode.
inline PrspHeader peek_header(const std::filesystem::path& path) { return read_header(read_file(path)); }

inline SpikeMatrix parse_spike_text(std::string_view text) {
    std::vector<std::string> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0, offset = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t line_start = offset;
        offset += line.size() + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t");
        std::string row = line.substr(first, last - first + 1);
        for (std::size_t c = 0; c < row.size(); ++c)
            if (row[c] != '0' && row[c] != '1')
                throw format_error("line " + std::to_string(lineno) + ": expected '0' or '1'", line_start + first + c);
        if (!rows.empty() && row.size() != rows.front().size())
            throw format_error("line " + std::to_string(lineno) + ": row length differs from the first row", line_start);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw format_error("no spike rows in text input", 0);
    return SpikeMatrix::from_strings(rows);
}

inline std::string format_spike_text(const SpikeMatrix& m) {
    std::string out;
    for (const auto& row : m.to_strings()) out += row + '\n';
    return out;
}

// ".txt" selects the text format, anything else is PRSP.
inline SpikeMatrix load_spikes_any(const std::filesystem::path& path) {
    if (path.extension() == ".txt") {
        const Bytes data = read_file(path);
        return parse_spike_text(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
    }
    return load_spike_matrix(path);
}

}  // namespace prosparse::io
