// pcap.hpp - classic libpcap capture file reader and writer
//
// Writes little-endian classic pcap (magic 0xa1b2c3d4, version 2.4,
// link type 1 = Ethernet, microsecond timestamps). Reads both byte orders.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sniffkit/errors.hpp"

namespace sniffkit {

inline constexpr std::uint32_t pcap_magic = 0xa1b2c3d4;
inline constexpr std::uint32_t pcap_snaplen = 65535;
inline constexpr std::uint32_t pcap_linktype_ethernet = 1;

struct pcap_record {
    std::uint64_t ts_micros = 0;
    std::vector<std::uint8_t> bytes;  // captured bytes
    std::uint32_t orig_len = 0;       // original wire length

    bool truncated() const { return bytes.size() < orig_len; }
};

namespace detail {

inline void put_le16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

inline void put_le32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32(const std::uint8_t* p, bool swap) {
    std::uint32_t v = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                      (static_cast<std::uint32_t>(p[2]) << 16) |
                      (static_cast<std::uint32_t>(p[3]) << 24);
    if (swap) {
        v = ((v & 0x000000FF) << 24) | ((v & 0x0000FF00) << 8) | ((v & 0x00FF0000) >> 8) |
            ((v & 0xFF000000) >> 24);
    }
    return v;
}

}  // namespace detail

/// Streaming pcap writer; the global header goes out on open.
class pcap_writer {
  public:
    explicit pcap_writer(const std::filesystem::path& path)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw io_error("cannot open " + path.string() + " for writing");
        std::string header;
        detail::put_le32(header, pcap_magic);
        detail::put_le16(header, 2);  // version 2.4
        detail::put_le16(header, 4);
        detail::put_le32(header, 0);  // thiszone
        detail::put_le32(header, 0);  // sigfigs
        detail::put_le32(header, pcap_snaplen);
        detail::put_le32(header, pcap_linktype_ethernet);
        out_.write(header.data(), static_cast<std::streamsize>(header.size()));
        check();
    }

    void write(std::uint64_t ts_micros, std::span<const std::uint8_t> frame) {
        if (frame.size() > 65535) {
            throw spec_error("frame of " + std::to_string(frame.size()) +
                             " bytes exceeds the capture record limit");
        }
        std::string header;
        detail::put_le32(header, static_cast<std::uint32_t>(ts_micros / 1'000'000));
        detail::put_le32(header, static_cast<std::uint32_t>(ts_micros % 1'000'000));
        detail::put_le32(header, static_cast<std::uint32_t>(frame.size()));
        detail::put_le32(header, static_cast<std::uint32_t>(frame.size()));
        out_.write(header.data(), static_cast<std::streamsize>(header.size()));
        out_.write(reinterpret_cast<const char*>(frame.data()),
                   static_cast<std::streamsize>(frame.size()));
        check();
    }

    void close() {
        out_.close();
        if (out_.fail()) throw io_error("pcap write failed on close");
    }

  private:
    void check() {
        if (!out_) throw io_error("pcap write failed");
    }

    std::ofstream out_;
};

inline void write_pcap(const std::filesystem::path& path,
                       std::span<const pcap_record> records) {
    pcap_writer writer(path);
    for (const pcap_record& record : records) {
        writer.write(record.ts_micros, record.bytes);
    }
    writer.close();
}

/// Reads a classic pcap file: frames in file order with timestamps.
/// Snap-truncated records keep their original length so the pipeline can
/// flag them errored.
inline std::vector<pcap_record> read_pcap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("read failed on " + path.string());

    if (data.size() < 24) throw io_error(path.string() + ": not a pcap file (short header)");
    const std::uint32_t magic_le = detail::get_u32(&data[0], false);
    bool swap;
    if (magic_le == pcap_magic) {
        swap = false;
    } else if (magic_le == 0xd4c3b2a1) {
        swap = true;
    } else {
        throw io_error(path.string() + ": bad pcap magic");
    }
    const std::uint32_t linktype = detail::get_u32(&data[20], swap);
    if (linktype != pcap_linktype_ethernet) {
        throw io_error(path.string() + ": unsupported link type " + std::to_string(linktype));
    }

    std::vector<pcap_record> records;
    std::size_t off = 24;
    while (off < data.size()) {
        if (data.size() - off < 16) {
            throw io_error(path.string() + ": truncated record header");
        }
        pcap_record record;
        const std::uint32_t ts_sec = detail::get_u32(&data[off], swap);
        const std::uint32_t ts_usec = detail::get_u32(&data[off + 4], swap);
        const std::uint32_t incl_len = detail::get_u32(&data[off + 8], swap);
        record.orig_len = detail::get_u32(&data[off + 12], swap);
        record.ts_micros = static_cast<std::uint64_t>(ts_sec) * 1'000'000 + ts_usec;
        off += 16;
        if (data.size() - off < incl_len) {
            throw io_error(path.string() + ": truncated record body");
        }
        record.bytes.assign(data.begin() + static_cast<std::ptrdiff_t>(off),
                            data.begin() + static_cast<std::ptrdiff_t>(off + incl_len));
        off += incl_len;
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace sniffkit
