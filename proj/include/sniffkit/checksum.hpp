// checksum.hpp - internet checksum (one's-complement) primitives
//
// Shared by the frame builder (fills header checksums) and the frame
// analyzer (verifies them). All inputs are big-endian wire bytes.

#pragma once

#include <cstdint>
#include <span>

#include "sniffkit/errors.hpp"

namespace sniffkit {

/// Running one's-complement sum. Feed byte ranges in wire order, then
/// finish() folds the carries and complements.
class checksum_accumulator {
  public:
    void add(std::span<const std::uint8_t> bytes) {
        std::size_t i = 0;
        if (odd_ && !bytes.empty()) {
            // pending high byte from a previous odd-length range
            sum_ += static_cast<std::uint32_t>((pending_ << 8) | bytes[0]);
            odd_ = false;
            i = 1;
        }
        for (; i + 1 < bytes.size(); i += 2) {
            sum_ += static_cast<std::uint32_t>((bytes[i] << 8) | bytes[i + 1]);
        }
        if (i < bytes.size()) {
            pending_ = bytes[i];
            odd_ = true;
        }
    }

    void add_u16(std::uint16_t word) {
        std::uint8_t b[2] = {static_cast<std::uint8_t>(word >> 8),
                             static_cast<std::uint8_t>(word & 0xFF)};
        add(b);
    }

    void add_u32(std::uint32_t word) {
        add_u16(static_cast<std::uint16_t>(word >> 16));
        add_u16(static_cast<std::uint16_t>(word & 0xFFFF));
    }

    /// One's-complement of the folded sum; a trailing odd byte is padded
    /// with zero as if the data ended on a word boundary.
    std::uint16_t finish() const {
        std::uint64_t sum = sum_;
        if (odd_) sum += static_cast<std::uint32_t>(pending_) << 8;
        while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
        return static_cast<std::uint16_t>(~sum & 0xFFFF);
    }

  private:
    std::uint64_t sum_ = 0;
    std::uint8_t pending_ = 0;
    bool odd_ = false;
};

/// Internet checksum over a byte range.
inline std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes) {
    checksum_accumulator acc;
    acc.add(bytes);
    return acc.finish();
}

/// IPv4 header checksum; the input is the 20-byte header with its checksum
/// field zeroed.
inline std::uint16_t ipv4_header_checksum(std::span<const std::uint8_t> header) {
    if (header.size() != 20) {
        throw spec_error("ipv4 header checksum expects exactly 20 bytes, got " +
                         std::to_string(header.size()));
    }
    return internet_checksum(header);
}

/// TCP/UDP checksum over the standard pseudo-header (source address,
/// destination address, zero, protocol, L4 length) plus the L4 segment with
/// its checksum field treated as zero by the caller. For UDP a computed
/// 0x0000 is emitted as 0xFFFF (zero means "no checksum" on the wire).
inline std::uint16_t transport_checksum(std::uint32_t src_ip, std::uint32_t dst_ip,
                                        std::uint8_t protocol,
                                        std::span<const std::uint8_t> l4_segment) {
    checksum_accumulator acc;
    acc.add_u32(src_ip);
    acc.add_u32(dst_ip);
    acc.add_u16(protocol);
    acc.add_u16(static_cast<std::uint16_t>(l4_segment.size()));
    acc.add(l4_segment);
    std::uint16_t sum = acc.finish();
    if (protocol == 17 && sum == 0) sum = 0xFFFF;
    return sum;
}

/// ICMP checksum: plain internet checksum over header plus payload, no
/// pseudo-header.
inline std::uint16_t icmp_checksum(std::span<const std::uint8_t> segment) {
    return internet_checksum(segment);
}

}  // namespace sniffkit
