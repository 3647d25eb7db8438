#ifndef DSTRIPE_NETFLOW_HPP
#define DSTRIPE_NETFLOW_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dstripe {

// Self-delimiting binary flow record. All fixed fields are network byte
// order (big endian):
//
//   offset  0  u16  total_length   entire record, header included (>= 46)
//   offset  2  u32  src_ip
//   offset  6  u32  dst_ip
//   offset 10  u16  src_port
//   offset 12  u16  dst_port
//   offset 14  u64  start_time     ns since epoch
//   offset 22  u64  end_time
//   offset 30  u64  byte_count
//   offset 38  u64  packet_count
//   offset 46  payload descriptor, total_length - 46 opaque bytes
struct NetflowRecord {
    uint16_t total_length = 0;
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    uint64_t start_time = 0;
    uint64_t end_time = 0;
    uint64_t byte_count = 0;
    uint64_t packet_count = 0;
};

inline constexpr uint64_t kNetflowHeaderBytes = 46;
inline constexpr uint64_t kNetflowMaxRecordBytes = 65535;

void encode_netflow_header(const NetflowRecord& rec, std::span<uint8_t> out);
NetflowRecord decode_netflow_header(std::span<const uint8_t> in);

// Byte position of every record plus the flow key used for model grouping
// (the record's src_ip).
struct NetflowIndexEntry {
    uint64_t offset = 0;
    uint32_t length = 0;
    uint32_t flow_key = 0;
};

struct NetflowIndex {
    uint64_t data_bytes = 0;  // size of the data file the index describes
    std::vector<NetflowIndexEntry> entries;
};

// Text format: "dstripe-netflow-index 1" header, a data_bytes/count line
// pair, then one "<offset> <length> <key>" line per record.
void write_netflow_index(const NetflowIndex& index, const std::filesystem::path& path);
NetflowIndex read_netflow_index(const std::filesystem::path& path);

} // namespace dstripe

#endif
