#include "dstripe/netflow.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dstripe {

namespace {

void put_u16(uint8_t* p, uint16_t v) {
    p[0] = static_cast<uint8_t>(v >> 8);
    p[1] = static_cast<uint8_t>(v);
}
void put_u32(uint8_t* p, uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<uint8_t>(v >> (24 - 8 * i));
}
void put_u64(uint8_t* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<uint8_t>(v >> (56 - 8 * i));
}
uint16_t get_u16(const uint8_t* p) {
    return static_cast<uint16_t>((p[0] << 8) | p[1]);
}
uint32_t get_u32(const uint8_t* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | p[i];
    return v;
}
uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

} // namespace

void encode_netflow_header(const NetflowRecord& rec, std::span<uint8_t> out) {
    if (out.size() < kNetflowHeaderBytes)
        throw std::invalid_argument("encode_netflow_header: buffer too small");
    if (rec.total_length < kNetflowHeaderBytes)
        throw std::invalid_argument("encode_netflow_header: total_length below header size");
    uint8_t* p = out.data();
    put_u16(p + 0, rec.total_length);
    put_u32(p + 2, rec.src_ip);
    put_u32(p + 6, rec.dst_ip);
    put_u16(p + 10, rec.src_port);
    put_u16(p + 12, rec.dst_port);
    put_u64(p + 14, rec.start_time);
    put_u64(p + 22, rec.end_time);
    put_u64(p + 30, rec.byte_count);
    put_u64(p + 38, rec.packet_count);
}

NetflowRecord decode_netflow_header(std::span<const uint8_t> in) {
    if (in.size() < kNetflowHeaderBytes)
        throw std::invalid_argument("decode_netflow_header: buffer too small");
    const uint8_t* p = in.data();
    NetflowRecord rec;
    rec.total_length = get_u16(p + 0);
    rec.src_ip = get_u32(p + 2);
    rec.dst_ip = get_u32(p + 6);
    rec.src_port = get_u16(p + 10);
    rec.dst_port = get_u16(p + 12);
    rec.start_time = get_u64(p + 14);
    rec.end_time = get_u64(p + 22);
    rec.byte_count = get_u64(p + 30);
    rec.packet_count = get_u64(p + 38);
    if (rec.total_length < kNetflowHeaderBytes)
        throw std::runtime_error("netflow record with length below header size");
    return rec;
}

void write_netflow_index(const NetflowIndex& index, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "dstripe-netflow-index 1\n";
    out << "data_bytes " << index.data_bytes << "\n";
    out << "count " << index.entries.size() << "\n";
    for (const NetflowIndexEntry& e : index.entries)
        out << e.offset << " " << e.length << " " << e.flow_key << "\n";
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

NetflowIndex read_netflow_index(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "dstripe-netflow-index" || version != 1)
        throw std::runtime_error("bad index header in " + path.string());

    NetflowIndex index;
    std::string key;
    uint64_t count = 0;
    in >> key >> index.data_bytes;
    if (key != "data_bytes") throw std::runtime_error("bad index: expected data_bytes");
    in >> key >> count;
    if (key != "count") throw std::runtime_error("bad index: expected count");
    index.entries.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        NetflowIndexEntry e;
        in >> e.offset >> e.length >> e.flow_key;
        if (!in) throw std::runtime_error("truncated index " + path.string());
        index.entries.push_back(e);
    }
    return index;
}

} // namespace dstripe
