#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include "dstripe/rng.hpp"
#include "dstripe/segment_store.hpp"
#include "dstripe/util.hpp"

using namespace dstripe;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("dstripe-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path path;
};

CompositeLayout small_layout() {
    // watermarks at 256 KiB and 1 MiB, tiny stripes so extents fragment
    return build_layout({Watermark{256 * KiB}, Watermark{1 * MiB}},
                        {StripingConfig{4, 64 * KiB}, StripingConfig{8, 64 * KiB},
                         StripingConfig{16, 128 * KiB}});
}

std::vector<uint8_t> random_bytes(Rng& rng, size_t n) {
    std::vector<uint8_t> out(n);
    for (size_t i = 0; i < n; i += 8) {
        const uint64_t v = rng.next();
        for (size_t j = 0; j < 8 && i + j < n; ++j)
            out[i + j] = static_cast<uint8_t>(v >> (8 * j));
    }
    return out;
}

std::vector<uint8_t> read_whole_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("create makes per-config directories and a manifest") {
    TempDir tmp;
    const CompositeLayout layout =
        build_layout({Watermark{1 * MiB}, Watermark{10 * MiB}},
                     {StripingConfig{4, 1 * MiB}, StripingConfig{8, 2 * MiB},
                      StripingConfig{16, 4 * MiB}});
    const LogicalFile f = LogicalFile::create(tmp.path, "data", layout);

    CHECK(fs::is_directory(tmp.path / "4ost-1mb"));
    CHECK(fs::is_directory(tmp.path / "8ost-2mb"));
    CHECK(fs::is_directory(tmp.path / "16ost-4mb"));
    CHECK(fs::exists(tmp.path / "data.manifest"));
    CHECK(f.logical_size() == 0);
    // segment files are lazy
    CHECK(!fs::exists(tmp.path / "4ost-1mb" / "data.part-00"));

    CHECK_THROWS_WITH_AS(LogicalFile::create(tmp.path, "data", layout),
                         doctest::Contains("refusing to clobber"), std::runtime_error);
}

TEST_CASE("manifest round-trips losslessly") {
    const CompositeLayout layout = small_layout();
    const Manifest m = Manifest::from_layout("stuff", layout, 123456);
    const Manifest back = Manifest::parse(m.serialize());
    CHECK(back.name == "stuff");
    CHECK(back.logical_size == 123456);
    REQUIRE(back.entries.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(back.entries[i].path == m.entries[i].path);
        CHECK(back.entries[i].start == m.entries[i].start);
        CHECK(back.entries[i].end == m.entries[i].end);
        CHECK(back.entries[i].stripe_count == m.entries[i].stripe_count);
        CHECK(back.entries[i].stripe_width == m.entries[i].stripe_width);
    }
    const CompositeLayout rebuilt = back.to_layout();
    REQUIRE(rebuilt.segments.size() == layout.segments.size());
    for (size_t i = 0; i < layout.segments.size(); ++i) {
        CHECK(rebuilt.segments[i].start == layout.segments[i].start);
        CHECK(rebuilt.segments[i].end == layout.segments[i].end);
        CHECK(rebuilt.segments[i].config == layout.segments[i].config);
        CHECK(rebuilt.segments[i].dir_label == layout.segments[i].dir_label);
    }
}

TEST_CASE("randomized writes read back like a monolithic shadow file") {
    TempDir tmp;
    LogicalFile f = LogicalFile::create(tmp.path, "rw", small_layout());
    std::vector<uint8_t> shadow;
    Rng rng(7);

    for (int i = 0; i < 300; ++i) {
        const uint64_t offset = rng.uniform_u64(0, 4 * MiB);
        const std::vector<uint8_t> data = random_bytes(rng, rng.uniform_u64(1, 32 * KiB));
        CHECK(f.write_at(offset, data) == data.size());
        if (shadow.size() < offset + data.size()) shadow.resize(offset + data.size(), 0);
        std::copy(data.begin(), data.end(), shadow.begin() + static_cast<ptrdiff_t>(offset));
    }

    REQUIRE(f.logical_size() == shadow.size());
    CHECK(f.read_at(0, shadow.size()) == shadow);

    // random window reads agree too
    for (int i = 0; i < 100; ++i) {
        const uint64_t offset = rng.uniform_u64(0, shadow.size() - 1);
        const size_t len = rng.uniform_u64(1, 64 * KiB);
        const auto got = f.read_at(offset, len);
        const size_t expect_len =
            std::min<uint64_t>(len, shadow.size() - offset);
        REQUIRE(got.size() == expect_len);
        CHECK(std::equal(got.begin(), got.end(),
                         shadow.begin() + static_cast<ptrdiff_t>(offset)));
    }
}

TEST_CASE("reads at or past EOF and zero-length writes") {
    TempDir tmp;
    LogicalFile f = LogicalFile::create(tmp.path, "eof", small_layout());
    CHECK(f.write_at(100, {}) == 0);
    CHECK(f.logical_size() == 0);

    const std::vector<uint8_t> data(1000, 0xab);
    f.write_at(0, data);
    CHECK(f.read_at(1000, 10).empty());
    CHECK(f.read_at(5000, 10).empty());
    CHECK(f.read_at(990, 100).size() == 10);
}

TEST_CASE("never-written holes below logical_size read as zeros") {
    TempDir tmp;
    LogicalFile f = LogicalFile::create(tmp.path, "holes", small_layout());
    f.write_at(2 * MiB, std::vector<uint8_t>(100, 0xff));

    const auto hole = f.read_at(300 * KiB, 1000);  // middle segment, never written
    REQUIRE(hole.size() == 1000);
    for (uint8_t b : hole) CHECK(b == 0);
}

TEST_CASE("a write across a watermark lands in both segment files") {
    TempDir tmp;
    const CompositeLayout layout = small_layout();
    LogicalFile f = LogicalFile::create(tmp.path, "split", layout);

    Rng rng(11);
    const std::vector<uint8_t> data = random_bytes(rng, 1024);
    f.write_at(256 * KiB - 512, data);

    const auto part0 = read_whole_file(f.segment_path(0));
    const auto part1 = read_whole_file(f.segment_path(1));
    REQUIRE(part0.size() == 256 * KiB);  // extended up to the watermark
    REQUIRE(part1.size() == 512);
    CHECK(std::equal(data.begin(), data.begin() + 512, part0.end() - 512));
    CHECK(std::equal(data.begin() + 512, data.end(), part1.begin()));
}

TEST_CASE("sequential append fills parts 1/9/4 like the worked example") {
    TempDir tmp;
    const CompositeLayout layout =
        build_layout({Watermark{1 * MiB}, Watermark{10 * MiB}},
                     {StripingConfig{4, 1 * MiB}, StripingConfig{8, 2 * MiB},
                      StripingConfig{16, 4 * MiB}});
    LogicalFile f = LogicalFile::create(tmp.path, "grow", layout);

    const std::vector<uint8_t> chunk(1 * MiB, 0x5a);
    for (int i = 0; i < 14; ++i) f.write_at(uint64_t(i) * MiB, chunk);

    CHECK(fs::file_size(f.segment_path(0)) == 1 * MiB);
    CHECK(fs::file_size(f.segment_path(1)) == 9 * MiB);
    CHECK(fs::file_size(f.segment_path(2)) == 4 * MiB);
    CHECK(f.logical_size() == 14 * MiB);
}

TEST_CASE("a write inside one segment touches no other segment file") {
    TempDir tmp;
    LogicalFile f = LogicalFile::create(tmp.path, "iso", small_layout());
    f.write_at(0, std::vector<uint8_t>(10, 1));        // segment 0
    f.write_at(2 * MiB, std::vector<uint8_t>(10, 2));  // segment 2

    const auto before = read_whole_file(f.segment_path(0));
    f.write_at(512 * KiB, std::vector<uint8_t>(64 * KiB, 3));  // segment 1 only
    CHECK(read_whole_file(f.segment_path(0)) == before);
    CHECK(fs::exists(f.segment_path(1)));
}

TEST_CASE("logical_size persists through flush and open") {
    TempDir tmp;
    {
        LogicalFile f = LogicalFile::create(tmp.path, "persist", small_layout());
        f.write_at(0, std::vector<uint8_t>(12345, 9));
        f.flush();
    }
    LogicalFile g = LogicalFile::open(tmp.path, "persist");
    CHECK(g.logical_size() == 12345);
    CHECK(g.layout().segments.size() == 3);
    CHECK(g.read_at(0, 12345).size() == 12345);
}

TEST_CASE("import then export is byte-identical across tricky sizes") {
    const uint64_t wm = 256 * KiB;  // first watermark of small_layout
    for (const uint64_t size :
         {uint64_t(0), uint64_t(1), wm - 1, wm, wm + 1, 10 * wm}) {
        TempDir tmp;
        Rng rng(size + 1);
        const std::vector<uint8_t> content = random_bytes(rng, size);
        const fs::path source = tmp.path / "source.bin";
        {
            std::ofstream out(source, std::ios::binary);
            out.write(reinterpret_cast<const char*>(content.data()),
                      static_cast<std::streamsize>(content.size()));
        }

        const LogicalFile f =
            import_split(source, tmp.path / "store", "blob", small_layout());
        CHECK(f.logical_size() == size);

        const fs::path merged = tmp.path / "merged.bin";
        export_merge(f, merged);
        CHECK(fnv1a64_file(merged) == fnv1a64_file(source));
        CHECK(fs::file_size(merged) == size);
    }
}

TEST_CASE("import smaller than the first watermark creates a single part") {
    TempDir tmp;
    Rng rng(3);
    const std::vector<uint8_t> content = random_bytes(rng, 100 * KiB);
    const fs::path source = tmp.path / "small.bin";
    {
        std::ofstream out(source, std::ios::binary);
        out.write(reinterpret_cast<const char*>(content.data()),
                  static_cast<std::streamsize>(content.size()));
    }
    const LogicalFile f = import_split(source, tmp.path / "store", "small", small_layout());
    CHECK(fs::exists(f.segment_path(0)));
    CHECK(!fs::exists(f.segment_path(1)));
    CHECK(!fs::exists(f.segment_path(2)));
    CHECK(read_whole_file(f.segment_path(0)) == content);
}

TEST_CASE("export names the missing segment file") {
    TempDir tmp;
    LogicalFile f = LogicalFile::create(tmp.path, "broken", small_layout());
    const std::vector<uint8_t> chunk(512 * KiB, 7);
    f.write_at(0, chunk);
    f.write_at(512 * KiB, chunk);  // spans segments 0 and 1
    fs::remove(f.segment_path(1));

    CHECK_THROWS_WITH_AS(export_merge(f, tmp.path / "out.bin"),
                         doctest::Contains("part-01"), std::runtime_error);
}

TEST_CASE("export of an empty logical file yields an empty destination") {
    TempDir tmp;
    LogicalFile f = LogicalFile::create(tmp.path, "empty", small_layout());
    const fs::path dest = tmp.path / "empty.bin";
    export_merge(f, dest);
    CHECK(fs::file_size(dest) == 0);
}

TEST_CASE("concurrent writers to disjoint ranges do not corrupt") {
    TempDir tmp;
    LogicalFile f = LogicalFile::create(tmp.path, "mt", small_layout());

    constexpr int kThreads = 8;
    constexpr uint64_t kSlice = 300 * KiB;  // spans all three segments overall
    std::vector<std::thread> threads;
    for (int t = 0; t < kThreads; ++t) {
        threads.emplace_back([&f, t] {
            Rng rng(1000 + t);
            const auto data = random_bytes(rng, kSlice);
            f.write_at(uint64_t(t) * kSlice, data);
        });
    }
    for (auto& t : threads) t.join();

    REQUIRE(f.logical_size() == kThreads * kSlice);
    for (int t = 0; t < kThreads; ++t) {
        Rng rng(1000 + t);
        const auto expect = random_bytes(rng, kSlice);
        CHECK(f.read_at(uint64_t(t) * kSlice, kSlice) == expect);
    }
}

TEST_CASE("striping hook runs once per created directory and can fail") {
    TempDir tmp;
    const fs::path log = tmp.path / "hook.log";
    StoreOptions opts;
    opts.striping_hook = "echo {stripe_count} {stripe_width} {dir} >> " + log.string();

    LogicalFile::create(tmp.path / "store", "hooked", small_layout(), opts);
    std::ifstream in(log);
    REQUIRE(in);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].rfind("4 65536", 0) == 0);
    CHECK(lines[1].rfind("8 65536", 0) == 0);
    CHECK(lines[2].rfind("16 131072", 0) == 0);

    StoreOptions bad;
    bad.striping_hook = "exit 3";
    CHECK_THROWS_WITH_AS(
        LogicalFile::create(tmp.path / "store2", "hooked", small_layout(), bad),
        doctest::Contains("striping hook failed"), std::runtime_error);
}

TEST_CASE("names that would escape the store are rejected") {
    TempDir tmp;
    CHECK_THROWS_AS(LogicalFile::create(tmp.path, "a/b", small_layout()),
                    std::invalid_argument);
    CHECK_THROWS_AS(LogicalFile::create(tmp.path, "", small_layout()),
                    std::invalid_argument);
}
