#include "dstripe/segment_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace dstripe {

namespace {

constexpr const char* kManifestMagic = "dstripe-manifest";
constexpr int kManifestVersion = 1;

[[noreturn]] void throw_errno(const std::string& what) {
    throw std::system_error(errno, std::generic_category(), what);
}

void validate_name(const std::string& name) {
    if (name.empty())
        throw std::invalid_argument("logical file name must be nonempty");
    for (char c : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
                        c == '_' || c == '-';
        if (!ok)
            throw std::invalid_argument("logical file name has unsupported character: " + name);
    }
}

void pwrite_full(int fd, const uint8_t* buf, size_t len, uint64_t off) {
    while (len > 0) {
        const ssize_t n = ::pwrite(fd, buf, len, static_cast<off_t>(off));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("pwrite");
        }
        buf += n;
        len -= static_cast<size_t>(n);
        off += static_cast<uint64_t>(n);
    }
}

// reads up to len bytes; returns bytes actually read (short at EOF)
size_t pread_some(int fd, uint8_t* buf, size_t len, uint64_t off) {
    size_t done = 0;
    while (done < len) {
        const ssize_t n = ::pread(fd, buf + done, len - done, static_cast<off_t>(off + done));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("pread");
        }
        if (n == 0) break;
        done += static_cast<size_t>(n);
    }
    return done;
}

std::string substitute(std::string templ, const std::string& key, const std::string& value) {
    size_t pos = 0;
    while ((pos = templ.find(key, pos)) != std::string::npos) {
        templ.replace(pos, key.size(), value);
        pos += value.size();
    }
    return templ;
}

void run_striping_hook(const std::string& hook, const std::filesystem::path& dir,
                       const StripingConfig& config) {
    std::string cmd = hook;
    cmd = substitute(cmd, "{dir}", dir.string());
    cmd = substitute(cmd, "{stripe_count}", std::to_string(config.stripe_count));
    cmd = substitute(cmd, "{stripe_width}", std::to_string(config.stripe_width));
    const int rc = std::system(cmd.c_str());
    if (rc != 0)
        throw std::runtime_error("striping hook failed (exit " + std::to_string(rc) +
                                 "): " + cmd);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

// ---------------------------------------------------------------- Manifest

std::string Manifest::serialize() const {
    std::ostringstream os;
    os << kManifestMagic << " " << kManifestVersion << "\n";
    os << "name " << name << "\n";
    os << "logical_size " << logical_size << "\n";
    for (const ManifestEntry& e : entries) {
        os << "segment path=" << e.path << " start=" << e.start << " end=";
        if (e.end)
            os << *e.end;
        else
            os << "unbounded";
        os << " stripe_count=" << e.stripe_count << " stripe_width=" << e.stripe_width
           << "\n";
    }
    return os.str();
}

Manifest Manifest::parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("manifest: empty file");
    {
        std::istringstream hdr(line);
        std::string magic;
        int version = 0;
        hdr >> magic >> version;
        if (magic != kManifestMagic)
            throw std::runtime_error("manifest: bad magic line '" + line + "'");
        if (version != kManifestVersion)
            throw std::runtime_error("manifest: unsupported version " + std::to_string(version));
    }

    Manifest m;
    bool have_name = false, have_size = false;
    auto field = [](const std::string& token, const std::string& key) {
        if (token.rfind(key + "=", 0) != 0)
            throw std::runtime_error("manifest: expected " + key + "=..., got '" + token + "'");
        return token.substr(key.size() + 1);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "name") {
            ls >> m.name;
            have_name = true;
        } else if (tag == "logical_size") {
            ls >> m.logical_size;
            have_size = true;
        } else if (tag == "segment") {
            ManifestEntry e;
            std::string tok;
            ls >> tok;
            e.path = field(tok, "path");
            ls >> tok;
            e.start = std::stoull(field(tok, "start"));
            ls >> tok;
            const std::string end = field(tok, "end");
            if (end != "unbounded") e.end = std::stoull(end);
            ls >> tok;
            e.stripe_count = static_cast<uint32_t>(std::stoul(field(tok, "stripe_count")));
            ls >> tok;
            e.stripe_width = std::stoull(field(tok, "stripe_width"));
            m.entries.push_back(std::move(e));
        } else {
            throw std::runtime_error("manifest: unknown record '" + tag + "'");
        }
    }
    if (!have_name || !have_size || m.entries.empty())
        throw std::runtime_error("manifest: missing name/logical_size/segments");
    return m;
}

CompositeLayout Manifest::to_layout() const {
    CompositeLayout layout;
    for (const ManifestEntry& e : entries) {
        SegmentSpec seg;
        seg.start = e.start;
        seg.end = e.end;
        seg.config = StripingConfig{e.stripe_count, e.stripe_width};
        seg.dir_label = std::filesystem::path(e.path).parent_path().string();
        layout.segments.push_back(std::move(seg));
    }
    layout.validate();
    return layout;
}

Manifest Manifest::from_layout(const std::string& name, const CompositeLayout& layout,
                               uint64_t logical_size) {
    Manifest m;
    m.name = name;
    m.logical_size = logical_size;
    for (size_t i = 0; i < layout.segments.size(); ++i) {
        const SegmentSpec& seg = layout.segments[i];
        ManifestEntry e;
        e.path = (std::filesystem::path(seg.dir_label) /
                  LogicalFile::segment_file_name(name, i))
                     .string();
        e.start = seg.start;
        e.end = seg.end;
        e.stripe_count = seg.config.stripe_count;
        e.stripe_width = seg.config.stripe_width;
        m.entries.push_back(std::move(e));
    }
    return m;
}

// -------------------------------------------------------------- LogicalFile

struct LogicalFile::State {
    std::filesystem::path root;
    std::string name;
    CompositeLayout layout;
    std::atomic<uint64_t> logical_size{0};
    std::atomic<uint64_t> persisted_size{0};

    mutable std::mutex fd_mutex;
    mutable std::vector<int> fds;  // -1 = not opened

    std::mutex manifest_mutex;

    ~State() {
        for (int fd : fds)
            if (fd >= 0) ::close(fd);
    }

    std::filesystem::path segment_path(size_t i) const {
        return root / layout.segments[i].dir_label / segment_file_name(name, i);
    }

    // opens (and with create=true, creates) the segment file; returns -1
    // when absent and create is false
    int fd_for(size_t i, bool create) const {
        std::lock_guard<std::mutex> lock(fd_mutex);
        if (fds[i] >= 0) return fds[i];
        const std::filesystem::path p = segment_path(i);
        const int flags = O_RDWR | (create ? O_CREAT : 0);
        const int fd = ::open(p.c_str(), flags, 0644);
        if (fd < 0) {
            if (!create && errno == ENOENT) return -1;
            throw_errno("open " + p.string());
        }
        fds[i] = fd;
        return fd;
    }

    void write_manifest() {
        std::lock_guard<std::mutex> lock(manifest_mutex);
        const uint64_t size = logical_size.load();
        const Manifest m = Manifest::from_layout(name, layout, size);
        atomic_write(LogicalFile::manifest_path_for(root, name), m.serialize());
        persisted_size.store(size);
    }
};

LogicalFile::LogicalFile(LogicalFile&&) noexcept = default;
LogicalFile& LogicalFile::operator=(LogicalFile&&) noexcept = default;

LogicalFile::~LogicalFile() {
    if (!state_) return;
    try {
        if (state_->persisted_size.load() != state_->logical_size.load())
            state_->write_manifest();
    } catch (...) {
        // destructor must not throw; the manifest then undercounts
        // logical_size, which verify reports
    }
}

LogicalFile LogicalFile::create(const std::filesystem::path& root, const std::string& name,
                                const CompositeLayout& layout, const StoreOptions& opts) {
    validate_name(name);
    layout.validate();
    std::filesystem::create_directories(root);

    const std::filesystem::path mpath = manifest_path_for(root, name);
    if (std::filesystem::exists(mpath))
        throw std::runtime_error("refusing to clobber existing manifest " + mpath.string());

    for (const SegmentSpec& seg : layout.segments) {
        const std::filesystem::path dir = root / seg.dir_label;
        const bool existed = std::filesystem::exists(dir);
        std::filesystem::create_directories(dir);
        if (!existed && !opts.striping_hook.empty())
            run_striping_hook(opts.striping_hook, dir, seg.config);
    }

    LogicalFile f;
    f.state_ = std::make_unique<State>();
    f.state_->root = root;
    f.state_->name = name;
    f.state_->layout = layout;
    f.state_->fds.assign(layout.segments.size(), -1);
    f.state_->write_manifest();
    return f;
}

LogicalFile LogicalFile::open(const std::filesystem::path& root, const std::string& name) {
    const std::filesystem::path mpath = manifest_path_for(root, name);
    std::ifstream in(mpath, std::ios::binary);
    if (!in) throw std::runtime_error("no manifest at " + mpath.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const Manifest m = Manifest::parse(buf.str());

    LogicalFile f;
    f.state_ = std::make_unique<State>();
    f.state_->root = root;
    f.state_->name = m.name;
    f.state_->layout = m.to_layout();
    f.state_->logical_size.store(m.logical_size);
    f.state_->persisted_size.store(m.logical_size);
    f.state_->fds.assign(f.state_->layout.segments.size(), -1);
    return f;
}

uint64_t LogicalFile::write_at(uint64_t offset, std::span<const uint8_t> data) {
    if (data.empty()) return 0;
    State& st = *state_;
    const uint8_t* src = data.data();
    for (const SubRange& sr : split_range(st.layout, offset, data.size())) {
        const int fd = st.fd_for(sr.segment_index, /*create=*/true);
        pwrite_full(fd, src, sr.length, sr.offset_in_segment);
        src += sr.length;
    }

    const uint64_t end = offset + data.size();
    uint64_t cur = st.logical_size.load();
    while (cur < end && !st.logical_size.compare_exchange_weak(cur, end)) {
    }
    return data.size();
}

size_t LogicalFile::read_at(uint64_t offset, std::span<uint8_t> out) const {
    const State& st = *state_;
    const uint64_t size = st.logical_size.load();
    if (offset >= size || out.empty()) return 0;
    const size_t want = static_cast<size_t>(std::min<uint64_t>(out.size(), size - offset));

    uint8_t* dst = out.data();
    for (const SubRange& sr : split_range(st.layout, offset, want)) {
        const int fd = st.fd_for(sr.segment_index, /*create=*/false);
        size_t got = 0;
        if (fd >= 0)
            got = pread_some(fd, dst, sr.length, sr.offset_in_segment);
        // hole or short segment file: logical bytes below logical_size
        // that were never written read as zero
        if (got < sr.length)
            std::memset(dst + got, 0, sr.length - got);
        dst += sr.length;
    }
    return want;
}

std::vector<uint8_t> LogicalFile::read_at(uint64_t offset, size_t length) const {
    std::vector<uint8_t> buf(length);
    const size_t n = read_at(offset, buf);
    buf.resize(n);
    return buf;
}

void LogicalFile::flush() { state_->write_manifest(); }

uint64_t LogicalFile::logical_size() const { return state_->logical_size.load(); }
const CompositeLayout& LogicalFile::layout() const { return state_->layout; }
const std::string& LogicalFile::name() const { return state_->name; }
const std::filesystem::path& LogicalFile::root() const { return state_->root; }

std::filesystem::path LogicalFile::segment_path(size_t segment_index) const {
    return state_->segment_path(segment_index);
}

std::filesystem::path LogicalFile::manifest_path() const {
    return manifest_path_for(state_->root, state_->name);
}

std::filesystem::path LogicalFile::manifest_path_for(const std::filesystem::path& root,
                                                     const std::string& name) {
    return root / (name + ".manifest");
}

std::string LogicalFile::segment_file_name(const std::string& name, size_t segment_index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ".part-%02zu", segment_index);
    return name + buf;
}

// ------------------------------------------------------------ split / merge

LogicalFile import_split(const std::filesystem::path& source_file,
                         const std::filesystem::path& root, const std::string& name,
                         const CompositeLayout& layout, const StoreOptions& opts) {
    std::ifstream in(source_file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open source " + source_file.string());

    LogicalFile f = LogicalFile::create(root, name, layout, opts);
    std::vector<uint8_t> buf(4 * 1024 * 1024);
    uint64_t offset = 0;
    while (in) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        const size_t n = static_cast<size_t>(in.gcount());
        if (n == 0) break;
        f.write_at(offset, std::span<const uint8_t>(buf.data(), n));
        offset += n;
    }
    f.flush();
    return f;
}

void export_merge(const LogicalFile& file, const std::filesystem::path& dest) {
    const uint64_t size = file.logical_size();
    const CompositeLayout& layout = file.layout();

    // every segment holding bytes below logical_size must be present
    for (size_t i = 0; i < layout.segments.size() && layout.segments[i].start < size; ++i) {
        const std::filesystem::path p = file.segment_path(i);
        if (!std::filesystem::exists(p))
            throw std::runtime_error("missing segment file: " + p.string());
    }

    std::ofstream out(dest, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + dest.string());
    std::vector<uint8_t> buf(4 * 1024 * 1024);
    uint64_t offset = 0;
    while (offset < size) {
        const size_t n = file.read_at(offset, buf);
        if (n == 0)
            throw std::runtime_error("short read during export at offset " +
                                     std::to_string(offset));
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n));
        offset += n;
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + dest.string());
}

} // namespace dstripe
