#include "aqa/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

#include "aqa/errors.hpp"
#include "json.hpp"

namespace aqa {

namespace {

constexpr char kMagic[4] = {'A', 'Q', 'A', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::string_view kMetaPrefix = "__meta__";

void append_u16(std::vector<char>& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>(v >> 8));
}

void append_u32(std::vector<char>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f64(std::vector<char>& buf, double v) {
    static_assert(sizeof(double) == 8);
    char b[8];
    std::memcpy(b, &v, 8);
    buf.insert(buf.end(), b, b + 8);
}

void append_block(std::vector<char>& buf, const ParameterBlock& block) {
    if (block.name.size() > 0xffff)
        throw ConfigError("checkpoint: block name too long: " + block.name);
    if (block.shape.size() > 0xff)
        throw ConfigError("checkpoint: block rank above 255: " + block.name);
    append_u16(buf, static_cast<std::uint16_t>(block.name.size()));
    buf.insert(buf.end(), block.name.begin(), block.name.end());
    buf.push_back(static_cast<char>(block.shape.size()));
    for (std::size_t d : block.shape) append_u32(buf, static_cast<std::uint32_t>(d));
    for (double v : block.values) append_f64(buf, v);
}

class BufReader {
public:
    BufReader(const std::vector<char>& buf, std::size_t pos, const std::string& path)
        : buf_(buf), pos_(pos), path_(path) {}

    const char* take(std::size_t n, const char* what) {
        if (pos_ + n > buf_.size())
            throw ParseError(path_ + ": truncated checkpoint while reading " +
                             std::string(what) + " at byte " + std::to_string(pos_));
        const char* p = buf_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::uint16_t u16(const char* what) {
        const unsigned char* p = reinterpret_cast<const unsigned char*>(take(2, what));
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }

    std::uint32_t u32(const char* what) {
        const unsigned char* p = reinterpret_cast<const unsigned char*>(take(4, what));
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) |
               (static_cast<std::uint32_t>(p[3]) << 24);
    }

    double f64(const char* what) {
        double v;
        std::memcpy(&v, take(8, what), 8);
        return v;
    }

    std::size_t pos() const { return pos_; }

private:
    const std::vector<char>& buf_;
    std::size_t pos_;
    const std::string& path_;
};

std::string meta_to_json(const CheckpointMeta& meta) {
    nlohmann::ordered_json j;
    j["phase"] = meta.phase;
    j["epoch"] = meta.epoch;
    j["seed"] = meta.seed;
    j["config_hash"] = meta.config_hash;
    return j.dump();
}

CheckpointMeta meta_from_json(const std::string& text, const std::string& path) {
    try {
        auto j = nlohmann::json::parse(text);
        CheckpointMeta meta;
        meta.phase = j.value("phase", "");
        meta.epoch = j.value("epoch", std::uint64_t{0});
        meta.seed = j.value("seed", std::uint64_t{0});
        meta.config_hash = j.value("config_hash", "");
        return meta;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": bad checkpoint metadata: " + e.what());
    }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::vector<char> body;
    ParameterBlock meta_block;
    meta_block.name = std::string(kMetaPrefix) + meta_to_json(checkpoint.meta);
    append_block(body, meta_block);
    for (const auto& block : checkpoint.params.blocks()) append_block(body, block);

    std::vector<char> head;
    head.insert(head.end(), kMagic, kMagic + 4);
    append_u32(head, kVersion);
    append_u32(head, static_cast<std::uint32_t>(checkpoint.params.blocks().size() + 1));

    std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                static_cast<uInt>(body.size())));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open checkpoint for writing: " + path.string());
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    std::vector<char> tail;
    append_u32(tail, crc);
    out.write(tail.data(), 4);
    if (!out) throw ParseError("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDependencyError("cannot open checkpoint: " + path.string());
    std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    std::string p = path.string();
    if (buf.size() < 16) throw ParseError(p + ": checkpoint too small");
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw ParseError(p + ": bad magic, not a checkpoint");

    BufReader r(buf, 4, p);
    std::uint32_t version = r.u32("version");
    if (version != kVersion)
        throw ParseError(p + ": unsupported checkpoint version " + std::to_string(version));
    std::uint32_t count = r.u32("block count");

    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, buf.data() + buf.size() - 4, 4);
    // stored little-endian
    {
        const unsigned char* q =
            reinterpret_cast<const unsigned char*>(buf.data() + buf.size() - 4);
        stored_crc = static_cast<std::uint32_t>(q[0]) |
                     (static_cast<std::uint32_t>(q[1]) << 8) |
                     (static_cast<std::uint32_t>(q[2]) << 16) |
                     (static_cast<std::uint32_t>(q[3]) << 24);
    }
    std::uint32_t actual_crc = static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(buf.data() + 12),
                static_cast<uInt>(buf.size() - 16)));
    if (stored_crc != actual_crc)
        throw ParseError(p + ": checksum mismatch, checkpoint is corrupted");

    Checkpoint checkpoint;
    bool meta_seen = false;
    for (std::uint32_t k = 0; k < count; ++k) {
        std::uint16_t name_len = r.u16("block name length");
        std::string name(r.take(name_len, "block name"), name_len);
        unsigned rank = static_cast<unsigned char>(*r.take(1, "rank"));
        std::vector<std::size_t> shape(rank);
        std::size_t total = 1;
        for (unsigned d = 0; d < rank; ++d) {
            shape[d] = r.u32("dim");
            total *= shape[d];
        }
        if (rank == 0) total = name.starts_with(kMetaPrefix) ? 0 : 1;
        std::vector<double> values(total);
        for (std::size_t i = 0; i < total; ++i) values[i] = r.f64("values");

        if (name.starts_with(kMetaPrefix)) {
            checkpoint.meta = meta_from_json(name.substr(kMetaPrefix.size()), p);
            meta_seen = true;
            continue;
        }
        ParameterBlock block;
        block.name = std::move(name);
        block.shape = std::move(shape);
        block.values = std::move(values);
        checkpoint.params.add(std::move(block));
    }
    if (r.pos() != buf.size() - 4)
        throw ParseError(p + ": trailing bytes after the last block");
    if (!meta_seen) throw ParseError(p + ": checkpoint has no metadata block");
    return checkpoint;
}

}  // namespace aqa
