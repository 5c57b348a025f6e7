#include "aqa/features.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "aqa/errors.hpp"

namespace aqa {

namespace {

constexpr char kMagic[4] = {'A', 'Q', 'A', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u16(std::ostream& out, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_f32(std::ostream& out, float v) {
    static_assert(sizeof(float) == 4);
    char b[4];
    std::memcpy(b, &v, 4);
    out.write(b, 4);
}

class Reader {
public:
    Reader(std::istream& in, const std::filesystem::path& path) : in_(in), path_(path) {}

    void bytes(char* dst, std::size_t n, const char* what) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw ParseError(path_.string() + ": truncated while reading " +
                             std::string(what) + " at byte offset " +
                             std::to_string(offset_));
        offset_ += n;
    }

    std::uint16_t u16(const char* what) {
        unsigned char b[2];
        bytes(reinterpret_cast<char*>(b), 2, what);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    std::uint32_t u32(const char* what) {
        unsigned char b[4];
        bytes(reinterpret_cast<char*>(b), 4, what);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    }

    float f32(const char* what) {
        char b[4];
        bytes(b, 4, what);
        float v;
        std::memcpy(&v, b, 4);
        return v;
    }

    std::size_t offset() const { return offset_; }

private:
    std::istream& in_;
    const std::filesystem::path& path_;
    std::size_t offset_ = 0;
};

}  // namespace

bool ClipFeatureSequence::clip_is_zero(std::size_t index) const {
    for (double v : clip(index))
        if (v != 0.0) return false;
    return true;
}

void write_features(const std::filesystem::path& path, const FeatureFile& file) {
    const auto& seq = file.features;
    if (seq.dim == 0 || seq.clip_count() == 0)
        throw ShapeError("write_features: empty sequence for id '" + file.id + "'");
    if (file.id.size() > 0xffff)
        throw ConfigError("write_features: id longer than 65535 bytes");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path.string());

    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u16(out, static_cast<std::uint16_t>(file.id.size()));
    out.write(file.id.data(), static_cast<std::streamsize>(file.id.size()));
    put_u32(out, file.action_type);
    put_u32(out, static_cast<std::uint32_t>(seq.clip_count()));
    put_u32(out, static_cast<std::uint32_t>(seq.dim));
    for (double v : seq.data) put_f32(out, static_cast<float>(v));
    if (!out) throw ParseError("write failed: " + path.string());
}

FeatureFile load_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open feature file: " + path.string());
    Reader r(in, path);

    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw ParseError(path.string() + ": bad magic, not a feature file");
    std::uint32_t version = r.u32("version");
    if (version != kVersion)
        throw ParseError(path.string() + ": unsupported feature file version " +
                         std::to_string(version));

    FeatureFile file;
    std::uint16_t id_len = r.u16("id length");
    file.id.resize(id_len);
    if (id_len > 0) r.bytes(file.id.data(), id_len, "id");
    file.action_type = r.u32("action type");
    std::uint32_t n = r.u32("clip count");
    std::uint32_t dim = r.u32("dim");
    if (n == 0 || dim == 0)
        throw ParseError(path.string() + ": clip count and dim must be positive");

    file.features.dim = dim;
    file.features.data.resize(static_cast<std::size_t>(n) * dim);
    for (std::uint32_t clip = 0; clip < n; ++clip) {
        for (std::uint32_t d = 0; d < dim; ++d) {
            float v = r.f32("feature payload");
            if (!std::isfinite(v))
                throw ParseError(path.string() + ": non-finite value in clip " +
                                 std::to_string(clip + 1) + ", component " +
                                 std::to_string(d));
            file.features.data[static_cast<std::size_t>(clip) * dim + d] = v;
        }
    }
    return file;
}

ClipFeatureSequence pad_to_length(const ClipFeatureSequence& seq, std::size_t n_target) {
    std::size_t n = seq.clip_count();
    if (n > n_target)
        throw ShapeError("pad_to_length: sequence has " + std::to_string(n) +
                         " clips, target is " + std::to_string(n_target) +
                         "; truncate explicitly first");
    ClipFeatureSequence out;
    out.dim = seq.dim;
    out.clip_frames = seq.clip_frames;
    out.data.assign((n_target - n) * seq.dim, 0.0);
    out.data.insert(out.data.end(), seq.data.begin(), seq.data.end());
    return out;
}

ClipFeatureSequence truncate_front(const ClipFeatureSequence& seq, std::size_t n_target) {
    std::size_t n = seq.clip_count();
    if (n < n_target)
        throw ShapeError("truncate_front: sequence shorter than target length");
    ClipFeatureSequence out;
    out.dim = seq.dim;
    out.clip_frames = seq.clip_frames;
    out.data.assign(seq.data.end() - static_cast<std::ptrdiff_t>(n_target * seq.dim),
                    seq.data.end());
    return out;
}

}  // namespace aqa
