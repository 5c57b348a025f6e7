#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aqa/features.hpp"
#include "aqa/rng.hpp"

namespace testutil {

inline aqa::ClipFeatureSequence random_sequence(std::uint64_t seed, std::size_t clips,
                                                std::size_t dim, double scale = 1.0) {
    aqa::Rng rng(seed);
    aqa::ClipFeatureSequence seq;
    seq.dim = dim;
    seq.data.resize(clips * dim);
    for (double& v : seq.data) v = scale * rng.normal();
    return seq;
}

inline std::vector<double> random_vector(std::uint64_t seed, std::size_t n,
                                         double scale = 1.0) {
    aqa::Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = scale * rng.normal();
    return v;
}

// Fresh directory under the build tree for file-producing tests.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("aqa_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<char> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
}

}  // namespace testutil
