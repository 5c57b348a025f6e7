#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "aqa/params.hpp"

namespace aqa {

// Training provenance stored inside the checkpoint.
struct CheckpointMeta {
    std::string phase;          // "dml" or "score"
    std::uint64_t epoch = 0;
    std::uint64_t seed = 0;
    std::string config_hash;    // hex CRC32 of the architecture config
};

struct Checkpoint {
    CheckpointMeta meta;
    ParameterSet params;
};

// Binary layout, little-endian throughout:
//   magic "AQAC" | u32 version=1 | u32 block count
//   per block: u16 name length | name | u8 rank | u32 dims... | f64 values...
//   trailing u32 CRC32 over every byte between the header and the CRC.
// Metadata travels as a zero-rank block whose name carries a JSON suffix;
// it is stripped on load.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace aqa
