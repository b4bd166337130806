#pragma once

#include <cstdint>
#include <string>

#include "aqc/driver.hpp"

namespace aqc {

/// Binary snapshot of a two-stage run at an iteration boundary. Doubles are
/// written raw, so a resumed run replays the remaining iterations bit for bit.
struct Checkpoint {
    std::uint64_t config_hash = 0;
    std::string version;
    TwoStageState state;
};

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);

/// Throws if the file is not a checkpoint of a compatible version.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace aqc
