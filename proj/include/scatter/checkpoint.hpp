#ifndef SCATTER_CHECKPOINT_HPP
#define SCATTER_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "scatter/training.hpp"

namespace scatter {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Little-endian binary container: magic, version, plans, normalizations,
// physics and train configs, counters, parameter arrays in declared order,
// Adam moments, trailing checksum. Arrays are u64 length-prefixed f64.
std::string encode_checkpoint(const TrainState &state);
// Throws LoadError naming the offending field.
TrainState decode_checkpoint(const std::string &bytes);

void save_checkpoint(const std::filesystem::path &path, const TrainState &state);
TrainState load_checkpoint(const std::filesystem::path &path);

} // namespace scatter

#endif // SCATTER_CHECKPOINT_HPP
