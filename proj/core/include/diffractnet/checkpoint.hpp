#pragma once

#include "diffractnet/config.hpp"
#include "diffractnet/network.hpp"

#include <string>

namespace diffractnet {

/// Checkpoint byte layout (all multi-byte values little-endian):
///   magic "MFDN" (4 bytes)
///   format version: u32
///   config text length: u32, followed by that many UTF-8 bytes
///   per layer: amplitude grid then phase grid, f64 row-major
///   per layer, when bias is enabled: bias (re, im) f64 pair
///   channel weights: F f64 values
///   CRC-32 of all preceding bytes: u32
constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const RunConfig& config, const MFDNet& net);

struct LoadedCheckpoint {
    RunConfig config;
    MFDNet net;
};

/// Validates magic, version and checksum, then rebuilds the network from the
/// embedded config and restores its parameters bitwise.
LoadedCheckpoint load_checkpoint(const std::string& path, KernelCache& kernels);

} // namespace diffractnet
