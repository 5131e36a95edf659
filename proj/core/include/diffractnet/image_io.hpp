#pragma once

#include "diffractnet/field.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diffractnet {

/// 8-bit binary PGM (P5, maxval <= 255).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major
};

GrayImage read_pgm(const std::string& path);

/// Writes a real map as a 16-bit binary PGM (P5, maxval 65535, big-endian
/// samples), scaled so the map maximum lands on 65535. An all-zero map
/// produces an all-zero file.
void write_pgm16(const std::string& path, const RealMap& map);

} // namespace diffractnet
