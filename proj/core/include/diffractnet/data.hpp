#pragma once

#include "diffractnet/field.hpp"
#include "diffractnet/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diffractnet {

/// Raw IDX tensor: big-endian header (00 00 type rank), rank u32 dims,
/// row-major unsigned-byte payload. Gzip-compressed files are accepted and
/// decompressed transparently.
struct IdxTensor {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> bytes;
};

IdxTensor load_idx(const std::string& path);

/// Writes an unsigned-byte IDX file (uncompressed). Used for fixtures and
/// roundtrip checks.
void save_idx(const std::string& path, const IdxTensor& tensor);

/// Labeled 28x28 8-bit image collection.
struct Dataset {
    std::vector<std::uint8_t> images; // M * 28 * 28, row-major
    std::vector<std::uint8_t> labels; // M entries, each < num_classes
    int num_classes = 0;

    std::size_t size() const { return labels.size(); }
    const std::uint8_t* image(std::size_t i) const { return images.data() + i * 28 * 28; }

    /// Truncates to the first n samples (no-op when n >= size).
    void truncate(std::size_t n);
};

/// Pairs an images file (rank 3, M x 28 x 28) with a labels file (rank 1, M).
/// orientation_fix transposes each image, undoing EMNIST's stored rotation.
Dataset load_dataset(const std::string& images_path, const std::string& labels_path,
                     int num_classes, bool orientation_fix);

/// Embeds a 28x28 image as real amplitudes in the centered window of the
/// grid, scaled to [0,1] and normalized to unit total energy. The all-zero
/// image maps to the zero field.
ComplexField to_input_field(const std::uint8_t* image, const GridGeometry& geometry);

/// Seeded permutation of [0, count) chunked into batches; the last batch may
/// be short.
std::vector<std::vector<std::uint32_t>> batches(std::size_t count, std::size_t batch_size,
                                                Rng& rng);

} // namespace diffractnet
