#include "diffractnet/data.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace diffractnet {

namespace {

// gzread handles both gzip and plain files.
std::vector<std::uint8_t> read_file(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + n);
    const bool error = n < 0;
    gzclose(f);
    if (error) throw std::runtime_error("read error in: " + path);
    return out;
}

std::uint32_t read_u32_be(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

} // namespace

IdxTensor load_idx(const std::string& path) {
    const auto raw = read_file(path);
    if (raw.size() < 4) throw std::runtime_error("IDX file too short: " + path);
    if (raw[0] != 0 || raw[1] != 0)
        throw std::runtime_error("IDX bad magic in: " + path);
    if (raw[2] != 0x08)
        throw std::runtime_error("IDX unsupported element type in: " + path);
    const int rank = raw[3];
    if (rank < 1 || raw.size() < 4 + 4 * static_cast<std::size_t>(rank))
        throw std::runtime_error("IDX truncated header in: " + path);
    IdxTensor t;
    std::size_t expected = 1;
    for (int d = 0; d < rank; ++d) {
        const std::uint32_t dim = read_u32_be(raw.data() + 4 + 4 * d);
        t.dims.push_back(dim);
        expected *= dim;
    }
    const std::size_t offset = 4 + 4 * static_cast<std::size_t>(rank);
    if (raw.size() - offset != expected)
        throw std::runtime_error("IDX payload length mismatch in: " + path);
    t.bytes.assign(raw.begin() + offset, raw.end());
    return t;
}

void save_idx(const std::string& path, const IdxTensor& tensor) {
    std::size_t expected = 1;
    for (auto d : tensor.dims) expected *= d;
    if (expected != tensor.bytes.size())
        throw std::invalid_argument("save_idx: dims do not match payload size");
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write file: " + path);
    const std::uint8_t header[4] = {0, 0, 0x08, static_cast<std::uint8_t>(tensor.dims.size())};
    std::fwrite(header, 1, 4, f);
    for (auto d : tensor.dims) {
        const std::uint8_t be[4] = {std::uint8_t(d >> 24), std::uint8_t(d >> 16),
                                    std::uint8_t(d >> 8), std::uint8_t(d)};
        std::fwrite(be, 1, 4, f);
    }
    std::fwrite(tensor.bytes.data(), 1, tensor.bytes.size(), f);
    std::fclose(f);
}

void Dataset::truncate(std::size_t n) {
    if (n >= size()) return;
    labels.resize(n);
    images.resize(n * 28 * 28);
}

Dataset load_dataset(const std::string& images_path, const std::string& labels_path,
                     int num_classes, bool orientation_fix) {
    const IdxTensor imgs = load_idx(images_path);
    const IdxTensor lbls = load_idx(labels_path);
    if (imgs.dims.size() != 3 || imgs.dims[1] != 28 || imgs.dims[2] != 28)
        throw std::runtime_error("expected M x 28 x 28 images in: " + images_path);
    if (lbls.dims.size() != 1)
        throw std::runtime_error("expected rank-1 labels in: " + labels_path);
    if (imgs.dims[0] != lbls.dims[0])
        throw std::runtime_error("image/label count mismatch: " + images_path);
    Dataset ds;
    ds.num_classes = num_classes;
    ds.labels = lbls.bytes;
    for (auto y : ds.labels)
        if (y >= num_classes) throw std::runtime_error("label out of range in: " + labels_path);
    ds.images = imgs.bytes;
    if (orientation_fix) {
        const std::size_t M = ds.labels.size();
        for (std::size_t i = 0; i < M; ++i) {
            std::uint8_t* img = ds.images.data() + i * 28 * 28;
            for (int r = 0; r < 28; ++r)
                for (int c = r + 1; c < 28; ++c) std::swap(img[r * 28 + c], img[c * 28 + r]);
        }
    }
    return ds;
}

ComplexField to_input_field(const std::uint8_t* image, const GridGeometry& geometry) {
    if (geometry.nx < 28 || geometry.ny < 28)
        throw std::invalid_argument("to_input_field: grid smaller than 28x28");
    ComplexField field(geometry);
    const int ox = (geometry.nx - 28) / 2;
    const int oy = (geometry.ny - 28) / 2;
    double energy = 0.0;
    for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c) {
            const double v = image[r * 28 + c] / 255.0;
            field.at(ox + c, oy + r) = cdouble{v, 0.0};
            energy += v * v;
        }
    if (energy > 0.0) {
        const double scale = 1.0 / std::sqrt(energy);
        for (auto& v : field.values()) v *= scale;
    }
    return field;
}

std::vector<std::vector<std::uint32_t>> batches(std::size_t count, std::size_t batch_size,
                                                Rng& rng) {
    if (batch_size < 1) throw std::invalid_argument("batches: batch_size must be >= 1");
    std::vector<std::uint32_t> indices(count);
    std::iota(indices.begin(), indices.end(), 0u);
    rng.shuffle(indices);
    std::vector<std::vector<std::uint32_t>> out;
    for (std::size_t start = 0; start < count; start += batch_size) {
        const std::size_t end = std::min(count, start + batch_size);
        out.emplace_back(indices.begin() + start, indices.begin() + end);
    }
    return out;
}

} // namespace diffractnet
