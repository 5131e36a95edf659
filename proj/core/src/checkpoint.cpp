#include "diffractnet/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace diffractnet {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

void put_f64(std::string& out, double v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

class Reader {
public:
    Reader(const std::string& data, std::size_t pos) : data_(data), pos_(pos) {}

    std::uint32_t u32() {
        check(4);
        std::uint32_t v;
        std::memcpy(&v, data_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }

    double f64() {
        check(8);
        double v;
        std::memcpy(&v, data_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }

    std::string bytes(std::size_t n) {
        check(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t position() const { return pos_; }

private:
    void check(std::size_t n) const {
        if (pos_ + n > data_.size()) throw std::runtime_error("checkpoint truncated");
    }
    const std::string& data_;
    std::size_t pos_;
};

std::uint32_t crc32_of(const std::string& data, std::size_t n) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(n)));
}

} // namespace

void save_checkpoint(const std::string& path, const RunConfig& config, const MFDNet& net) {
    std::string out;
    out.append("MFDN", 4);
    put_u32(out, kCheckpointVersion);
    const std::string config_text = config.serialize();
    put_u32(out, static_cast<std::uint32_t>(config_text.size()));
    out.append(config_text);
    for (const auto& layer : net.layers()) {
        for (double a : layer.amplitude) put_f64(out, a);
        for (double p : layer.phase) put_f64(out, p);
    }
    if (net.config().bias_enabled)
        for (const auto& layer : net.layers()) {
            put_f64(out, layer.bias.real());
            put_f64(out, layer.bias.imag());
        }
    for (double w : net.channel_weights()) put_f64(out, w);
    put_u32(out, crc32_of(out, out.size()));

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write checkpoint: " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path, KernelCache& kernels) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    if (data.size() < 12 || data.compare(0, 4, "MFDN") != 0)
        throw std::runtime_error("checkpoint bad magic: " + path);
    if (data.size() < 8)
        throw std::runtime_error("checkpoint truncated: " + path);
    {
        Reader tail(data, data.size() - 4);
        const std::uint32_t stored = tail.u32();
        if (stored != crc32_of(data, data.size() - 4))
            throw std::runtime_error("checkpoint checksum mismatch: " + path);
    }

    Reader r(data, 4);
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint unsupported version: " + path);
    const std::uint32_t config_len = r.u32();
    RunConfig config = parse_run_config(r.bytes(config_len));

    MFDNet net(config.net_config(), kernels);
    for (auto& layer : net.layers()) {
        for (auto& a : layer.amplitude) a = r.f64();
        for (auto& p : layer.phase) p = r.f64();
    }
    if (net.config().bias_enabled)
        for (auto& layer : net.layers()) {
            const double re = r.f64();
            const double im = r.f64();
            layer.bias = cdouble{re, im};
        }
    for (auto& w : net.channel_weights()) w = r.f64();
    if (r.position() != data.size() - 4)
        throw std::runtime_error("checkpoint trailing bytes: " + path);
    return LoadedCheckpoint{std::move(config), std::move(net)};
}

} // namespace diffractnet
