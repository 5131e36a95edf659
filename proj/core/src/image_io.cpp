#include "diffractnet/image_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace diffractnet {

namespace {

// Reads the next PNM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            while (in.get(c) && c != '\n') {
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

} // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image: " + path);
    if (next_token(in) != "P5") throw std::runtime_error("not a binary PGM (P5): " + path);
    GrayImage img;
    try {
        img.width = std::stoi(next_token(in));
        img.height = std::stoi(next_token(in));
        const int maxval = std::stoi(next_token(in));
        if (img.width < 1 || img.height < 1 || maxval < 1 || maxval > 255)
            throw std::runtime_error("unsupported PGM dimensions or maxval");
    } catch (const std::exception&) {
        throw std::runtime_error("malformed PGM header: " + path);
    }
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw std::runtime_error("PGM payload truncated: " + path);
    return img;
}

void write_pgm16(const std::string& path, const RealMap& map) {
    double peak = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) peak = std::max(peak, map[i]);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write image: " + path);
    out << "P5\n" << map.geometry().nx << " " << map.geometry().ny << "\n65535\n";
    const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto v = static_cast<std::uint32_t>(std::lround(map[i] * scale));
        const std::uint16_t s = static_cast<std::uint16_t>(std::min<std::uint32_t>(v, 65535));
        const char be[2] = {static_cast<char>(s >> 8), static_cast<char>(s & 0xff)};
        out.write(be, 2);
    }
    if (!out) throw std::runtime_error("image write failed: " + path);
}

} // namespace diffractnet
