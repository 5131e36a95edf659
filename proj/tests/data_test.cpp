#include "diffractnet/data.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <fstream>

using namespace diffractnet;
using namespace dntest;

namespace {

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("load_idx parses hand-built fixtures") {
    TempDir dir;
    SUBCASE("rank-1 labels") {
        write_bytes(dir.file("labels.idx"), {0, 0, 0x08, 0x01, 0, 0, 0, 3, 5, 2, 9});
        const auto t = load_idx(dir.file("labels.idx"));
        REQUIRE(t.dims == std::vector<std::uint32_t>{3});
        CHECK(t.bytes == std::vector<std::uint8_t>{5, 2, 9});
    }
    SUBCASE("rank-3 images") {
        std::vector<std::uint8_t> bytes = {0, 0, 0x08, 0x03, 0, 0, 0, 2, 0, 0, 0, 28, 0, 0, 0, 28};
        bytes.resize(16 + 2 * 28 * 28, 7);
        write_bytes(dir.file("images.idx"), bytes);
        const auto t = load_idx(dir.file("images.idx"));
        CHECK(t.dims == std::vector<std::uint32_t>{2, 28, 28});
        CHECK(t.bytes.size() == 1568);
    }
    SUBCASE("bad type byte") {
        write_bytes(dir.file("bad.idx"), {0, 0, 0x07, 0x01, 0, 0, 0, 1, 9});
        CHECK_THROWS(load_idx(dir.file("bad.idx")));
    }
    SUBCASE("truncated payload") {
        write_bytes(dir.file("short.idx"), {0, 0, 0x08, 0x01, 0, 0, 0, 5, 1, 2});
        CHECK_THROWS(load_idx(dir.file("short.idx")));
    }
    SUBCASE("missing file") { CHECK_THROWS(load_idx(dir.file("nope.idx"))); }
}

TEST_CASE("IDX roundtrip is bitwise") {
    TempDir dir;
    const Dataset ds = synthetic_dataset(16, 10, 77);
    save_idx(dir.file("img.idx"), IdxTensor{{16, 28, 28}, ds.images});
    save_idx(dir.file("lbl.idx"), IdxTensor{{16}, ds.labels});
    const Dataset back = load_dataset(dir.file("img.idx"), dir.file("lbl.idx"), 10, false);
    CHECK(back.images == ds.images);
    CHECK(back.labels == ds.labels);
}

TEST_CASE("gzip-compressed IDX files load transparently") {
    TempDir dir;
    const Dataset ds = synthetic_dataset(4, 10, 5);
    save_idx(dir.file("lbl.idx"), IdxTensor{{4}, ds.labels});
    REQUIRE(std::system(("gzip -k " + dir.file("lbl.idx")).c_str()) == 0);
    const auto t = load_idx(dir.file("lbl.idx.gz"));
    CHECK(t.bytes == ds.labels);
}

TEST_CASE("load_dataset validation") {
    TempDir dir;
    const Dataset ds = synthetic_dataset(8, 10, 3);
    save_idx(dir.file("img.idx"), IdxTensor{{8, 28, 28}, ds.images});
    save_idx(dir.file("lbl.idx"), IdxTensor{{8}, ds.labels});

    SUBCASE("count mismatch") {
        save_idx(dir.file("lbl7.idx"), IdxTensor{{7}, std::vector<std::uint8_t>(7, 0)});
        CHECK_THROWS(load_dataset(dir.file("img.idx"), dir.file("lbl7.idx"), 10, false));
    }
    SUBCASE("label out of range") {
        CHECK_THROWS(load_dataset(dir.file("img.idx"), dir.file("lbl.idx"), 2, false));
    }
    SUBCASE("orientation_fix transposes each image") {
        std::vector<std::uint8_t> img(28 * 28, 0);
        img[4 * 28 + 11] = 255; // row 4, col 11
        save_idx(dir.file("one.idx"), IdxTensor{{1, 28, 28}, img});
        save_idx(dir.file("onelbl.idx"), IdxTensor{{1}, {0}});
        const Dataset fixed =
            load_dataset(dir.file("one.idx"), dir.file("onelbl.idx"), 10, true);
        CHECK(fixed.images[11 * 28 + 4] == 255);
        CHECK(fixed.images[4 * 28 + 11] == 0);
    }
}

TEST_CASE("to_input_field encoding") {
    const GridGeometry g{56, 56, 1.0};
    SUBCASE("zero image maps to the zero field") {
        std::vector<std::uint8_t> img(28 * 28, 0);
        CHECK(total_energy(to_input_field(img.data(), g)) == 0.0);
    }
    SUBCASE("single pixel lands centered with unit energy") {
        std::vector<std::uint8_t> img(28 * 28, 0);
        img[0] = 255;
        const auto field = to_input_field(img.data(), g);
        CHECK(std::abs(field.at(14, 14) - cdouble{1.0, 0.0}) < 1e-12);
        CHECK(total_energy(field) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("random nonzero images normalize to unit energy") {
        Rng rng(8);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::uint8_t> img(28 * 28);
            for (auto& b : img) b = static_cast<std::uint8_t>(rng.below(256));
            CHECK(total_energy(to_input_field(img.data(), g)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("grid too small") {
        std::vector<std::uint8_t> img(28 * 28, 1);
        CHECK_THROWS_AS(to_input_field(img.data(), GridGeometry{16, 16, 1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("batches partition the index range") {
    Rng rng(12);
    const auto plan = batches(10, 4, rng);
    REQUIRE(plan.size() == 3);
    CHECK(plan[0].size() == 4);
    CHECK(plan[1].size() == 4);
    CHECK(plan[2].size() == 2);
    std::vector<bool> seen(10, false);
    for (const auto& b : plan)
        for (auto i : b) {
            CHECK_FALSE(seen[i]);
            seen[i] = true;
        }
    for (bool s : seen) CHECK(s);

    Rng a(99), b(99), c(100);
    const auto pa = batches(32, 5, a);
    CHECK(pa == batches(32, 5, b));
    CHECK(pa != batches(32, 5, c));
}
