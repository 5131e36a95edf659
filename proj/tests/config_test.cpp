#include "diffractnet/config.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <fstream>

using namespace diffractnet;
using namespace dntest;

TEST_CASE("defaults build a valid network and train config") {
    const RunConfig config;
    const auto net = config.net_config();
    CHECK(net.num_layers == 5);
    CHECK(net.geometry.nx == 56);
    CHECK(net.wavelengths.size() == 3);
    CHECK(net.wavelengths.front() == doctest::Approx(0.8));
    CHECK(net.wavelengths.back() == doctest::Approx(1.2));
    const auto train = config.train_config();
    CHECK(train.learning_rate == doctest::Approx(1e-3));
    CHECK(train.optimizer == OptimizerKind::Adam);
}

TEST_CASE("parse, comments, and overrides") {
    const std::string text = R"(
# network shape
net.layers = 3
net.channels = 1   # single frequency
train.lr = 0.01
data.train_images = /tmp/x.idx
)";
    RunConfig config = parse_run_config(text);
    CHECK(config.net_layers == 3);
    CHECK(config.net_channels == 1);
    CHECK(config.train_lr == doctest::Approx(0.01));
    CHECK(config.data_train_images == "/tmp/x.idx");

    apply_override(config, "net.layers=7");
    CHECK(config.net_layers == 7);
    CHECK_THROWS_AS(apply_override(config, "net.layers"), std::invalid_argument);
}

TEST_CASE("unknown keys and malformed values are errors") {
    CHECK_THROWS_AS(parse_run_config("net.layrs = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_config("net.layers = banana\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_config("net.bias = maybe\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_run_config("just some text\n"), std::invalid_argument);
}

TEST_CASE("serialize/parse roundtrip preserves every field") {
    RunConfig config;
    config.net_layers = 4;
    config.net_nx = 32;
    config.net_pitch = 0.75;
    config.net_method = "angular-spectrum";
    config.train_seed = 123456789012345ull;
    config.train_lr = 3.25e-4;
    config.data_test_labels = "a/b c.idx";
    config.net_dispersive = true;

    const RunConfig back = parse_run_config(config.serialize());
    CHECK(back.serialize() == config.serialize());
    CHECK(back.net_pitch == config.net_pitch);
    CHECK(back.train_seed == config.train_seed);
    CHECK(back.data_test_labels == config.data_test_labels);
}

TEST_CASE("load_run_config reads files") {
    TempDir dir;
    {
        std::ofstream f(dir.file("run.cfg"));
        f << "net.classes = 7\n";
    }
    CHECK(load_run_config(dir.file("run.cfg")).net_classes == 7);
    CHECK_THROWS(load_run_config(dir.file("missing.cfg")));
}
