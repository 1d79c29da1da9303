#include <catch2/catch_amalgamated.hpp>

#include "pit2crack/rainflow.hpp"
#include "pit2crack/rng.hpp"

#include "oracles.hpp"

using Catch::Approx;

TEST_CASE("constant-amplitude series counts one full cycle plus residue halves") {
    const std::vector<double> series{0.0, 1.0, 0.0, 1.0, 0.0};
    const auto cycles = p2c::rainflow(series);
    double total_weight = 0.0;
    for (const auto& c : cycles) {
        CHECK(c.range == 1.0);
        CHECK(c.mean == 0.5);
        total_weight += c.weight;
    }
    CHECK(total_weight == 2.0);
    int full = 0;
    for (const auto& c : cycles)
        if (c.weight == 1.0) ++full;
    CHECK(full == 1);
}

TEST_CASE("a strictly monotone series is one half cycle of range max-min") {
    const std::vector<double> series{-2.0, -1.0, 0.5, 3.0, 7.0};
    const auto cycles = p2c::rainflow(series);
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].range == 9.0);
    CHECK(cycles[0].weight == 0.5);
    CHECK(cycles[0].i_start == 0);
    CHECK(cycles[0].i_end == 4);
}

TEST_CASE("a constant series yields no cycles") {
    const std::vector<double> series{3.0, 3.0, 3.0, 3.0};
    CHECK(p2c::rainflow(series).empty());
}

TEST_CASE("cycle windows point at the bounding turning points") {
    // classic 6-point example: inner cycle (2, -1) closes inside the outer swing
    const std::vector<double> series{-3.0, 2.0, -1.0, 4.0, -3.5, 1.0};
    const auto cycles = p2c::rainflow(series);
    bool found_inner = false;
    for (const auto& c : cycles)
        if (c.weight == 1.0 && c.range == 3.0) {
            found_inner = true;
            CHECK(c.i_start == 1);
            CHECK(c.i_end == 2);
        }
    CHECK(found_inner);
}

TEST_CASE("rainflow matches the exhaustive four-point oracle on random series") {
    p2c::SplitMix64 rng(90210);
    for (int trial = 0; trial < 500; ++trial) {
        const int len = 2 + static_cast<int>(rng.uniform_int(0, 18));
        std::vector<double> series(len);
        for (auto& v : series) v = std::round(rng.uniform(-10.0, 10.0));

        const auto got = p2c::rainflow(series);
        std::vector<oracle::Cycle> impl;
        for (const auto& c : got) impl.push_back({c.range, c.weight});
        const auto want = oracle::rainflow_naive(series);
        REQUIRE(oracle::range_weight_multiset(impl) == oracle::range_weight_multiset(want));
    }
}

TEST_CASE("rainflow counting conserves the series total variation") {
    // A full cycle consumes a down- and an up-swing of its range, a half
    // cycle one swing, so 2 * weight * range summed over all cycles equals
    // the total variation exactly; in particular weight * range stays below
    // the total variation.
    p2c::SplitMix64 rng(90211);
    for (int trial = 0; trial < 200; ++trial) {
        const int len = 2 + static_cast<int>(rng.uniform_int(0, 30));
        std::vector<double> series(len);
        for (auto& v : series) v = rng.uniform(-5.0, 5.0);
        double tv = 0.0;
        for (size_t k = 1; k < series.size(); ++k) tv += std::abs(series[k] - series[k - 1]);
        double counted = 0.0;
        for (const auto& c : p2c::rainflow(series)) counted += c.weight * c.range;
        CHECK(counted <= tv + 1e-12);
        CHECK(2.0 * counted == Approx(tv).margin(1e-9));
    }
    // constant amplitude: 8 swings of range 2
    std::vector<double> ca;
    for (int k = 0; k < 9; ++k) ca.push_back(k % 2 ? 1.0 : -1.0);
    double counted = 0.0;
    for (const auto& c : p2c::rainflow(ca)) counted += c.weight * c.range;
    CHECK(2.0 * counted == Approx(16.0));
}

TEST_CASE("scaling the series scales ranges and keeps the index structure") {
    p2c::SplitMix64 rng(90212);
    std::vector<double> series(25);
    for (auto& v : series) v = rng.uniform(-3.0, 3.0);
    const auto base = p2c::rainflow(series);
    for (double k : {2.5, -1.75}) {
        auto scaled = series;
        for (auto& v : scaled) v *= k;
        const auto got = p2c::rainflow(scaled);
        REQUIRE(got.size() == base.size());
        for (size_t c = 0; c < got.size(); ++c) {
            CHECK(got[c].range == Approx(std::abs(k) * base[c].range).epsilon(1e-12));
            CHECK(got[c].i_start == base[c].i_start);
            CHECK(got[c].i_end == base[c].i_end);
            CHECK(got[c].weight == base[c].weight);
        }
    }
}

TEST_CASE("companion stats cover the cycle window inclusively") {
    const std::vector<double> series{0.0, 1.0, 0.0};
    const std::vector<double> companion{5.0, 9.0, 1.0};
    const auto with = p2c::rainflow(series, companion);
    REQUIRE(with.size() == 2);
    // half (0,1): window {5, 9}; half (1,2): window {9, 1}
    CHECK(with[0].companion_range == 4.0);
    CHECK(with[0].companion_mean == 7.0);
    CHECK(with[1].companion_range == 8.0);
    CHECK(with[1].companion_mean == 5.0);

    CHECK_THROWS_AS(p2c::rainflow(series, std::vector<double>{1.0}), p2c::DomainError);
    CHECK_THROWS_AS(p2c::rainflow(std::vector<double>{1.0}), p2c::DomainError);
}
