#include <catch2/catch_amalgamated.hpp>

#include "pit2crack/material.hpp"
#include "pit2crack/rng.hpp"

#include "oracles.hpp"

using Catch::Approx;

TEST_CASE("trilinear curve hits the published anchor points") {
    const auto m = p2c::q235();
    CHECK(p2c::trilinear_stress(m.monotonic, 0.0) == 0.0);
    CHECK(p2c::trilinear_stress(m.monotonic, 312.3 / 198000.0) == Approx(312.3).epsilon(1e-12));
    CHECK(p2c::trilinear_stress(m.monotonic, 0.382) == Approx(458.0).epsilon(1e-12));
    // clamped past the ultimate point
    CHECK(p2c::trilinear_stress(m.monotonic, 0.5) == Approx(458.0));
}

TEST_CASE("trilinear plateau holds the yield stress up to the knee") {
    p2c::TrilinearCurve c{198000.0, 312.3, 458.0, 0.382, 0.01};
    const double ey = c.yield_strain();
    CHECK(p2c::trilinear_stress(c, ey) == Approx(312.3).epsilon(1e-12));
    CHECK(p2c::trilinear_stress(c, 0.5 * (ey + 0.01)) == Approx(312.3));
    CHECK(p2c::trilinear_stress(c, 0.01) == Approx(312.3));
    CHECK(p2c::trilinear_stress(c, 0.0101) > 312.3);
}

TEST_CASE("trilinear curve rejects out-of-order strengths, naming the bound") {
    p2c::TrilinearCurve c{198000.0, 500.0, 458.0, 0.382, 500.0 / 198000.0};
    CHECK_THROWS_WITH(p2c::trilinear_stress(c, 0.1),
                      Catch::Matchers::ContainsSubstring("yield_strength < ultimate_strength"));
    CHECK_THROWS_AS(p2c::trilinear_stress(p2c::q235().monotonic, -1e-6), p2c::DomainError);
}

TEST_CASE("trilinear curve is continuous and non-decreasing on random curves") {
    p2c::SplitMix64 rng(7001);
    for (int trial = 0; trial < 200; ++trial) {
        p2c::TrilinearCurve c;
        c.youngs_modulus = rng.uniform(50000.0, 250000.0);
        c.yield_strength = rng.uniform(100.0, 600.0);
        c.ultimate_strength = c.yield_strength + rng.uniform(1.0, 400.0);
        const double ey = c.yield_strain();
        c.knee_strain = ey + rng.uniform(0.0, 0.05);
        c.elongation = c.knee_strain + rng.uniform(0.01, 0.4);

        double prev = 0.0;
        for (int k = 0; k <= 400; ++k) {
            const double eps = c.elongation * 1.2 * k / 400.0;
            const double s = p2c::trilinear_stress(c, eps);
            CHECK(s >= prev);
            prev = s;
        }
        // junction continuity, left/right limits within 1e-9 MPa
        for (double junction : {ey, c.knee_strain, c.elongation}) {
            const double left = p2c::trilinear_stress(c, junction * (1.0 - 1e-13));
            const double right = p2c::trilinear_stress(c, junction * (1.0 + 1e-13));
            CHECK(std::abs(right - left) < 1e-9);
        }
    }
}

TEST_CASE("cyclic stress amplitude anchors") {
    const auto m = p2c::q235();
    CHECK(p2c::cyclic_stress_amplitude(m.cyclic, 198000.0, 0.0) == 0.0);
    // sigma_a = K' makes the plastic term exactly one
    const double eps = 895.0 / 198000.0 + 1.0;
    CHECK(p2c::cyclic_stress_amplitude(m.cyclic, 198000.0, eps) == Approx(895.0).epsilon(1e-9));
}

TEST_CASE("cyclic stress amplitude matches the bisection oracle at 2e-3") {
    const auto m = p2c::q235();
    const double sa = p2c::cyclic_stress_amplitude(m.cyclic, 198000.0, 2e-3);
    const double ref = oracle::cyclic_stress_bisect(m.cyclic, 198000.0, 2e-3);
    CHECK(sa == Approx(ref).epsilon(1e-9));
    CHECK(sa == Approx(329.376831257195).epsilon(1e-9)); // frozen from the oracle
}

TEST_CASE("cyclic stress amplitude is strictly increasing and round-trips") {
    const auto m = p2c::q235();
    p2c::SplitMix64 rng(7002);
    std::vector<double> amps;
    for (int k = 0; k < 1000; ++k) amps.push_back(rng.uniform(1e-6, 2e-2));
    std::sort(amps.begin(), amps.end());
    double prev = 0.0;
    for (double eps : amps) {
        const double sa = p2c::cyclic_stress_amplitude(m.cyclic, 198000.0, eps);
        CHECK(sa > prev);
        prev = sa;
        const double back = sa / 198000.0 + std::pow(sa / 895.0, 1.0 / 0.125);
        CHECK(std::abs(back - eps) < 1e-12 + 1e-9 * eps);
    }
}

TEST_CASE("material json round trip and built-in lookup") {
    const auto m = p2c::q235();
    const auto j = p2c::material_to_json(m);
    const auto back = p2c::material_from_json(j);
    CHECK(back.name == "Q235");
    CHECK(back.elastic.youngs_modulus == m.elastic.youngs_modulus);
    CHECK(back.strain_life.b == m.strain_life.b);
    CHECK(back.cyclic.k_prime == m.cyclic.k_prime);
    CHECK(back.composition.at("Mn") == 1.4);
    CHECK(p2c::load_material("Q235").name == "Q235");

    auto bad = j;
    bad.erase("strain_life");
    CHECK_THROWS_WITH(p2c::material_from_json(bad),
                      Catch::Matchers::ContainsSubstring("strain_life"));

    auto bad2 = j;
    bad2["elastic"]["poisson_elastic"] = 0.6;
    CHECK_THROWS_AS(p2c::material_from_json(bad2), p2c::DomainError);
}

TEST_CASE("q235 carries the published property set") {
    const auto m = p2c::q235();
    CHECK(m.elastic.youngs_modulus == 198000.0);
    CHECK(m.elastic.poisson_elastic == 0.3);
    CHECK(m.elastic.poisson_plastic == 0.5);
    CHECK(m.monotonic.yield_strength == 312.3);
    CHECK(m.monotonic.ultimate_strength == 458.0);
    CHECK(m.monotonic.elongation == 0.382);
    CHECK(m.cyclic.k_prime == 895.0);
    CHECK(m.cyclic.n_prime == 0.125);
    CHECK(m.strain_life.sigma_f_prime == 1010.0);
    CHECK(m.strain_life.b == -0.1113);
    CHECK(m.strain_life.epsilon_f_prime == 2.63);
    CHECK(m.strain_life.c == -0.89);
}
