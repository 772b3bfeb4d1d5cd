#include <doctest.h>

#include <cmath>

#include "vref/device.hpp"
#include "vref/errors.hpp"
#include "helpers.hpp"

using namespace vref;

namespace {

TransistorParams simple_device() {
    TransistorParams d;
    d.cls = test::thin_class(300e-6, 1.3);
    d.w = 1e-6;
    d.l = 1e-6;
    d.mult = 1;
    d.vth0 = 0.4;
    d.alpha = -1e-12;  // negligible but negative
    d.lambda_d = 0.0;
    return d;
}

}  // namespace

TEST_CASE("thermal voltage matches the defining constants") {
    CHECK_THROWS_AS(thermal_voltage(0.0), DomainError);
    CHECK_THROWS_AS(thermal_voltage(-5.0), DomainError);
    // kB*T/q at 25 degC
    CHECK(std::fabs(thermal_voltage(298.15) - 25.693e-3) < 1e-6);
    CHECK(thermal_voltage(298.15) == doctest::Approx(0.0256925791211).epsilon(1e-12));
    // linear in T
    CHECK(thermal_voltage(2 * 298.15) ==
          doctest::Approx(2 * thermal_voltage(298.15)).epsilon(1e-15));
}

TEST_CASE("threshold voltage is affine in temperature and drain bias") {
    TransistorParams d = simple_device();
    d.alpha = -1e-3;
    d.lambda_d = 10e-3;

    CHECK(threshold_voltage(d, default_t0, 0.0) == doctest::Approx(d.vth0).epsilon(1e-15));
    CHECK(threshold_voltage(d, default_t0 + 80.0, 0.0) ==
          doctest::Approx(d.vth0 - 80e-3).epsilon(1e-12));
    CHECK(threshold_voltage(d, default_t0, 1.0) ==
          doctest::Approx(d.vth0 - 10e-3).epsilon(1e-12));

    // superposition of the two corrections
    test::Uniform u(42);
    for (int i = 0; i < 20; ++i) {
        const double t = u(250.0, 380.0);
        const double vds = u(0.0, 2.0);
        const double both = threshold_voltage(d, t, vds) - d.vth0;
        const double t_only = threshold_voltage(d, t, 0.0) - d.vth0;
        const double v_only = threshold_voltage(d, default_t0, vds) - d.vth0;
        CHECK(both == doctest::Approx(t_only + v_only).epsilon(1e-12));
    }
}

TEST_CASE("drain current rejects reverse bias and vanishes at vds = 0") {
    const TransistorParams d = simple_device();
    CHECK_THROWS_AS(drain_current(d, {0.3, -0.1, 300.0}), DomainError);
    CHECK(drain_current(d, {0.3, 0.0, 300.0}) == 0.0);
}

TEST_CASE("drain current reproduces a hand-evaluated bias point") {
    // mu_cox = 300 uA/V^2, W/L = 1, n = 1.3, vth = 0.4 V, vgs = 0.3 V,
    // vds = 0.2 V, T = 300 K -> 1.0225e-8 A (computed independently at high
    // precision from the defining expression).
    const TransistorParams d = simple_device();
    const ModelOptions opts{300.0, true, true};  // t0 = T so alpha drops out
    const double id = drain_current(d, {0.3, 0.2, 300.0}, opts);
    CHECK(id == doctest::Approx(1.02251348186e-8).epsilon(1e-9));
}

TEST_CASE("unit-exponential point gives the prefactor") {
    TransistorParams d = simple_device();
    d.w = 3e-6;
    d.l = 1.5e-6;
    d.mult = 2;
    const double t = 300.0;
    const double vt = thermal_voltage(t);
    const double vds = 12.0 * vt;
    const double vth = threshold_voltage(d, t, vds);
    const double id = drain_current(d, {vth, vds, t});
    const double prefactor = d.mult * d.cls.mu_cox * (d.w / d.l) * vt * vt;
    CHECK(id == doctest::Approx(prefactor).epsilon(1e-4));  // within 0.01 %
}

TEST_CASE("current is monotone in gate and drain bias") {
    test::Uniform u(7);
    for (int i = 0; i < 25; ++i) {
        TransistorParams d = simple_device();
        d.cls.n = u(1.1, 1.8);
        d.vth0 = u(0.2, 0.7);
        d.lambda_d = u(0.0, 50e-3);
        const double t = u(260.0, 370.0);
        double prev = -1.0;
        for (double vgs = 0.0; vgs <= 0.5; vgs += 0.05) {
            const double id = drain_current(d, {vgs, 0.3, t});
            CHECK(id > prev);
            prev = id;
        }
        prev = -1.0;
        for (double vds = 0.0; vds <= 0.5; vds += 0.05) {
            const double id = drain_current(d, {0.3, vds, t});
            CHECK(id >= prev);
            prev = id;
        }
    }
}

TEST_CASE("current scales linearly with mult and aspect ratio") {
    TransistorParams d = simple_device();
    const BiasPoint b{0.3, 0.25, 310.0};
    const double base = drain_current(d, b);
    d.mult = 5;
    CHECK(drain_current(d, b) == doctest::Approx(5.0 * base).epsilon(1e-14));
    d.mult = 1;
    d.w *= 3.0;
    CHECK(drain_current(d, b) == doctest::Approx(3.0 * base).epsilon(1e-14));
}

TEST_CASE("without DIBL the current saturates past a few thermal voltages") {
    const TransistorParams d = simple_device();
    const double t = 300.0;
    const double vt = thermal_voltage(t);
    const double ref = drain_current(d, {0.3, 10.0 * vt, t});
    for (double vds = 10.0 * vt; vds < 1.0; vds += 0.1)
        CHECK(drain_current(d, {0.3, vds, t}) == doctest::Approx(ref).epsilon(5e-5));
}

TEST_CASE("analytic small-signal derivatives match finite differences") {
    test::Uniform u(11);
    for (int i = 0; i < 100; ++i) {
        TransistorParams d = simple_device();
        d.cls.n = u(1.1, 1.8);
        d.vth0 = u(0.25, 0.6);
        d.lambda_d = u(0.0, 60e-3);
        const BiasPoint b{u(0.05, 0.45), u(0.02, 0.8), u(260.0, 370.0)};
        const SmallSignal ss = small_signal(d, b);

        const double h = 1e-5;  // 10 uV step
        const double gm_fd = (drain_current(d, {b.vgs + h, b.vds, b.temperature}) -
                              drain_current(d, {b.vgs - h, b.vds, b.temperature})) /
                             (2 * h);
        const double gds_fd = (drain_current(d, {b.vgs, b.vds + h, b.temperature}) -
                               drain_current(d, {b.vgs, b.vds - h, b.temperature})) /
                              (2 * h);
        CHECK(ss.gm == doctest::Approx(gm_fd).epsilon(1e-3));
        CHECK(ss.gds == doctest::Approx(gds_fd).epsilon(2.5e-3));
    }
}

TEST_CASE("transconductance identity gm*n*VT = I_D") {
    test::Uniform u(13);
    for (int i = 0; i < 20; ++i) {
        TransistorParams d = simple_device();
        d.lambda_d = u(0.0, 30e-3);
        const double t = u(260.0, 370.0);
        const double vt = thermal_voltage(t);
        const BiasPoint b{u(0.1, 0.4), u(10.0 * vt, 1.5), t};
        const double id = drain_current(d, b);
        const SmallSignal ss = small_signal(d, b);
        CHECK(ss.gm * d.cls.n * vt / id == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("with lambda_d = 0 the output conductance is the drain-factor tail") {
    const TransistorParams d = simple_device();
    const double t = 300.0;
    const double vt = thermal_voltage(t);
    for (double vds : {10.0 * vt, 12.0 * vt, 15.0 * vt}) {
        const BiasPoint b{0.3, vds, t};
        const double id = drain_current(d, b);
        const SmallSignal ss = small_signal(d, b);
        const double expected = id / vt * std::exp(-vds / vt);
        CHECK(ss.gds == doctest::Approx(expected).epsilon(1e-3));
    }
}

TEST_CASE("zero current yields zero derivatives") {
    const TransistorParams d = simple_device();
    const BiasPoint b{-30.0, 0.2, 300.0};  // exponent underflows to zero
    CHECK(drain_current(d, b) == 0.0);
    const SmallSignal ss = small_signal(d, b);
    CHECK(ss.gm == 0.0);
    CHECK(ss.gds == 0.0);
}
