#include "support/reference.hpp"

#include "sasc/errors.hpp"
#include "sasc/numerics.hpp"
#include "sasc/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using sasc::cplx;

namespace {

sasc::OracleConfig small_config(sasc::SystemModel model) {
    sasc::OracleConfig c;
    c.model = std::move(model);
    c.ensemble = 4;
    c.segments_per_member = 2;
    c.segment_length = 256;
    c.overlap = 128;
    c.seed = 12;
    return c;
}

sasc::SystemModel lone_cavity() {
    auto m = ref::fig2_model(1.0);
    m.modes[0].detuning = 0.3;
    m.couplings[0].magnitude = 0.0;
    return m;
}

double direct_kernel(double u, double dt, std::size_t n) {
    const auto w = sasc::hann_window(n);
    cplx s{};
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s += w[k] * std::polar(1.0, -u * dt * static_cast<double>(k));
        norm += w[k] * w[k];
    }
    return dt * std::norm(s) / (2.0 * std::numbers::pi * norm);
}

}  // namespace

TEST_CASE("Hann kernel closed form matches the direct window sum") {
    const double dt = 0.01;
    for (std::size_t n : {16u, 256u}) {
        const double bin = 2.0 * std::numbers::pi / (n * dt);
        for (double u : {0.0, 0.3 * bin, bin, 2.5 * bin, 7.1 * bin, -3.0 * bin}) {
            CAPTURE(u);
            CHECK(sasc::hann_kernel(u, dt, n) == doctest::Approx(direct_kernel(u, dt, n)).epsilon(1e-10).scale(1e-12));
        }
    }
}

TEST_CASE("Hann kernel integrates to one over a period") {
    const double dt = 0.1;
    const std::size_t n = 32;
    const double period = 2.0 * std::numbers::pi / dt;
    const int steps = 200000;
    double s = 0.0;
    for (int i = 0; i < steps; ++i) s += sasc::hann_kernel(-0.5 * period + (i + 0.5) * period / steps, dt, n);
    CHECK(s * period / steps == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("expected Welch estimate of a flat spectrum is flat") {
    const std::vector<double> omega{-1.0, -0.2, 0.0, 0.7};
    const auto e = sasc::welch_expectation([](double) { return 2.5; }, {}, omega, 0.01, 1024);
    for (double v : e) CHECK(v == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("expected Welch estimate conserves the power of a line narrower than a bin") {
    const double dt = 0.01, gamma = 1e-6, nu0 = 0.5;
    const std::size_t n = 1024;
    const double bin = 2.0 * std::numbers::pi / (n * dt);
    const auto lorentz = [&](double nu) { return gamma / ((nu - nu0) * (nu - nu0) + 0.25 * gamma * gamma); };
    std::vector<double> omega;
    for (int k = -40; k <= 40; ++k) omega.push_back(nu0 + 0.3 * bin + k * bin);
    const std::vector<cplx> poles{{nu0, -0.5 * gamma}};
    const auto e = sasc::welch_expectation(lorentz, poles, omega, dt, n);
    double power = 0.0;
    for (double v : e) power += v * bin;
    CHECK(power == doctest::Approx(2.0 * std::numbers::pi).epsilon(2e-3));
    // The line is spread by the window, the central bin holds most of it.
    const double centre = e[40] * bin / (2.0 * std::numbers::pi);
    CHECK(centre == doctest::Approx(sasc::hann_kernel(0.3 * bin, dt, n) * bin).epsilon(1e-3));
}

TEST_CASE("oracle runs are reproducible and independent of the thread count") {
    auto c = small_config(ref::fig2_model(1.0));
    const auto a = sasc::simulate(c);
    c.threads = 3;
    const auto b = sasc::simulate(c);
    REQUIRE(a.ports.size() == 2);
    CHECK(a.omega == b.omega);
    CHECK(a.ports[0].psd == b.ports[0].psd);
    CHECK(a.ports[1].standard_error == b.ports[1].standard_error);
    c.seed = 13;
    CHECK(sasc::simulate(c).ports[0].psd != a.ports[0].psd);
    CHECK(a.max_conjugate_drift < 1e-6);
    CHECK(a.steps_per_member == 384);
}

TEST_CASE("oracle output scales with the square of the noise amplitude") {
    auto c = small_config(ref::fig3_model());
    const auto base = sasc::simulate(c);
    c.noise_scale = 2.0;
    const auto doubled = sasc::simulate(c);
    for (std::size_t p = 0; p < base.ports.size(); ++p)
        for (std::size_t k = 0; k < base.omega.size(); ++k)
            CHECK(doubled.ports[p].psd[k] == doctest::Approx(4.0 * base.ports[p].psd[k]).epsilon(1e-9));
    c.noise_scale = 0.0;
    const auto silent = sasc::simulate(c);
    for (double v : silent.ports[0].psd) CHECK(v == 0.0);
}

TEST_CASE("oracle rejects bad settings and unstable models") {
    auto c = small_config(ref::fig2_model(1.0));
    c.ensemble = 0;
    CHECK_THROWS_AS(sasc::simulate(c), std::invalid_argument);
    c = small_config(ref::fig2_model(1.0));
    c.segment_length = 300;
    CHECK_THROWS_AS(sasc::simulate(c), std::invalid_argument);
    c = small_config(ref::fig2_model(1.0));
    c.dt = 0.5;
    CHECK_THROWS_AS(sasc::simulate(c), std::invalid_argument);
    c = small_config(ref::fig2_model(1.0));
    c.ports = {5};
    CHECK_THROWS_AS(sasc::simulate(c), std::invalid_argument);

    auto unstable = ref::fig2_model(0.1);
    unstable.modes[0].detuning = -1.0;
    unstable.couplings[0].magnitude = 0.5;
    CHECK_THROWS_AS(sasc::simulate(small_config(unstable)), sasc::InstabilityError);
}

TEST_CASE("unresolved bands surround weakly damped resonances only") {
    sasc::StabilityVerdict v;
    v.eigenvalues = {{-1e-5, 1.0}, {-1e-5, -1.0}, {-0.5, 0.2}};
    const auto bands = sasc::unresolved_bands(v, 0.1);
    // One band at each of +-Im lambda per weakly damped eigenvalue.
    REQUIRE(bands.size() == 4);
    for (const auto& [lo, hi] : bands) {
        CHECK(hi - lo == doctest::Approx(0.4));
        CHECK(std::abs(0.5 * (lo + hi)) == doctest::Approx(1.0));
    }
}

TEST_CASE("comparison scores a matching and a mismatched prediction") {
    sasc::PortSpectrum est;
    est.psd = {1.0, 1.1, 0.9, 1.0};
    est.standard_error = {0.1, 0.1, 0.1, 0.1};
    const std::vector<double> omega{-1.0, 0.0, 1.0, 2.0};
    sasc::SpectrumTable pred;
    pred.omega = {-2.0, 3.0};
    pred.add_column("S", {1.0, 1.0});
    const auto ok = sasc::compare(omega, est, pred, "S");
    CHECK(ok.compared == 4);
    CHECK(ok.passed);
    CHECK(ok.z[1] == doctest::Approx(1.0));

    sasc::SpectrumTable high = pred;
    high.columns[0] = {1.5, 1.5};
    CHECK_FALSE(sasc::compare(omega, est, high, "S").passed);

    sasc::CompareOptions o;
    o.excluded_bands = {{-0.5, 0.5}};
    const auto cut = sasc::compare(omega, est, pred, "S", o);
    CHECK(cut.excluded == 1);
    CHECK(cut.compared == 3);

    sasc::SpectrumTable far;
    far.omega = {10.0, 11.0};
    far.add_column("S", {1.0, 1.0});
    CHECK_THROWS_AS(sasc::compare(omega, est, far, "S"), std::invalid_argument);
}

TEST_CASE("uncoupled cavity output sits at the vacuum level") {
    auto c = small_config(lone_cavity());
    c.ensemble = 16;
    c.segments_per_member = 8;
    c.segment_length = 4096;
    c.overlap = 2048;
    c.ports = {0};
    const auto run = sasc::simulate(c);
    sasc::TransferOptions o;
    o.convention = sasc::FrequencyConvention::kFourier;
    const auto pred = sasc::expected_welch_spectrum(c.model, run, 0, o);
    for (double v : pred.columns[0]) CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
    const auto rep = sasc::compare(run.omega, run.ports[0], pred, pred.names[0]);
    CHECK(rep.compared > 30);
    CHECK(rep.passed);
}
