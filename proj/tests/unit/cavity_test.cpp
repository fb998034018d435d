#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sivcav/cavity.hpp"
#include "sivcav/constants.hpp"

using namespace sivcav;

namespace {

// Reference geometry used throughout: 8 um mirror curvature, 736.7 nm line,
// eighth-order mode. Oracle values evaluated independently from the beam
// formulas w0^2 = (lambda/pi) sqrt(L(RoC-L)), z_R = pi w0^2/lambda,
// w(L)^2 = w0^2 (1 + (L/z_R)^2), V = (pi/4) L w0^2.
constexpr double kRoc = 8.0e-6;
constexpr double kLambda = 736.7e-9;
constexpr int kOrder = 8;
constexpr double kFinesse = 2700.0;

cavity::CavityGeometry reference_geometry() {
    cavity::CavityGeometry geom;
    geom.roc = kRoc;
    geom.wavelength = kLambda;
    geom.eff_length = cavity::effective_length_from_order(kOrder, kLambda);
    geom.transmission_a_ppm = 500.0;
    geom.transmission_b_ppm = 500.0;
    return geom;
}

}  // namespace

TEST_CASE("finesse follows 2 pi over the round-trip loss") {
    CHECK(cavity::finesse_from_losses(500.0, 500.0, 0.0) ==
          doctest::Approx(6283.185307179586).epsilon(1e-12));
    CHECK(cavity::finesse_from_losses(100.0, 100.0, 50.0) ==
          doctest::Approx(constants::two_pi / 250e-6).epsilon(1e-12));
    CHECK_THROWS_AS(cavity::finesse_from_losses(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cavity::finesse_from_losses(-10.0, 500.0, 0.0), std::invalid_argument);
}

TEST_CASE("resonance condition ties length to mode order") {
    CHECK(cavity::effective_length_from_order(8, kLambda) ==
          doctest::Approx(2.9468e-6).epsilon(1e-12));
    CHECK(cavity::effective_length_from_order(11, kLambda) ==
          doctest::Approx(11.0 * kLambda / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(cavity::effective_length_from_order(0, kLambda), std::invalid_argument);
    CHECK_THROWS_AS(cavity::effective_length_from_order(8, -1.0), std::invalid_argument);
}

TEST_CASE("mode order inferred from two adjacent resonances") {
    // Adjacent orders 8 and 9 at a fixed 3.3 um length.
    const double l = 3.3e-6;
    const auto r = cavity::infer_mode_order(2.0 * l / 8.0, 2.0 * l / 9.0);
    CHECK(r.order == 9);
    CHECK(r.residual == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(r.flagged);

    // A 3% mismatched long wavelength leaves a ratio residual near 8e-3,
    // flagged once the tolerance is tighter than that.
    const auto f = cavity::infer_mode_order(2.0 * l / 8.0 * 1.03, 2.0 * l / 9.0, 1e-3);
    CHECK(f.flagged);
    CHECK(f.residual > 1e-3);

    CHECK_THROWS_AS(cavity::infer_mode_order(1.0e-7, 2.0e-7), std::invalid_argument);
}

TEST_CASE("hemispherical mode geometry matches the beam formulas") {
    const auto geom = reference_geometry();
    const auto mode = cavity::mode_geometry(geom, kOrder);

    CHECK(mode.order == kOrder);
    CHECK(mode.waist_flat == doctest::Approx(9.5126098670e-7).epsilon(1e-9));
    CHECK(mode.waist_curved == doctest::Approx(1.1969098348e-6).epsilon(1e-9));
    CHECK(mode.rayleigh_range == doctest::Approx(3.8588560170e-6).epsilon(1e-9));
    CHECK(mode.position_penalty == doctest::Approx(1.5831552284).epsilon(1e-9));
    CHECK(mode.mode_volume_m3 == doctest::Approx(2.0943049251e-18).epsilon(1e-9));
    CHECK(mode.mode_volume_lambda3 == doctest::Approx(5.2380290715).epsilon(1e-9));

    // The emitter mirror is never inside the waist: penalty >= 1.
    CHECK(mode.position_penalty >= 1.0);
}

TEST_CASE("resonator at or beyond concentric length is rejected") {
    cavity::CavityGeometry geom = reference_geometry();
    geom.eff_length = kRoc;
    CHECK_THROWS_AS(cavity::mode_geometry(geom, 1), std::domain_error);
    geom.eff_length = kRoc * 1.5;
    CHECK_THROWS_AS(cavity::mode_geometry(geom, 1), std::domain_error);
}

TEST_CASE("quality factor and linewidth from finesse") {
    const double l = cavity::effective_length_from_order(kOrder, kLambda);
    const auto q = cavity::quality_factor(kFinesse, l, kLambda);
    CHECK(q.finesse == kFinesse);
    // L = n lambda/2 makes Q = n F exactly.
    CHECK(q.q_factor == doctest::Approx(8.0 * kFinesse).epsilon(1e-12));
    CHECK(q.fsr == doctest::Approx(5.0867459278e13).epsilon(1e-9));
    CHECK(q.cavity_linewidth == doctest::Approx(1.8839799733e10).epsilon(1e-9));
    CHECK_THROWS_AS(cavity::quality_factor(0.0, l, kLambda), std::invalid_argument);
}

TEST_CASE("ideal rate figure agrees between unit systems") {
    const auto geom = reference_geometry();
    const auto mode = cavity::mode_geometry(geom, kOrder);
    const double q = 8.0 * kFinesse;

    const double fp = cavity::purcell_ideal(q, mode.mode_volume_lambda3, 1.0);
    CHECK(fp == doctest::Approx(3.1336274629e2).epsilon(1e-9));

    const double fp_si = cavity::purcell_ideal_si(q, mode.mode_volume_m3, kLambda, 1.0);
    CHECK(fp_si == doctest::Approx(fp).epsilon(1e-12));

    // Index n scales the figure by 1/n^3 through the in-medium wavelength.
    CHECK(cavity::purcell_ideal(q, mode.mode_volume_lambda3, 2.0) ==
          doctest::Approx(fp / 8.0).epsilon(1e-12));
}

TEST_CASE("effective lifetime ratio composes branching and position penalty") {
    const double fp = 3.1336274629e2;
    cavity::EmitterCouplingParams coupling;  // branching 0.325, ideal otherwise
    const double penalty = 1.5831552284;

    const auto est = cavity::purcell_effective(fp, coupling, penalty);
    CHECK(est.f_p_ideal == fp);
    CHECK(est.purcell_curved == doctest::Approx(6.5329063076e1).epsilon(1e-9));
    CHECK(est.purcell_flat == doctest::Approx(1.0 + 0.325 * fp).epsilon(1e-12));
    CHECK(est.beta == doctest::Approx(9.8469287706e-1).epsilon(1e-9));

    // Moving the emitter from the waist to the curved mirror divides the
    // coupled part by the penalty.
    CHECK(cavity::purcell_curved_from_flat(est.purcell_flat, penalty) ==
          doctest::Approx(est.purcell_curved).epsilon(1e-12));
}

TEST_CASE("emission fraction saturates toward one") {
    CHECK(cavity::beta_factor(1.0) == 0.0);
    CHECK(cavity::beta_factor(2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cavity::beta_factor(100.0) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK_THROWS_AS(cavity::beta_factor(0.5), std::invalid_argument);
}

TEST_CASE("coupled rate scales linearly with finesse") {
    const auto scaled = cavity::scale_purcell_with_finesse(1.61, 2700.0, 27000.0);
    CHECK(scaled.purcell_curved == doctest::Approx(1.0 + 0.61 * 10.0).epsilon(1e-12));
    CHECK(scaled.beta == doctest::Approx(6.1 / 7.1).epsilon(1e-12));
    // Identity at the reference finesse.
    CHECK(cavity::scale_purcell_with_finesse(1.61, 2700.0, 2700.0).purcell_curved ==
          doctest::Approx(1.61).epsilon(1e-12));
}

TEST_CASE("length stability bound is half a wavelength per finesse") {
    CHECK(cavity::length_stability_bound(2700.0, kLambda) ==
          doctest::Approx(kLambda / (2.0 * 2700.0)).epsilon(1e-12));
    CHECK_THROWS_AS(cavity::length_stability_bound(0.0, kLambda), std::invalid_argument);
}

TEST_CASE("full report composes the individual pieces") {
    cavity::CavityGeometry geom;
    geom.roc = kRoc;
    geom.wavelength = kLambda;
    cavity::EmitterCouplingParams coupling;

    const auto rep = cavity::cavity_report(geom, kOrder, coupling, kFinesse);
    CHECK(rep.finesse == kFinesse);
    CHECK(rep.geometry.eff_length == doctest::Approx(2.9468e-6).epsilon(1e-12));
    CHECK(rep.quality.q_factor == doctest::Approx(2.16e4).epsilon(1e-12));
    CHECK(rep.mode.mode_volume_lambda3 == doctest::Approx(5.2380290715).epsilon(1e-9));
    CHECK(rep.purcell.purcell_curved == doctest::Approx(6.5329063076e1).epsilon(1e-9));

    // Without an override the finesse comes from the coating losses.
    geom.transmission_a_ppm = 500.0;
    geom.transmission_b_ppm = 500.0;
    const auto rep2 = cavity::cavity_report(geom, kOrder, coupling);
    CHECK(rep2.finesse == doctest::Approx(6283.185307179586).epsilon(1e-12));
}

TEST_CASE("geometry and coupling invariants are enforced") {
    cavity::CavityGeometry geom = reference_geometry();
    geom.roc = -1.0;
    CHECK_THROWS_AS(cavity::validate(geom), std::invalid_argument);

    cavity::EmitterCouplingParams coupling;
    coupling.branching_offres = 1.5;
    CHECK_THROWS_AS(cavity::validate(coupling), std::invalid_argument);
    coupling = {};
    coupling.refractive_index = 0.0;
    CHECK_THROWS_AS(cavity::validate(coupling), std::invalid_argument);
}
