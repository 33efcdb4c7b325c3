#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fminlab/errors.hpp"
#include "fminlab/identities.hpp"
#include "fminlab/rotsym.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace fminlab;

namespace {

const ProfileCurve& shot_profile() {
    static const ProfileCurve P = [] {
        ShootResult r = shoot_closed(0.6, AmbientModel::cylinder(3));
        REQUIRE(r.found);
        return *r.profile;
    }();
    return P;
}

ProfileCurve slice_profile(int n) {
    AmbientModel m = AmbientModel::cylinder(n);
    return integrate_profile({0, 0, 0}, m.a * 1e-3, 2 * M_PI * m.a, m);
}

double state_distance(const ProfileState& x, const ProfileState& y) {
    return std::max({std::abs(x.rho - y.rho), std::abs(x.t - y.t), std::abs(x.theta - y.theta)});
}

} // namespace

TEST_CASE("profile system examples") {
    AmbientModel m = AmbientModel::cylinder(3);
    // the slice: moving along rho with no turning
    ProfileState d = fmin_ode_step({1.0, 0.0, 0.0}, m);
    CHECK(d.rho == doctest::Approx(1));
    CHECK(std::abs(d.t) < 1e-15);
    CHECK(std::abs(d.theta) < 1e-15);
    // the equatorial cylinder: vertical at rho = pi a / 2
    ProfileState e = fmin_ode_step({M_PI * m.a / 2, 0.7, M_PI / 2}, m);
    CHECK(std::abs(e.rho) < 1e-15);
    CHECK(e.t == doctest::Approx(1));
    CHECK(std::abs(e.theta) < 1e-15);

    IntegrateOptions o;
    o.stop_at_axis = false;
    ProfileCurve eq = integrate_profile({M_PI * m.a / 2, -1, M_PI / 2}, 1e-2, 2.0, m, o);
    for (const auto& p : eq.samples) {
        CHECK(std::abs(p.rho - M_PI * m.a / 2) < 1e-12);
        CHECK(std::abs(p.t - (-1 + p.s)) < 1e-12);
    }
}

TEST_CASE("ODE states give f-minimal charts") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0, 1);
    for (int n : {2, 3, 4}) {
        AmbientModel m = AmbientModel::cylinder(n);
        for (int trial = 0; trial < 5; ++trial) {
            ProfileState y{m.a * (0.6 + 1.9 * U(rng)), -1.5 + 3 * U(rng), 2 * M_PI * U(rng)};
            IntegrateOptions o;
            o.stop_at_axis = false;
            ProfileCurve P = integrate_profile(y, 1e-3, 0.3, m, o);
            ImmersionChart c = profile_chart(P, 0.05);
            for (const Vec& u : sample_points(c, 10)) {
                CHECK(fminimality_residual(c, u) < 1e-8);
                GeometryAtPoint G = evaluate_geometry(c, u);
                RotationalQuantities q = rotational_quantities(P.state_at(u(0)), m);
                CHECK(std::abs(G.alpha - q.alpha) < 1e-8);
                CHECK(std::abs(G.A2 - q.A2) < 1e-8);
                CHECK(std::abs(G.H - q.H) < 1e-8);
                CHECK(std::abs(G.nablaA_squared() - q.grad_A_sq) < 1e-7);
                CHECK(std::abs(G.gradH.squaredNorm() - q.grad_H_sq) < 1e-7);
            }
        }
    }
}

TEST_CASE("ODE Taylor jets agree with RK4") {
    AmbientModel m = AmbientModel::cylinder(3);
    ProfileState y{1.4, 0.3, 0.9};
    auto tay = ode_taylor(y, m, 4);
    IntegrateOptions o;
    o.stop_at_axis = false;
    ProfileCurve P = integrate_profile(y, 1e-4, 0.05, m, o);
    // order-4 truncation: the error scales like s^5
    double err[2];
    int i = 0;
    for (double s : {0.01, 0.02}) {
        ProfileState r = P.state_at(s);
        auto eval = [&](const Jet& j) {
            double v = 0;
            for (int k = 4; k >= 0; --k) v = v * s + j.coeffs()[k];
            return v;
        };
        err[i++] = std::max({std::abs(eval(tay[0]) - r.rho), std::abs(eval(tay[1]) - r.t),
                             std::abs(eval(tay[2]) - r.theta)});
    }
    CHECK(err[0] < 1e-10);
    INFO("ratio " << err[1] / err[0]);
    CHECK(err[1] / err[0] > 24);
    CHECK(err[1] / err[0] < 40);
}

TEST_CASE("axis series agrees with the integrator") {
    AmbientModel m = AmbientModel::cylinder(3);
    double t_axis = 0.4;
    IntegrateOptions o;
    o.stop_at_axis = false;
    ProfileCurve P = integrate_profile({0, t_axis, 0}, 1e-4, 0.2, m, o);
    CHECK(P.t_start == t_axis);
    CHECK(P.on_axis(0));
    for (double s : {0.005, 0.01}) {
        ProfileState ser = axis_series(t_axis, s, m);
        CHECK(state_distance(ser, P.state_at(s)) < 1e-10);
    }
    // at small distance the series is just the perpendicular launch
    ProfileState y = axis_series(t_axis, 1e-6, m);
    CHECK(y.rho == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(std::abs(y.t - t_axis) < 1e-12);
}

TEST_CASE("RK4 is fourth order") {
    AmbientModel m = AmbientModel::cylinder(3);
    ProfileState y{1.2, 0.5, 0.8};
    IntegrateOptions o;
    o.stop_at_axis = false;
    double L = 1.0;
    std::vector<ProfileState> ends;
    for (double h : {0.02, 0.01, 0.005}) ends.push_back(integrate_profile(y, h, L, m, o).samples.back().state());
    double ratio = state_distance(ends[0], ends[1]) / state_distance(ends[1], ends[2]);
    INFO("ratio " << ratio);
    CHECK(ratio >= 12);
    CHECK(ratio <= 20);
}

TEST_CASE("slice as a profile") {
    for (int n : {2, 3}) {
        ProfileCurve P = slice_profile(n);
        REQUIRE(P.closed);
        CHECK(P.max_abs_t() < 1e-14);
        CHECK(std::abs(P.length() - M_PI * P.model.a) < 2 * P.step);
        CHECK(profile_fminimality_defect(P) < 1e-10);
        CHECK(distance_to_slice(P) < 1e-12);
    }
    ShootResult r = shoot_closed(0, AmbientModel::cylinder(3));
    REQUIRE(r.found);
    CHECK(r.profile->max_abs_t() <= 1e-10);
    CHECK(distance_to_slice(*r.profile) < 1e-10);
}

TEST_CASE("weighted volume of the slice") {
    ProfileCurve P2 = slice_profile(2);
    double V = weighted_volume(P2);
    CHECK(std::abs(V - 8 * M_PI) < 1e-8);
    CHECK(std::abs(weighted_integral(P2, ScalarField::custom("1"), 2) - V) < 1e-10);
    ProfileCurve P3 = slice_profile(3);
    CHECK(std::abs(weighted_volume(P3) - 16 * M_PI * M_PI) < 1e-8);
}

TEST_CASE("divergence theorem on closed profiles") {
    for (const ProfileCurve* P : {&shot_profile()}) {
        const AmbientModel& m = P->model;
        for (const char* expr : {"alpha", "t", "f", "t*alpha"}) {
            ScalarField F = ScalarField::custom(expr);
            auto lap = [&](const ProfileState& y) { return rotational_laplacian(y, m, rotational_field_jet(y, m, F)); };
            double I = weighted_integral(*P, lap);
            double scale = weighted_integral(*P, [&](const ProfileState& y) { return std::abs(lap(y)); });
            INFO(expr << " " << I << " / " << scale);
            CHECK(scale > 1e-3);
            CHECK(std::abs(I) < 1e-7 * scale);
        }
    }
}

TEST_CASE("integral identities") {
    LemmaResiduals s = lemma_residuals(slice_profile(3));
    CHECK(s.r1 < 1e-12);
    CHECK(s.r2 < 1e-12);
    CHECK(s.r3 < 1e-12);
    const ProfileCurve& P = shot_profile();
    CHECK(P.closed);
    CHECK(std::abs(P.closure_defect) < 1e-6);
    CHECK(profile_fminimality_defect(P) < 1e-7);
    LemmaResiduals r = lemma_residuals(P);
    CHECK(r.r1 < 1e-6);
    CHECK(r.r2 < 1e-6);
    CHECK(r.r3 < 1e-6);

    // a translated slice is not f-minimal
    AmbientModel m = AmbientModel::cylinder(3);
    ProfileCurve bad = integrate_profile({0, 0, 0}, 1e-3, 2 * M_PI * m.a, m);
    for (auto& p : bad.samples) p.t += 0.1;
    CHECK_THROWS_AS(require_closed_fminimal(bad), PreconditionError);
    CHECK_THROWS_AS(lemma_residuals(bad), PreconditionError);
    IntegrateOptions o;
    o.stop_at_axis = false;
    ProfileCurve open = integrate_profile({1, 0, 0.5}, 1e-3, 1, m, o);
    CHECK_FALSE(open.closed);
    CHECK_THROWS_AS(weighted_volume(open), PreconditionError);
}

TEST_CASE("pinching band") {
    PinchingBand b = pinching_band(3, std::sqrt(0.5));
    CHECK(b.lo == doctest::Approx(0.25));
    CHECK(b.hi == doctest::Approx(0.25));
    PinchingBand c = corollary_band(5);
    CHECK(c.lo == doctest::Approx(0.25 * (1 - std::sqrt(0.5))));
    CHECK(c.hi == doctest::Approx(0.25 * (1 + std::sqrt(0.5))));
    PinchingBand flat = pinching_band(4, 1.0);
    CHECK(flat.lo == 0);
    CHECK(flat.hi == 0.5);
    CHECK_THROWS_AS(pinching_band(2, 0.5), ArgumentError);
    CHECK_THROWS_AS(corollary_band(2), ArgumentError);
    CHECK_THROWS_AS(pinching_band(3, 1.5), ArgumentError);
    // every alpha band contains the corollary band
    for (double al = -1; al <= 1; al += 0.05) {
        PinchingBand p = pinching_band(5, al);
        CHECK(p.lo <= c.lo + 1e-15);
        CHECK(p.hi >= c.hi - 1e-15);
    }

    BandVerdict v = band_verdict(slice_profile(3));
    CHECK(v.inside_everywhere);
    CHECK(v.violations == 0);
    CHECK(v.checked > 1000);
    CHECK(v.max_A2 < 1e-20);
    CHECK_THROWS_AS(band_verdict(slice_profile(2)), ArgumentError);

    BandVerdict w = band_verdict(shot_profile());
    CHECK_FALSE(w.inside_everywhere);
    CHECK(w.violations > 0);
    CHECK(w.worst_excess > 0);
}

TEST_CASE("shooting") {
    AmbientModel m = AmbientModel::cylinder(3);
    ShotRecord rec = shoot_once(0.6, m, {});
    CHECK(rec.t0 == 0.6);
    CHECK(!rec.event.empty());
    const ProfileCurve& P = shot_profile();
    CHECK(std::abs(P.t_start - 0.5914) < 1e-3);
    CHECK(distance_to_slice(P) > 1e-3);
    ShootResult r = shoot_closed(0.6, m);
    CHECK(!r.trace.empty());
    CHECK(r.profile->t_start == P.t_start);
}

TEST_CASE("profile files") {
    const ProfileCurve& P = shot_profile();
    ProfileCurve Q = profile_from_json(profile_to_json(P));
    CHECK(Q.model.name() == P.model.name());
    CHECK(Q.closed == P.closed);
    CHECK(Q.step == P.step);
    REQUIRE(Q.samples.size() == P.samples.size());
    for (size_t i = 0; i < P.samples.size(); i += 97) {
        CHECK(Q.samples[i].s == P.samples[i].s);
        CHECK(Q.samples[i].theta == P.samples[i].theta);
    }
    auto path = std::filesystem::temp_directory_path() / "fminlab_profile_test.json";
    save_profile(P, path.string());
    ProfileCurve R = load_profile(path.string());
    CHECK(weighted_volume(R) == weighted_volume(P));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_profile(path.string()), ArgumentError);
    CHECK_THROWS_AS(profile_from_json("{\"samples\": 3}"), ArgumentError);
    CHECK_THROWS_AS(profile_from_json("not json"), ArgumentError);
}

TEST_CASE("arclength bookkeeping and errors") {
    const ProfileCurve& P = shot_profile();
    for (size_t i = 1; i < P.samples.size(); ++i) CHECK(P.samples[i].s > P.samples[i - 1].s);
    // |(rho', t')| = 1 along the dense output
    for (double s = P.s_begin() + 0.05; s < P.s_end() - 0.05; s += 0.37) {
        double e = 1e-5;
        ProfileState a = P.state_at(s - e), b = P.state_at(s + e);
        double speed = std::hypot(b.rho - a.rho, b.t - a.t) / (2 * e);
        CHECK(std::abs(speed - 1) < 1e-6);
    }
    CHECK_THROWS_AS(P.state_at(P.s_end() + 1), ArgumentError);

    AmbientModel m = AmbientModel::cylinder(3);
    CHECK_THROWS_AS(integrate_profile({1, 0, 0}, 0, 1, m), ArgumentError);
    CHECK_THROWS_AS(integrate_profile({1, 0, 0}, 0.1, 0.05, m), ArgumentError);
    CHECK_THROWS_AS(integrate_profile({1, 0, 0}, 0.1, 1, AmbientModel::gaussian(3)), ArgumentError);
    CHECK_THROWS_AS(ode_taylor({0, 0, 0}, m), GeometryError);
    // huge heights blow the profile up
    CHECK_THROWS_AS(integrate_profile({1, 1e150, 0.3}, 0.5, 50, m), NumericError);
}
