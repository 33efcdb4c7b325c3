#pragma once

#include "fminlab/ambient.hpp"
#include "fminlab/hypersurface.hpp"
#include "fminlab/operators.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fminlab {

// Profile of a rotational hypersurface in S^n(a) x R. rho is the geodesic
// distance from the pole e_1, theta the tangent angle: rho' = cos theta,
// t' = sin theta. The normal is -sin(theta) d_rho + cos(theta) d_t.
struct ProfileState {
    double rho = 0, t = 0, theta = 0;
};

struct ProfileSample {
    double s = 0, rho = 0, t = 0, theta = 0;
    ProfileState state() const { return {rho, t, theta}; }
};

// f-minimal profile system; rho must be strictly inside (0, pi a).
ProfileState fmin_ode_step(const ProfileState& y, const AmbientModel& model);

// Taylor coefficients (in arclength) of the solution through y, as
// univariate jets of the given order: {rho, t, theta}.
std::array<Jet, 3> ode_taylor(const ProfileState& y, const AmbientModel& model, int order = 4);

// Solution leaving the axis rho = 0 perpendicularly at height t_axis, at
// distance sigma along the profile.
ProfileState axis_series(double t_axis, double sigma, const AmbientModel& model);

class ProfileCurve {
public:
    AmbientModel model;
    double step = 0;
    std::vector<ProfileSample> samples;
    bool closed = false;
    double closure_defect = 0; // signed sin of the end angle mismatch at the axis
    double t_start = 0;        // height at the starting axis point, when started on the axis

    double length() const { return samples.back().s - samples.front().s; }
    double s_begin() const { return samples.front().s; }
    double s_end() const { return samples.back().s; }
    bool on_axis(int i) const;
    int segments() const { return static_cast<int>(samples.size()) - 1; }
    int segment_of(double s) const;
    // Dense output: axis Taylor series on axis segments, cubic Hermite elsewhere.
    ProfileState state_at(double s) const;
    double max_abs_t() const;
};

struct IntegrateOptions {
    // stop and close when the profile comes within 1.5 steps of an axis
    bool stop_at_axis = true;
};

// Fixed-step RK4. An initial rho <= 0 (or >= pi a) starts on the axis with
// the series; the launch is then perpendicular and theta is ignored.
ProfileCurve integrate_profile(const ProfileState& initial, double step, double length, const AmbientModel& model,
                               const IntegrateOptions& opts = {});

struct ShootConfig {
    double step = 0;          // 0: a * 1e-3
    double max_length = 0;    // 0: 8 pi a
    double near_distance = 0; // 0: a / 4, axis distance that counts as an approach
    double scan_delta = 0.1;
    int scan_steps = 5;
    int max_iterations = 80;
    double tol = 1e-6;
};

struct ShotRecord {
    double t0 = 0;
    std::string event; // "hit", "turn", "none", "crash"
    int side = 0;      // 0 = rho = 0 axis, 1 = rho = pi a axis, -1 none
    double s = 0;
    double defect = 0; // signed; +-1 for turns
};

struct ShootResult {
    bool found = false;
    std::optional<ProfileCurve> profile;
    std::vector<ShotRecord> trace;
};

ShotRecord shoot_once(double t0, const AmbientModel& model, const ShootConfig& cfg,
                      std::optional<ProfileCurve>* profile = nullptr);
ShootResult shoot_closed(double t_start, const AmbientModel& model, const ShootConfig& cfg = {});

// Closed-form quantities of the rotational hypersurface through a state.
struct RotationalQuantities {
    double r = 0, alpha = 0, H = 0, A2 = 0, kappa1 = 0, kappa2 = 0, t = 0, f = 0;
    double grad_alpha_sq = 0, grad_H_sq = 0, grad_A_sq = 0;
    double Hf = 0;
};

RotationalQuantities rotational_quantities(const ProfileState& y, const AmbientModel& model);
// Field as a univariate jet (order >= 2) along the profile through y.
Jet rotational_field_jet(const ProfileState& y, const AmbientModel& model, const ScalarField& field);
// Delta_f of a rotationally invariant field, from its profile jet.
double rotational_laplacian(const ProfileState& y, const AmbientModel& model, const Jet& u);

// omega_{n-1} int F e^{-f} r^{n-1} ds, composite Gauss-Legendre (8 nodes per
// step, times refine).
double weighted_integral(const ProfileCurve& profile, const std::function<double(const ProfileState&)>& integrand,
                         int refine = 1);
double weighted_integral(const ProfileCurve& profile, const ScalarField& integrand, int refine = 1);
double weighted_volume(const ProfileCurve& profile);

// max over steps of the one-step RK4 mismatch divided by the step: estimates
// |H_f| of the sampled curve.
double profile_fminimality_defect(const ProfileCurve& profile);
void require_closed_fminimal(const ProfileCurve& profile);

struct LemmaResiduals {
    double r1 = 0, r2 = 0, r3 = 0;
};
LemmaResiduals lemma_residuals(const ProfileCurve& profile);

struct PinchingBand {
    int n = 3;
    double alpha = 0;
    double lo = 0, hi = 0;
};
PinchingBand pinching_band(int n, double alpha);
// alpha-free form 1/4 (1 -+ sqrt(1 - 2/(n-1)))
PinchingBand corollary_band(int n);

struct BandVerdict {
    bool inside_everywhere = true;
    int violations = 0;
    int checked = 0;
    double worst_excess = 0; // largest distance outside the band
    double worst_s = 0;
    double max_A2 = 0;
};
BandVerdict band_verdict(const ProfileCurve& profile);

// Sampled distance between profile and slice t = 0 in the (rho, t) half-strip:
// max |t|, or the uncovered rho range if larger.
double distance_to_slice(const ProfileCurve& profile);

std::string profile_to_json(const ProfileCurve& profile);
ProfileCurve profile_from_json(const std::string& text);
void save_profile(const ProfileCurve& profile, const std::string& path);
ProfileCurve load_profile(const std::string& path);

// Chart (s, angles) of the rotational hypersurface, built from ODE Taylor
// expansions at dense-output states.
ImmersionChart profile_chart(const ProfileCurve& profile, double axis_margin = 0.1);

} // namespace fminlab
