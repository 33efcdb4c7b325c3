#include "fminlab/rotsym.hpp"

#include "fminlab/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fminlab {

using nlohmann::json;

namespace {

double pi_a(const AmbientModel& m) { return M_PI * m.a; }

void require_cylinder(const AmbientModel& m) {
    if (!m.is_cylinder()) throw ArgumentError("rotational profiles live in a cylinder model");
}

struct SeriesCoeffs {
    double th1, th3;
};

SeriesCoeffs series_coeffs(double t_axis, const AmbientModel& m) {
    const double c = m.weight_scale(), n = m.n, a2 = m.a * m.a;
    double th1 = -c * t_axis / n;
    double th3 = (-c * th1 / 2 + c * t_axis * th1 * th1 / 2 + (n - 1) * th1 / (3 * a2)) / (n + 2);
    return {th1, th3};
}

// Fit (sigma, t_axis) so that the series passes through (rho = d, t) at distance sigma.
std::pair<double, double> fit_axis_series(double d, double t, const AmbientModel& m) {
    double sigma = d, te = t;
    for (int it = 0; it < 60; ++it) {
        ProfileState y = axis_series(te, sigma, m);
        double ds = d - y.rho, dt = t - y.t;
        sigma += ds;
        te += dt;
        if (std::abs(ds) + std::abs(dt) < 1e-17) break;
    }
    return {sigma, te};
}

ProfileState rk4(const ProfileState& y, double h, const AmbientModel& m) {
    auto add = [](const ProfileState& a, const ProfileState& k, double s) {
        return ProfileState{a.rho + s * k.rho, a.t + s * k.t, a.theta + s * k.theta};
    };
    ProfileState k1 = fmin_ode_step(y, m);
    ProfileState k2 = fmin_ode_step(add(y, k1, h / 2), m);
    ProfileState k3 = fmin_ode_step(add(y, k2, h / 2), m);
    ProfileState k4 = fmin_ode_step(add(y, k3, h), m);
    return {y.rho + h / 6 * (k1.rho + 2 * k2.rho + 2 * k3.rho + k4.rho),
            y.t + h / 6 * (k1.t + 2 * k2.t + 2 * k3.t + k4.t),
            y.theta + h / 6 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta)};
}

// Series state near an axis sample; side 0 is rho = 0, side 1 is rho = pi a.
ProfileState series_near_axis(const ProfileSample& axis, int side, double sigma, const AmbientModel& m) {
    ProfileState y = axis_series(axis.t, sigma, m);
    if (side == 0) return {y.rho, y.t, axis.theta + y.theta};
    return {pi_a(m) - y.rho, y.t, axis.theta - y.theta};
}

bool finite(const ProfileState& y) {
    return std::isfinite(y.rho) && std::isfinite(y.t) && std::isfinite(y.theta);
}

struct Run {
    ProfileCurve curve;
    ShotRecord record;
};

// Shared integrator for integrate_profile and the shooting events.
Run run_profile(const ProfileState& initial, double h, double length, const AmbientModel& m, bool stop_at_axis,
                bool turn_events, double near) {
    require_cylinder(m);
    if (!(h > 0)) throw ArgumentError("step must be positive");
    if (!(length > h)) throw ArgumentError("profile length must exceed the step");
    const double pia = pi_a(m);
    Run run;
    ProfileCurve& C = run.curve;
    C.model = m;
    C.step = h;
    run.record.event = "none";
    run.record.side = -1;

    ProfileState y;
    double s = 0;
    bool armed;
    if (initial.rho <= 0 || initial.rho >= pia) {
        int side = initial.rho <= 0 ? 0 : 1;
        ProfileSample axis{0.0, side ? pia : 0.0, initial.t, side ? M_PI : 0.0};
        C.samples.push_back(axis);
        C.t_start = initial.t;
        y = series_near_axis(axis, side, h, m);
        s = h;
        C.samples.push_back({s, y.rho, y.t, y.theta});
        armed = false;
    } else {
        y = initial;
        C.samples.push_back({0.0, y.rho, y.t, y.theta});
        C.t_start = std::nan("");
        armed = std::min(y.rho, pia - y.rho) > 3 * h;
    }

    double d_prev2 = std::numeric_limits<double>::infinity(), d_prev = d_prev2;
    while (s < length - 1e-12 * length) {
        double hs = std::min(h, length - s);
        ProfileState yn;
        try {
            yn = rk4(y, hs, m);
        } catch (const IntegrationError&) {
            if (!turn_events) throw;
            run.record.event = "crash";
            run.record.s = s;
            run.record.defect = std::sin(y.theta) >= 0 ? 1.0 : -1.0;
            run.record.side = y.rho < pia / 2 ? 0 : 1;
            return run;
        }
        if (!finite(yn)) throw IntegrationError("non-finite profile state at s = " + std::to_string(s));
        s += hs;
        C.samples.push_back({s, yn.rho, yn.t, yn.theta});
        double d = std::min(yn.rho, pia - yn.rho);
        int side = yn.rho < pia / 2 ? 0 : 1;
        if (d > 3 * h) armed = true;

        if (stop_at_axis && armed && d <= 1.5 * h) {
            auto [sigma, te] = fit_axis_series(d, yn.t, m);
            double th_ser = axis_series(te, sigma, m).theta;
            double nominal = side == 0 ? M_PI : 0.0;
            double pred = side == 0 ? nominal + th_ser : nominal - th_ser;
            double dth = std::remainder(yn.theta - pred, 2 * M_PI);
            double th_axis = side == 0 ? yn.theta - dth - th_ser : yn.theta - dth + th_ser;
            C.samples.push_back({s + sigma, side ? pia : 0.0, te, th_axis});
            C.closure_defect = std::sin(nominal + dth);
            C.closed = std::abs(C.closure_defect) <= 1e-6;
            run.record.event = "hit";
            run.record.side = side;
            run.record.s = s + sigma;
            run.record.defect = C.closure_defect;
            return run;
        }
        if (turn_events && armed && d_prev < d_prev2 && d > d_prev && d_prev < near) {
            run.record.event = "turn";
            run.record.side = side;
            run.record.s = s - hs;
            run.record.defect = std::sin(y.theta);
            return run;
        }
        d_prev2 = d_prev;
        d_prev = d;
        y = yn;
    }
    return run;
}

const std::array<double, 8>& gl_nodes() {
    static const std::array<double, 8> x = [] {
        std::array<double, 8> r{};
        for (int i = 0; i < 8; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / 8.5);
            for (int it = 0; it < 100; ++it) {
                double p = std::legendre(8, z), q = std::legendre(7, z);
                double dp = 8 * (z * p - q) / (z * z - 1);
                double dz = p / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            r[i] = z;
        }
        return r;
    }();
    return x;
}

const std::array<double, 8>& gl_weights() {
    static const std::array<double, 8> w = [] {
        std::array<double, 8> r{};
        for (int i = 0; i < 8; ++i) {
            double z = gl_nodes()[i];
            double dp = 8 * (z * std::legendre(8, z) - std::legendre(7, z)) / (z * z - 1);
            r[i] = 2 / ((1 - z * z) * dp * dp);
        }
        return r;
    }();
    return w;
}

double sphere_area(int dim) { return 2 * std::pow(M_PI, (dim + 1) / 2.0) / std::tgamma((dim + 1) / 2.0); }

} // namespace

ProfileState fmin_ode_step(const ProfileState& y, const AmbientModel& m) {
    require_cylinder(m);
    const double c = m.weight_scale(), a = m.a;
    double ct = std::cos(y.theta), st = std::sin(y.theta);
    if (y.rho <= 0 || y.rho >= pi_a(m)) {
        if (std::abs(st) > 1e-12)
            throw IntegrationError("profile reaches the axis non-perpendicularly (rho = " + std::to_string(y.rho) + ")");
        return {ct, st, -c * y.t * ct / m.n};
    }
    double cot = std::cos(y.rho / a) / std::sin(y.rho / a);
    return {ct, st, -c * y.t * ct - (m.n - 1) * st * cot / a};
}

std::array<Jet, 3> ode_taylor(const ProfileState& y, const AmbientModel& m, int order) {
    require_cylinder(m);
    if (y.rho <= 0 || y.rho >= pi_a(m)) throw GeometryError("Taylor expansion requested on the axis");
    if (order < 0 || order >= kMaxJetOrder + 1) throw ArgumentError("bad Taylor order");
    const double c = m.weight_scale(), a = m.a, n1 = m.n - 1;
    // coefficient-by-coefficient recurrences for sin, cos and quotients
    constexpr int K = kMaxJetOrder + 1;
    std::array<double, K> r{}, t{}, th{}, ct{}, st{}, cr{}, sr{}, cot{}, dth{};
    r[0] = y.rho;
    t[0] = y.t;
    th[0] = y.theta;
    for (int k = 0; k < order; ++k) {
        if (k == 0) {
            ct[0] = std::cos(th[0]);
            st[0] = std::sin(th[0]);
            cr[0] = std::cos(r[0] / a);
            sr[0] = std::sin(r[0] / a);
        } else {
            double sc = 0, ss = 0, rc = 0, rs = 0;
            for (int j = 1; j <= k; ++j) {
                sc += j * th[j] * ct[k - j];
                ss += j * th[j] * st[k - j];
                rc += j * r[j] / a * cr[k - j];
                rs += j * r[j] / a * sr[k - j];
            }
            st[k] = sc / k;
            ct[k] = -ss / k;
            sr[k] = rc / k;
            cr[k] = -rs / k;
        }
        double q = cr[k];
        for (int j = 1; j <= k; ++j) q -= sr[j] * cot[k - j];
        cot[k] = q / sr[0];
        double tc = 0, sct = 0;
        for (int j = 0; j <= k; ++j) {
            tc += t[j] * ct[k - j];
            sct += st[j] * cot[k - j];
        }
        dth[k] = -c * tc - n1 / a * sct;
        r[k + 1] = ct[k] / (k + 1);
        t[k + 1] = st[k] / (k + 1);
        th[k + 1] = dth[k] / (k + 1);
    }
    std::array<Jet, 3> out{jet_constant(0, 1, order), jet_constant(0, 1, order), jet_constant(0, 1, order)};
    for (int k = 0; k <= order; ++k) {
        out[0][k] = r[k];
        out[1][k] = t[k];
        out[2][k] = th[k];
    }
    return out;
}

ProfileState axis_series(double t_axis, double sigma, const AmbientModel& m) {
    SeriesCoeffs k = series_coeffs(t_axis, m);
    double s2 = sigma * sigma, s3 = s2 * sigma;
    double th1 = k.th1, th3 = k.th3;
    ProfileState y;
    y.theta = th1 * sigma + th3 * s3;
    y.rho = sigma - th1 * th1 * s3 / 6 + (std::pow(th1, 4) / 24 - th1 * th3) * s3 * s2 / 5;
    y.t = t_axis + th1 * s2 / 2 + (th3 - std::pow(th1, 3) / 6) * s2 * s2 / 4;
    return y;
}

bool ProfileCurve::on_axis(int i) const {
    double r = samples[i].rho;
    return r <= 0.0 || r >= pi_a(model);
}

int ProfileCurve::segment_of(double s) const {
    auto it = std::upper_bound(samples.begin(), samples.end(), s,
                               [](double v, const ProfileSample& p) { return v < p.s; });
    int i = static_cast<int>(it - samples.begin()) - 1;
    return std::clamp(i, 0, segments() - 1);
}

ProfileState ProfileCurve::state_at(double s) const {
    if (samples.size() < 2) throw ArgumentError("profile has fewer than two samples");
    if (s < s_begin() - 1e-12 || s > s_end() + 1e-12) throw ArgumentError("arclength outside the profile");
    int i = segment_of(s);
    const ProfileSample& A = samples[i];
    const ProfileSample& B = samples[i + 1];
    if (on_axis(i)) return series_near_axis(A, A.rho <= 0 ? 0 : 1, std::max(0.0, s - A.s), model);
    if (on_axis(i + 1)) return series_near_axis(B, B.rho <= 0 ? 0 : 1, std::max(0.0, B.s - s), model);
    double h = B.s - A.s, x = (s - A.s) / h;
    ProfileState fa = fmin_ode_step(A.state(), model), fb = fmin_ode_step(B.state(), model);
    double h00 = (1 + 2 * x) * (1 - x) * (1 - x), h10 = x * (1 - x) * (1 - x), h01 = x * x * (3 - 2 * x),
           h11 = x * x * (x - 1);
    auto herm = [&](double p0, double m0, double p1, double m1) {
        return h00 * p0 + h10 * h * m0 + h01 * p1 + h11 * h * m1;
    };
    return {herm(A.rho, fa.rho, B.rho, fb.rho), herm(A.t, fa.t, B.t, fb.t),
            herm(A.theta, fa.theta, B.theta, fb.theta)};
}

double ProfileCurve::max_abs_t() const {
    double m = 0;
    for (const auto& p : samples) m = std::max(m, std::abs(p.t));
    return m;
}

ProfileCurve integrate_profile(const ProfileState& initial, double step, double length, const AmbientModel& model,
                               const IntegrateOptions& opts) {
    return run_profile(initial, step, length, model, opts.stop_at_axis, false, 0.0).curve;
}

ShotRecord shoot_once(double t0, const AmbientModel& model, const ShootConfig& cfg,
                      std::optional<ProfileCurve>* profile) {
    require_cylinder(model);
    double h = cfg.step > 0 ? cfg.step : model.a * 1e-3;
    double L = cfg.max_length > 0 ? cfg.max_length : 8 * pi_a(model);
    double near = cfg.near_distance > 0 ? cfg.near_distance : model.a / 4;
    Run run = run_profile({0.0, t0, 0.0}, h, L, model, true, true, near);
    run.record.t0 = t0;
    if (profile) *profile = run.record.event == "hit" ? std::optional<ProfileCurve>(run.curve) : std::nullopt;
    return run.record;
}

ShootResult shoot_closed(double t_start, const AmbientModel& model, const ShootConfig& cfg) {
    ShootResult res;
    std::optional<ProfileCurve> prof;
    auto eval = [&](double t0) {
        ShotRecord r = shoot_once(t0, model, cfg, &prof);
        res.trace.push_back(r);
        if (r.event == "hit" && std::abs(r.defect) <= cfg.tol) {
            res.found = true;
            res.profile = prof;
            res.profile->closed = true;
        }
        return r;
    };
    auto usable = [](const ShotRecord& r) { return r.event != "none" && r.defect != 0.0; };

    ShotRecord center = eval(t_start);
    if (res.found) return res;

    // scan outwards on both sides for a sign change of the signed defect
    std::optional<std::pair<ShotRecord, ShotRecord>> bracket;
    ShotRecord last[2] = {center, center};
    for (int k = 1; k <= cfg.scan_steps && !bracket; ++k) {
        for (int dir = 0; dir < 2 && !bracket; ++dir) {
            double t0 = t_start + (dir == 0 ? k : -k) * cfg.scan_delta;
            ShotRecord r = eval(t0);
            if (res.found) return res;
            const ShotRecord& p = last[dir];
            if (usable(r) && usable(p) && r.side == p.side && (r.defect > 0) != (p.defect > 0))
                bracket = std::make_pair(p, r);
            last[dir] = r;
        }
    }
    if (!bracket) return res;

    ShotRecord lo = bracket->first, hi = bracket->second;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        double mid = 0.5 * (lo.t0 + hi.t0);
        if (mid == lo.t0 || mid == hi.t0) break;
        ShotRecord r = eval(mid);
        if (res.found) return res;
        if (r.event == "none") break;
        if ((r.defect > 0) == (lo.defect > 0))
            lo = r;
        else
            hi = r;
    }
    return res;
}

RotationalQuantities rotational_quantities(const ProfileState& y, const AmbientModel& m) {
    auto [R, T, Th] = ode_taylor(y, m, 3);
    const double a = m.a, n1 = m.n - 1, c = m.weight_scale();
    Jet k1 = -differentiate(Th, 0);                                   // order 2
    Jet k2 = truncate(-(sin(Th) * cos(R / a) / sin(R / a)) / a, 2);   // order 2
    Jet al = cos(Th);
    Jet H = k1 + n1 * k2;
    RotationalQuantities q;
    q.r = a * std::sin(y.rho / a);
    q.alpha = al.value();
    q.kappa1 = k1.value();
    q.kappa2 = k2.value();
    q.H = H.value();
    q.A2 = q.kappa1 * q.kappa1 + n1 * q.kappa2 * q.kappa2;
    q.t = y.t;
    q.f = 0.5 * c * y.t * y.t;
    q.grad_alpha_sq = al[1] * al[1];
    q.grad_H_sq = H[1] * H[1];
    double rr = std::cos(y.theta) * std::cos(y.rho / a) / std::sin(y.rho / a) / a; // r'/r
    double dk = q.kappa1 - q.kappa2;
    q.grad_A_sq = k1[1] * k1[1] + n1 * k2[1] * k2[1] + 2 * n1 * dk * dk * rr * rr;
    q.Hf = q.H - c * y.t * q.alpha;
    return q;
}

Jet rotational_field_jet(const ProfileState& y, const AmbientModel& m, const ScalarField& field) {
    auto [R, T, Th] = ode_taylor(y, m, 4);
    const double a = m.a, n1 = m.n - 1, c = m.weight_scale();
    Jet al = cos(Th);
    Jet f = 0.5 * c * T * T;
    auto geometric = [&](FieldKind k) {
        Jet k1 = -differentiate(Th, 0);
        Jet k2 = truncate(-(sin(Th) * cos(R / a) / sin(R / a)) / a, 3);
        Jet H = k1 + n1 * k2;
        if (k == FieldKind::H) return H;
        if (k == FieldKind::H_squared) return H * H;
        return k1 * k1 + n1 * k2 * k2;
    };
    switch (field.kind) {
    case FieldKind::height_t: return T;
    case FieldKind::alpha: return al;
    case FieldKind::alpha_squared: return al * al;
    case FieldKind::f_restricted: return f;
    case FieldKind::H:
    case FieldKind::H_squared:
    case FieldKind::A2: return geometric(field.kind);
    case FieldKind::custom:
        return field.expr->eval(T.layout(), [&](const std::string& v) -> Jet {
            if (v == "t") return T;
            if (v == "f") return f;
            if (v == "alpha") return al;
            throw ArgumentError("profile fields may only use t, f, alpha (got '" + v + "')");
        });
    }
    throw ArgumentError("bad field kind");
}

double rotational_laplacian(const ProfileState& y, const AmbientModel& m, const Jet& u) {
    if (u.order() < 2) throw CapabilityError("rotational Laplacian needs a jet of order >= 2");
    const double a = m.a, c = m.weight_scale();
    double rr = std::cos(y.theta) * std::cos(y.rho / a) / std::sin(y.rho / a) / a;
    double du = u[1], ddu = 2 * u[2];
    return ddu + (m.n - 1) * rr * du - c * y.t * std::sin(y.theta) * du;
}

namespace {

// Several integrals in one pass; F maps a state to a fixed-size vector.
template <int K, class Fn>
Eigen::Matrix<double, K, 1> weighted_integrals(const ProfileCurve& P, Fn&& F, int refine) {
    if (!P.closed) throw PreconditionError("weighted integral needs a closed profile");
    if (refine < 1) throw ArgumentError("refine must be >= 1");
    const AmbientModel& m = P.model;
    const double a = m.a, c = m.weight_scale();
    const auto& x = gl_nodes();
    const auto& w = gl_weights();
    Eigen::Matrix<double, K, 1> total = Eigen::Matrix<double, K, 1>::Zero();
    for (int i = 0; i < P.segments(); ++i) {
        double s0 = P.samples[i].s, s1 = P.samples[i + 1].s;
        double hs = (s1 - s0) / refine;
        Eigen::Matrix<double, K, 1> seg = Eigen::Matrix<double, K, 1>::Zero();
        for (int r = 0; r < refine; ++r) {
            double mid = s0 + (r + 0.5) * hs, half = hs / 2;
            for (int k = 0; k < 8; ++k) {
                ProfileState y = P.state_at(mid + half * x[k]);
                double rad = a * std::sin(y.rho / a);
                seg += (w[k] * half * std::exp(-0.5 * c * y.t * y.t) * std::pow(rad, m.n - 1)) * F(y);
            }
        }
        total += seg;
    }
    return sphere_area(m.n - 1) * total;
}

} // namespace

double weighted_integral(const ProfileCurve& P, const std::function<double(const ProfileState&)>& F, int refine) {
    return weighted_integrals<1>(
        P, [&](const ProfileState& y) { return Eigen::Matrix<double, 1, 1>(F(y)); }, refine)(0);
}

double weighted_integral(const ProfileCurve& P, const ScalarField& field, int refine) {
    const AmbientModel& m = P.model;
    return weighted_integral(
        P, [&](const ProfileState& y) { return rotational_field_jet(y, m, field).value(); }, refine);
}

double weighted_volume(const ProfileCurve& P) {
    return weighted_integral(P, [](const ProfileState&) { return 1.0; });
}

double profile_fminimality_defect(const ProfileCurve& P) {
    double worst = 0;
    for (int i = 0; i < P.segments(); ++i) {
        if (P.on_axis(i) || P.on_axis(i + 1)) continue;
        const ProfileSample& A = P.samples[i];
        const ProfileSample& B = P.samples[i + 1];
        double h = B.s - A.s;
        ProfileState y = rk4(A.state(), h, P.model);
        double e = std::max({std::abs(y.rho - B.rho), std::abs(y.t - B.t), std::abs(y.theta - B.theta)}) / h;
        worst = std::max(worst, e);
    }
    // leaving-axis segments must agree with the series
    for (int i : {0, P.segments() - 1}) {
        int ax = i == 0 ? 0 : P.segments();
        int in = i == 0 ? 1 : P.segments() - 1;
        if (!P.on_axis(ax) || P.on_axis(in) || ax != 0) continue;
        const ProfileSample& A = P.samples[ax];
        const ProfileSample& B = P.samples[in];
        ProfileState y = series_near_axis(A, A.rho <= 0 ? 0 : 1, B.s - A.s, P.model);
        double e = std::max({std::abs(y.rho - B.rho), std::abs(y.t - B.t), std::abs(y.theta - B.theta)}) /
                   (B.s - A.s);
        worst = std::max(worst, e);
    }
    return worst;
}

void require_closed_fminimal(const ProfileCurve& P) {
    if (!P.closed) throw PreconditionError("profile is not closed");
    double d = profile_fminimality_defect(P);
    if (!(d <= 1e-7)) {
        std::ostringstream os;
        os << "profile is not f-minimal: sampled |H_f| estimate " << d;
        throw PreconditionError(os.str());
    }
}

LemmaResiduals lemma_residuals(const ProfileCurve& P) {
    require_closed_fminimal(P);
    const AmbientModel& m = P.model;
    const double n1 = m.n - 1;
    Eigen::Matrix<double, 7, 1> I = weighted_integrals<7>(
        P,
        [&](const ProfileState& y) {
            RotationalQuantities q = rotational_quantities(y, m);
            double al2 = q.alpha * q.alpha;
            Eigen::Matrix<double, 7, 1> v;
            v << q.grad_alpha_sq, al2 * q.A2, q.grad_H_sq, q.H * q.H * q.A2, al2 * (1 - al2), q.grad_A_sq,
                q.A2 * (0.5 - q.A2);
            return v;
        },
        1);
    double I_ga = I(0), I_a2A = I(1), I_gH = I(2), I_H2A = I(3), I_aa = I(4), I_gA = I(5), I_A = I(6);
    LemmaResiduals r;
    r.r1 = std::abs(I_ga - I_a2A);
    r.r2 = std::abs(-I_gH + I_H2A + 0.25 * I_aa);
    r.r3 = std::abs(I_gA + I_A - I_aa / (2 * n1));
    return r;
}

PinchingBand pinching_band(int n, double alpha) {
    if (n < 3) throw ArgumentError("pinching band needs n >= 3");
    if (!(std::abs(alpha) <= 1)) throw ArgumentError("alpha must lie in [-1, 1]");
    double a2 = alpha * alpha;
    double disc = std::max(0.0, 1 - 8.0 / (n - 1) * a2 * (1 - a2));
    return {n, alpha, 0.25 * (1 - std::sqrt(disc)), 0.25 * (1 + std::sqrt(disc))};
}

PinchingBand corollary_band(int n) {
    if (n < 3) throw ArgumentError("pinching band needs n >= 3");
    double disc = 1 - 2.0 / (n - 1);
    return {n, std::nan(""), 0.25 * (1 - std::sqrt(disc)), 0.25 * (1 + std::sqrt(disc))};
}

BandVerdict band_verdict(const ProfileCurve& P) {
    const AmbientModel& m = P.model;
    if (m.n < 3) throw ArgumentError("pinching band needs n >= 3");
    BandVerdict v;
    for (int i = 0; i < static_cast<int>(P.samples.size()); ++i) {
        if (P.on_axis(i)) continue;
        RotationalQuantities q = rotational_quantities(P.samples[i].state(), m);
        PinchingBand b = pinching_band(m.n, std::clamp(q.alpha, -1.0, 1.0));
        double excess = std::max(b.lo - q.A2, q.A2 - b.hi);
        ++v.checked;
        v.max_A2 = std::max(v.max_A2, q.A2);
        if (excess > 1e-12) {
            ++v.violations;
            v.inside_everywhere = false;
        }
        if (excess > v.worst_excess || v.checked == 1) {
            v.worst_excess = excess;
            v.worst_s = P.samples[i].s;
        }
    }
    return v;
}

double distance_to_slice(const ProfileCurve& P) {
    double d = 0, lo = pi_a(P.model), hi = 0;
    for (const auto& p : P.samples) {
        d = std::max(d, std::abs(p.t));
        lo = std::min(lo, p.rho);
        hi = std::max(hi, p.rho);
    }
    // part of the slice the profile never reaches
    return std::max(d, pi_a(P.model) - (hi - lo));
}

std::string profile_to_json(const ProfileCurve& P) {
    json j;
    j["model"] = P.model.name();
    j["n"] = P.model.n;
    j["a"] = P.model.a;
    j["step"] = P.step;
    j["closed"] = P.closed;
    j["closure_defect"] = P.closure_defect;
    j["t_start"] = std::isfinite(P.t_start) ? json(P.t_start) : json(nullptr);
    json s = json::array();
    for (const auto& p : P.samples) s.push_back({p.s, p.rho, p.t, p.theta});
    j["samples"] = s;
    return j.dump(1);
}

ProfileCurve profile_from_json(const std::string& text) {
    ProfileCurve P;
    try {
        json j = json::parse(text);
        int n = j.at("n").get<int>();
        double a = j.at("a").get<double>();
        P.model = AmbientModel::cylinder(n, a);
        P.step = j.at("step").get<double>();
        P.closed = j.value("closed", false);
        P.closure_defect = j.value("closure_defect", 0.0);
        P.t_start = j.contains("t_start") && j["t_start"].is_number() ? j["t_start"].get<double>() : std::nan("");
        for (const auto& row : j.at("samples")) {
            if (row.size() != 4) throw ArgumentError("profile sample must have 4 entries");
            P.samples.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>()});
        }
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad profile file: ") + e.what());
    }
    if (P.samples.size() < 2) throw ArgumentError("profile file needs at least two samples");
    for (std::size_t i = 1; i < P.samples.size(); ++i)
        if (!(P.samples[i].s > P.samples[i - 1].s)) throw ArgumentError("profile arclength must increase");
    return P;
}

void save_profile(const ProfileCurve& P, const std::string& path) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw ArgumentError("cannot write " + tmp.string());
        os << profile_to_json(P) << "\n";
        if (!os) throw ArgumentError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

ProfileCurve load_profile(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("cannot read profile file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return profile_from_json(ss.str());
}

ImmersionChart profile_chart(const ProfileCurve& profile, double axis_margin) {
    require_cylinder(profile.model);
    auto P = std::make_shared<const ProfileCurve>(profile);
    const AmbientModel& m = P->model;
    const int n = m.n;
    const double a = m.a, pia = pi_a(m);
    double lo = std::nan(""), hi = std::nan("");
    for (const auto& p : P->samples) {
        if (std::min(p.rho, pia - p.rho) < axis_margin * a) continue;
        if (std::isnan(lo)) lo = p.s;
        hi = p.s;
    }
    if (std::isnan(lo) || !(hi > lo)) throw GeometryError("profile stays within the axis margin");

    ImmersionChart c;
    c.model = m;
    c.dim = n;
    c.lo.resize(n);
    c.hi.resize(n);
    c.lo(0) = lo;
    c.hi(0) = hi;
    for (int i = 1; i < n; ++i) {
        bool azimuth = i == n - 1;
        c.lo(i) = azimuth ? -3.0 : 0.3;
        c.hi(i) = azimuth ? 3.0 : M_PI - 0.3;
    }
    c.map = [P, a, n](std::span<const Jet> u) {
        const Jet& S = u[0];
        ProfileState y = P->state_at(S.value());
        auto tay = ode_taylor(y, P->model, S.order());
        Jet rho = compose_univariate(tay[0].coeffs(), S);
        Jet t = compose_univariate(tay[1].coeffs(), S);
        std::vector<Jet> w = sphere_point(u.subspan(1), 1.0);
        Jet rs = a * sin(rho / a);
        std::vector<Jet> X;
        X.push_back(a * cos(rho / a));
        for (int k = 0; k < n; ++k) X.push_back(rs * w[k]);
        X.push_back(t);
        return X;
    };
    c.orientation = [P, a, n](const Vec&, const Vec& u) {
        ProfileState y = P->state_at(u(0));
        std::vector<Jet> ang;
        for (int i = 1; i < n; ++i) ang.push_back(jet_constant(u(i), 1, 0));
        std::vector<Jet> w = sphere_point(ang, 1.0);
        Vec drho = Vec::Zero(n + 2);
        drho(0) = -std::sin(y.rho / a);
        for (int k = 0; k < n; ++k) drho(k + 1) = std::cos(y.rho / a) * w[k].value();
        Vec dt = Vec::Zero(n + 2);
        dt(n + 1) = 1.0;
        return Vec(-std::sin(y.theta) * drho + std::cos(y.theta) * dt);
    };
    std::ostringstream os;
    os << "profile(" << m.name() << ", L=" << P->length() << ")";
    c.label = os.str();
    return c;
}

} // namespace fminlab
