#include "fminlab/identities.hpp"

#include "fminlab/errors.hpp"
#include "fminlab/operators.hpp"
#include "fminlab/parallel.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace fminlab {

namespace {

std::vector<IdentityInfo> build_catalog() {
    typedef ModelRequirement R;
    return {
        {IdentityId::FLAP_H, "FLAP_H",
         "Delta_f H = 2 sum_i (nabla^3 f)_{i nu i} - sum_i (nabla^3 f)_{nu i i} + 2 sum_ij a_ij (nabla^2 f)_ij"
         " - Ric_f(nu,nu) H - |A|^2 H",
         R::Any, 4},
        {IdentityId::LF_H, "LF_H",
         "L_f H = 2 sum_i (nabla^3 f)_{i nu i} - sum_i (nabla^3 f)_{nu i i} + 2 sum_ij a_ij (nabla^2 f)_ij", R::Any,
         4},
        {IdentityId::SIMONS_FULL, "SIMONS_FULL",
         "1/2 Delta_f |A|^2 = |nabla A|^2 + 2 sum a_ij a_ik (Ric_f)_jk - (Ric_f)_{nu nu} |A|^2 - |A|^4"
         " + 2 sum a_ij (Ric_f)_{i nu;j} - sum a_ij (Ric_f)_{ij;nu} + sum a_ij R_{i nu j nu;nu}"
         " - 2 sum a_ij a_ik R_{j nu k nu} - 2 sum a_ij a_lk R_{iljk}",
         R::Any, 4},
        {IdentityId::SIMONS_SOLITON, "SIMONS_SOLITON",
         "1/2 Delta_f |A|^2 = |nabla A|^2 + C |A|^2 - |A|^4 + sum a_ij R_{i nu j nu;nu}"
         " - 2 sum a_ij a_ik R_{j nu k nu} - 2 sum a_ij a_lk R_{iljk}  (Ric_f = C g)",
         R::Soliton, 4},
        {IdentityId::ALPHA_LAW, "ALPHA_LAW",
         "Delta_f alpha = Ric_f(X,nu) - |A|^2 alpha - Ric_f(nu,nu) alpha;  L_f alpha = Ric_f(X,nu)"
         "  (alpha = <X,nu>, X parallel)",
         R::Any, 3},
        {IdentityId::ALPHA_SOLITON, "ALPHA_SOLITON", "L_f alpha = C alpha  (Ric_f = C g)", R::Soliton, 3},
        {IdentityId::CYL_DALPHA2, "CYL_DALPHA2", "1/2 Delta_f alpha^2 = |nabla alpha|^2 - |A|^2 alpha^2",
         R::SphereCylinder, 3},
        {IdentityId::CYL_DH2, "CYL_DH2",
         "1/2 Delta_f H^2 = |nabla H|^2 - (|A|^2 + 1/2) H^2 + 1/2 <nabla alpha^2, nabla f>", R::DefaultCylinder, 4},
        {IdentityId::CYL_DA2, "CYL_DA2",
         "1/2 Delta_f |A|^2 = |nabla A|^2 + |A|^2 (1/2 - |A|^2) - 1/(n-1) (|nabla alpha|^2 - alpha^2 |A|^2)"
         " - 1/(n-1) (alpha^2 f - <nabla alpha^2, nabla f>)",
         R::DefaultCylinder, 4},
        {IdentityId::SHRINKER_H2, "SHRINKER_H2", "1/2 Delta_f H^2 = |nabla H|^2 + (1/2 - |A|^2) H^2",
         R::GaussianSpace, 4},
        {IdentityId::SHRINKER_A2, "SHRINKER_A2", "1/2 Delta_f |A|^2 = |nabla A|^2 + (1/2 - |A|^2) |A|^2",
         R::GaussianSpace, 4},
        {IdentityId::SHRINKER_LFH, "SHRINKER_LFH", "L_f H = H", R::GaussianSpace, 4},
        {IdentityId::HEIGHT, "HEIGHT", "|nabla t|^2 = 1 - alpha^2", R::SphereCylinder, 2},
        {IdentityId::DELTAF_F, "DELTAF_F", "Delta_f f = 1/2 (1 - alpha^2) - f", R::DefaultCylinder, 2},
    };
}

double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

} // namespace

const std::vector<IdentityInfo>& list_identities() {
    static const std::vector<IdentityInfo> catalog = build_catalog();
    return catalog;
}

const IdentityInfo& identity_info(IdentityId id) { return list_identities()[static_cast<int>(id)]; }

IdentityId parse_identity(std::string_view name) {
    for (const auto& info : list_identities())
        if (info.name == name) return info.id;
    throw ArgumentError("unknown identity '" + std::string(name) + "'");
}

std::string to_string(IdentityId id) { return identity_info(id).name; }

std::string to_string(ModelRequirement req) {
    switch (req) {
    case ModelRequirement::Any: return "any";
    case ModelRequirement::Soliton: return "soliton";
    case ModelRequirement::SphereCylinder: return "cylinder";
    case ModelRequirement::DefaultCylinder: return "cylinder (default radius)";
    case ModelRequirement::GaussianSpace: return "gaussian";
    }
    return "?";
}

bool is_compatible(IdentityId id, const AmbientModel& model) {
    switch (identity_info(id).model) {
    case ModelRequirement::Any:
    case ModelRequirement::Soliton: return true; // both built-in models are solitons
    case ModelRequirement::SphereCylinder: return model.is_cylinder();
    case ModelRequirement::DefaultCylinder: return model.has_default_radius();
    case ModelRequirement::GaussianSpace: return !model.is_cylinder();
    }
    return false;
}

IdentityTerms evaluate_terms(const ImmersionChart& chart, const Vec& u, int order) {
    EvalOptions opts;
    opts.order = order;
    SurfacePoint S = evaluate_surface(chart, u, opts);
    const GeometryAtPoint& G = S.geo;
    const AmbientModel& M = chart.model;
    const int n = S.n;
    const int nu = n;

    IdentityTerms T;
    T.u = u;
    T.n = n;
    T.C = M.soliton_constant;
    T.geo = G;

    auto lap = [&](const Jet& F) { return F.order() >= 2 ? weighted_laplacian(S, F) : std::nan(""); };
    T.lap_H = lap(S.H);
    T.lap_H2 = lap(S.H * S.H);
    T.lap_A2 = lap(S.A2);
    T.lap_alpha = lap(S.alpha);
    T.lap_alpha2 = lap(S.alpha * S.alpha);
    T.lap_f = lap(S.f);

    Frame F = G.frame();
    WeightDerivatives w = weight_derivatives(M, G.point, F);
    T.ricf_nn = bakry_emery_ricci(M, F, nu, nu);
    Vec X = parallel_field(M);
    for (int b = 0; b <= n; ++b) T.ricf_X_nu += X.dot(F.col(b)) * bakry_emery_ricci(M, F, b, nu);

    const Mat& a = G.a;
    for (int i = 0; i < n; ++i) {
        T.third_1 += w.third_at(i, nu, i);
        T.third_2 += w.third_at(nu, i, i);
        for (int j = 0; j < n; ++j) {
            T.a_hess += a(i, j) * w.hess(i, j);
            T.ricf_d1 += a(i, j) * bakry_emery_ricci_derivative(M, F, i, nu, j);
            T.ricf_d2 += a(i, j) * bakry_emery_ricci_derivative(M, F, i, j, nu);
            T.a_R_d += a(i, j) * curvature_derivative(M, F, i, nu, j, nu, nu);
            for (int k = 0; k < n; ++k) {
                T.aa_ricf += a(i, j) * a(i, k) * bakry_emery_ricci(M, F, j, k);
                T.aa_R_nu += a(i, j) * a(i, k) * curvature(M, F, j, nu, k, nu);
                for (int l = 0; l < n; ++l) T.aa_R += a(i, j) * a(l, k) * curvature(M, F, i, l, j, k);
            }
        }
    }

    if (!G.nablaA.empty()) T.grad_A_sq = G.nablaA_squared();
    if (G.gradH.size()) T.grad_H_sq = G.gradH.squaredNorm();
    T.grad_alpha_sq = G.grad_alpha.squaredNorm();
    T.grad_t_sq = G.grad_t.squaredNorm();
    T.grad_alpha2_dot_grad_f = surface_gradient(S, S.alpha * S.alpha).dot(surface_gradient(S, S.f));
    return T;
}

IdentityValue identity_value(IdentityId id, const IdentityTerms& T) {
    const GeometryAtPoint& G = T.geo;
    const double H = G.H, A2 = G.A2, al = G.alpha, f = G.f;
    const double n1 = T.n - 1;
    double lhs = 0, rhs = 0, extra = 0;
    switch (id) {
    case IdentityId::FLAP_H:
        lhs = T.lap_H;
        rhs = 2 * T.third_1 - T.third_2 + 2 * T.a_hess - T.ricf_nn * H - A2 * H;
        break;
    case IdentityId::LF_H:
        lhs = T.lap_H + (A2 + T.ricf_nn) * H;
        rhs = 2 * T.third_1 - T.third_2 + 2 * T.a_hess;
        break;
    case IdentityId::SIMONS_FULL:
        lhs = 0.5 * T.lap_A2;
        rhs = T.grad_A_sq + 2 * T.aa_ricf - T.ricf_nn * A2 - A2 * A2 + 2 * T.ricf_d1 - T.ricf_d2 + T.a_R_d -
              2 * T.aa_R_nu - 2 * T.aa_R;
        break;
    case IdentityId::SIMONS_SOLITON:
        lhs = 0.5 * T.lap_A2;
        rhs = T.grad_A_sq + T.C * A2 - A2 * A2 + T.a_R_d - 2 * T.aa_R_nu - 2 * T.aa_R;
        break;
    case IdentityId::ALPHA_LAW: {
        lhs = T.lap_alpha;
        rhs = T.ricf_X_nu - A2 * al - T.ricf_nn * al;
        double lf = T.lap_alpha + (A2 + T.ricf_nn) * al;
        extra = std::abs(lf - T.ricf_X_nu);
        break;
    }
    case IdentityId::ALPHA_SOLITON:
        lhs = T.lap_alpha + (A2 + T.ricf_nn) * al;
        rhs = T.C * al;
        break;
    case IdentityId::CYL_DALPHA2:
        lhs = 0.5 * T.lap_alpha2;
        rhs = T.grad_alpha_sq - A2 * al * al;
        break;
    case IdentityId::CYL_DH2:
        lhs = 0.5 * T.lap_H2;
        rhs = T.grad_H_sq - (A2 + 0.5) * H * H + 0.5 * T.grad_alpha2_dot_grad_f;
        break;
    case IdentityId::CYL_DA2:
        lhs = 0.5 * T.lap_A2;
        rhs = T.grad_A_sq + A2 * (0.5 - A2) - (T.grad_alpha_sq - al * al * A2) / n1 -
              (al * al * f - T.grad_alpha2_dot_grad_f) / n1;
        break;
    case IdentityId::SHRINKER_H2:
        lhs = 0.5 * T.lap_H2;
        rhs = T.grad_H_sq + (0.5 - A2) * H * H;
        break;
    case IdentityId::SHRINKER_A2:
        lhs = 0.5 * T.lap_A2;
        rhs = T.grad_A_sq + (0.5 - A2) * A2;
        break;
    case IdentityId::SHRINKER_LFH:
        lhs = T.lap_H + (A2 + T.ricf_nn) * H;
        rhs = H;
        break;
    case IdentityId::HEIGHT:
        lhs = T.grad_t_sq;
        rhs = 1 - al * al;
        break;
    case IdentityId::DELTAF_F:
        lhs = T.lap_f;
        rhs = 0.5 * (1 - al * al) - f;
        break;
    }
    IdentityValue v;
    v.lhs = lhs;
    v.rhs = rhs;
    v.residual = std::max(std::abs(lhs - rhs), extra);
    if (std::isnan(lhs) || std::isnan(rhs)) v.residual = std::nan("");
    return v;
}

std::vector<ResidualReport> check_identities(const std::vector<IdentityId>& ids, const ImmersionChart& chart,
                                             const std::vector<Vec>& samples, double tol) {
    if (!(tol > 0)) throw ArgumentError("tolerance must be positive");
    if (samples.empty()) throw ArgumentError("no sample points");
    int order = 2;
    for (IdentityId id : ids) {
        if (!is_compatible(id, chart.model))
            throw ArgumentError(to_string(id) + " requires model " + to_string(identity_info(id).model) + ", chart " +
                                chart.label + " lives in " + chart.model.name());
        order = std::max(order, identity_info(id).jet_order);
    }

    std::vector<IdentityTerms> terms(samples.size());
    parallel_for(static_cast<int>(samples.size()),
                 [&](int i) { terms[i] = evaluate_terms(chart, samples[i], order); });

    int worst = 0;
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (std::abs(terms[i].geo.Hf) > std::abs(terms[worst].geo.Hf)) worst = static_cast<int>(i);
    double hf = std::abs(terms[worst].geo.Hf);
    if (!(hf <= kFMinimalityTolerance)) {
        std::ostringstream os;
        os.precision(17);
        os << chart.label << " is not f-minimal: |H_f| = " << hf << " at u = (";
        for (int k = 0; k < samples[worst].size(); ++k) os << (k ? ", " : "") << samples[worst](k);
        os << ")";
        throw PreconditionError(os.str());
    }

    std::vector<ResidualReport> out;
    for (IdentityId id : ids) {
        ResidualReport r;
        r.identity = id;
        r.chart = chart.label;
        r.tol = tol;
        bool finite = true;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            IdentityValue v = identity_value(id, terms[i]);
            r.samples.push_back({samples[i], v.lhs, v.rhs, v.residual});
            if (!std::isfinite(v.residual)) finite = false;
            r.max_residual = std::max(r.max_residual, v.residual);
        }
        if (!finite) r.max_residual = std::numeric_limits<double>::infinity();
        r.pass = r.max_residual <= tol;
        out.push_back(std::move(r));
    }
    return out;
}

ResidualReport check_identity(IdentityId id, const ImmersionChart& chart, const std::vector<Vec>& samples,
                              double tol) {
    return check_identities({id}, chart, samples, tol).front();
}

std::vector<Vec> sample_points(const ImmersionChart& chart, int count, std::uint64_t seed) {
    static const int primes[] = {2, 3, 5, 7, 11, 13};
    const int d = chart.dim;
    Vec shift = Vec::Zero(d);
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int k = 0; k < d; ++k) shift(k) = U(rng);
    }
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i) {
        Vec u(d);
        for (int k = 0; k < d; ++k) {
            double h = halton(static_cast<std::uint64_t>(i) + 1, primes[k]) + shift(k);
            h -= std::floor(h);
            u(k) = chart.lo(k) + h * (chart.hi(k) - chart.lo(k));
        }
        pts.push_back(u);
    }
    return pts;
}

} // namespace fminlab
