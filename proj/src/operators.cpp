#include "fminlab/operators.hpp"

#include "fminlab/errors.hpp"

#include <algorithm>

namespace fminlab {

namespace {

const char* kNames[] = {"height_t", "alpha", "H", "H_squared", "A2", "alpha_squared", "f_restricted", "custom"};

int custom_depth(const Expression& e) {
    int d = 0;
    for (const std::string& v : e.variables())
        if (v == "alpha") d = std::max(d, 1);
    return d;
}

} // namespace

ScalarField ScalarField::of(FieldKind kind) {
    if (kind == FieldKind::custom) throw ArgumentError("custom field needs an expression");
    ScalarField f;
    f.kind = kind;
    return f;
}

ScalarField ScalarField::custom(std::string_view source) {
    ScalarField f;
    f.kind = FieldKind::custom;
    f.expr = std::make_shared<const Expression>(Expression::parse(source));
    for (const std::string& v : f.expr->variables()) {
        bool coord = v.size() > 1 && v[0] == 'x' && v.find_first_not_of("0123456789", 1) == std::string::npos;
        if (!coord && v != "t" && v != "f" && v != "alpha")
            throw ArgumentError("custom field: unknown variable '" + v + "'");
    }
    return f;
}

ScalarField ScalarField::parse(std::string_view name) {
    if (name.rfind("custom:", 0) == 0) return custom(name.substr(7));
    for (int k = 0; k < 7; ++k)
        if (name == kNames[k]) return of(static_cast<FieldKind>(k));
    throw ArgumentError("unknown field '" + std::string(name) + "'");
}

std::string ScalarField::name() const {
    if (kind == FieldKind::custom) return "custom:" + expr->source();
    return kNames[static_cast<int>(kind)];
}

int ScalarField::depth() const {
    switch (kind) {
    case FieldKind::height_t:
    case FieldKind::f_restricted: return 0;
    case FieldKind::alpha:
    case FieldKind::alpha_squared: return 1;
    case FieldKind::H:
    case FieldKind::H_squared:
    case FieldKind::A2: return 2;
    case FieldKind::custom: return custom_depth(*expr);
    }
    return 0;
}

Jet field_jet(const SurfacePoint& S, const ScalarField& field) {
    switch (field.kind) {
    case FieldKind::height_t: return S.t;
    case FieldKind::f_restricted: return S.f;
    case FieldKind::alpha: return S.alpha;
    case FieldKind::alpha_squared: return S.alpha * S.alpha;
    case FieldKind::H: return S.H;
    case FieldKind::H_squared: return S.H * S.H;
    case FieldKind::A2: return S.A2;
    case FieldKind::custom: {
        int order = S.order - field.depth();
        const JetLayout& L = JetLayout::get(S.n, order);
        return field.expr->eval(L, [&](const std::string& v) -> Jet {
            if (v == "t") return truncate(S.t, order);
            if (v == "f") return truncate(S.f, order);
            if (v == "alpha") return truncate(S.alpha, order);
            int k = std::stoi(v.substr(1)) - 1;
            if (k < 0 || k >= S.D) throw ArgumentError("custom field: coordinate '" + v + "' out of range");
            return truncate(S.X[k], order);
        });
    }
    }
    throw ArgumentError("bad field kind");
}

Vec surface_gradient(const SurfacePoint& S, const Jet& F) {
    if (F.order() < 1) throw CapabilityError("gradient needs a jet of order >= 1");
    Vec d(S.n);
    for (int i = 0; i < S.n; ++i) d(i) = F[1 + i];
    return S.E * d;
}

double weighted_laplacian(const SurfacePoint& S, const Jet& F) {
    if (F.order() < 2)
        throw CapabilityError("weighted Laplacian needs a field jet of order >= 2, got " +
                              std::to_string(F.order()));
    const int n = S.n;
    const Mat& gi = S.geo.metric_inv;
    double lap = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            MultiIndex b{};
            b[i] += 1;
            b[j] += 1;
            double hess = extract_partial(F, b);
            for (int k = 0; k < n; ++k) hess -= S.christoffel(k, i, j) * F[1 + k];
            lap += gi(i, j) * (hess - S.f[1 + i] * F[1 + j]);
        }
    return lap;
}

double ric_f_normal(const SurfacePoint& S) {
    Frame fr = S.geo.frame();
    return bakry_emery_ricci(S.model, fr, S.n, S.n);
}

double lf_apply(const SurfacePoint& S, const Jet& F) {
    return weighted_laplacian(S, F) + (S.geo.A2 + ric_f_normal(S)) * F.value();
}

namespace {

SurfacePoint surface_for(const ImmersionChart& chart, const ScalarField& field, const Vec& u, int order) {
    if (order - field.depth() < 2)
        throw CapabilityError("field " + field.name() + " needs jet order " + std::to_string(field.depth() + 2) +
                              ", have " + std::to_string(order));
    EvalOptions o;
    o.order = order;
    return evaluate_surface(chart, u, o);
}

} // namespace

double weighted_laplacian(const ImmersionChart& chart, const ScalarField& field, const Vec& u, int order) {
    SurfacePoint S = surface_for(chart, field, u, order);
    return weighted_laplacian(S, field_jet(S, field));
}

double lf_apply(const ImmersionChart& chart, const ScalarField& field, const Vec& u, int order) {
    SurfacePoint S = surface_for(chart, field, u, order);
    return lf_apply(S, field_jet(S, field));
}

} // namespace fminlab
