#pragma once

#include "fminlab/expression.hpp"
#include "fminlab/hypersurface.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace fminlab {

enum class FieldKind { height_t, alpha, H, H_squared, A2, alpha_squared, f_restricted, custom };

// Scalar function on the hypersurface. Custom expressions may use the ambient
// coordinates x1..xD and the restricted quantities t, f, alpha.
struct ScalarField {
    FieldKind kind = FieldKind::height_t;
    std::shared_ptr<const Expression> expr;

    static ScalarField of(FieldKind kind);
    static ScalarField custom(std::string_view source);
    // "height_t", "alpha", ..., or "custom:<expression>"
    static ScalarField parse(std::string_view name);

    std::string name() const;
    // Number of chart derivatives consumed by the field's own construction.
    int depth() const;
};

// The field as a jet at the point; order = surface order - depth().
Jet field_jet(const SurfacePoint& S, const ScalarField& field);

// Frame components of the tangential gradient of a jet field (order >= 1).
Vec surface_gradient(const SurfacePoint& S, const Jet& F);
// Delta_f F at the point; F must have order >= 2.
double weighted_laplacian(const SurfacePoint& S, const Jet& F);
// Delta_f F + (|A|^2 + Ric_f(nu, nu)) F
double lf_apply(const SurfacePoint& S, const Jet& F);
double ric_f_normal(const SurfacePoint& S);

double weighted_laplacian(const ImmersionChart& chart, const ScalarField& field, const Vec& u, int order = 4);
double lf_apply(const ImmersionChart& chart, const ScalarField& field, const Vec& u, int order = 4);

} // namespace fminlab
