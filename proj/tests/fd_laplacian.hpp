#pragma once

// Finite-difference oracle for the weighted Laplacian of a field on a chart.

#include "fminlab/operators.hpp"

#include <algorithm>

namespace fminlab::testing {

inline double field_value(const ImmersionChart& c, const ScalarField& F, const Vec& u) {
    EvalOptions o;
    o.order = std::max(2, F.depth());
    SurfacePoint S = evaluate_surface(c, u, o);
    return field_jet(S, F).value();
}

// Delta_f from central differences of field values, with the metric data of
// the jet pipeline at the centre. Richardson over steps h and h/2.
inline double fd_laplacian(const ImmersionChart& c, const ScalarField& F, const Vec& u, double h0) {
    SurfacePoint S = evaluate_surface(c, u, {});
    const int n = S.n;
    auto at = [&](double h) {
        Mat hess(n, n);
        Vec grad(n), fgrad(n);
        double v0 = field_value(c, F, u);
        ScalarField weight = ScalarField::of(FieldKind::f_restricted);
        for (int i = 0; i < n; ++i) {
            Vec e = Vec::Unit(n, i) * h;
            grad(i) = (field_value(c, F, u + e) - field_value(c, F, u - e)) / (2 * h);
            fgrad(i) = (field_value(c, weight, u + e) - field_value(c, weight, u - e)) / (2 * h);
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    hess(i, i) = (field_value(c, F, u + e) - 2 * v0 + field_value(c, F, u - e)) / (h * h);
                    continue;
                }
                Vec d = Vec::Unit(n, j) * h;
                hess(i, j) = (field_value(c, F, u + e + d) - field_value(c, F, u + e - d) -
                              field_value(c, F, u - e + d) + field_value(c, F, u - e - d)) /
                             (4 * h * h);
            }
        }
        double lap = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = hess(i, j);
                for (int k = 0; k < n; ++k) s -= S.christoffel(k, i, j) * grad(k);
                lap += S.geo.metric_inv(i, j) * (s - fgrad(i) * grad(j));
            }
        return lap;
    };
    return (4 * at(h0 / 2) - at(h0)) / 3;
}

} // namespace fminlab::testing
