#pragma once

#include "fminlab/jet.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fminlab {

typedef Eigen::VectorXd Vec;
typedef Eigen::MatrixXd Mat;

enum class ModelKind { GaussianSpace, SphereCylinder };

// Weighted ambient space. GaussianSpace is R^{n+1} with f = |x|^2/4.
// SphereCylinder is S^n(a) x R embedded in R^{n+2} as (x, t), |x| = a, with
// f = c t^2 / 2 and c = (n-1)/a^2 so that Ric + Hess f = c g.
struct AmbientModel {
    ModelKind kind = ModelKind::GaussianSpace;
    int n = 2;
    double a = 0.0;
    double soliton_constant = 0.5;

    static AmbientModel gaussian(int n);
    static AmbientModel cylinder(int n);
    static AmbientModel cylinder(int n, double a);
    // "gaussian:n" or "cylinder:n[:a]"
    static AmbientModel parse(std::string_view spec);

    std::string name() const;
    bool is_cylinder() const { return kind == ModelKind::SphereCylinder; }
    bool has_default_radius() const;
    int ambient_dim() const { return is_cylinder() ? n + 2 : n + 1; }
    // f = weight_scale * t^2 / 2 on the cylinder
    double weight_scale() const { return soliton_constant; }
    static double default_radius(int n);

    // Throws GeometryError when p is off the model.
    void check_point(const Vec& p, double rel_tol = 1e-12) const;

    double weight(const Vec& p) const;
    Vec weight_gradient(const Vec& p) const;
    Jet weight(std::span<const Jet> X) const;
    std::vector<Jet> weight_gradient(std::span<const Jet> X) const;
};

// Columns are ambient Cartesian vectors, orthonormal for the ambient metric.
typedef Mat Frame;

struct WeightDerivatives {
    double f = 0.0;
    Vec grad;                  // f_i
    Mat hess;                  // f_ik
    std::vector<double> third; // f_jik, row-major, all zero for both models
    double third_at(int j, int i, int k) const;
};

WeightDerivatives weight_derivatives(const AmbientModel& model, const Vec& p, const Frame& frame);

// R(e_i, e_j, e_k, e_l) with R_ijij the sectional curvature of the (i,j) plane.
double curvature(const AmbientModel& model, const Frame& frame, int i, int j, int k, int l);
double ricci(const AmbientModel& model, const Frame& frame, int i, int k);
double bakry_emery_ricci(const AmbientModel& model, const Frame& frame, int i, int k);
// (nabla_{e_m} R)(e_i, e_j, e_k, e_l); both models are locally symmetric.
double curvature_derivative(const AmbientModel& model, const Frame& frame, int i, int j, int k, int l,
                            int m);

// (nabla_{e_m} Ric_f)(e_i, e_k); Ric_f = C g is parallel for both models.
double bakry_emery_ricci_derivative(const AmbientModel& model, const Frame& frame, int i, int k, int m);

// Unit parallel field: d/dt on the cylinder, e_1 in Gaussian space.
Vec parallel_field(const AmbientModel& model);

} // namespace fminlab
