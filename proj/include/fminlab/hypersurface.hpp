#pragma once

#include "fminlab/ambient.hpp"
#include "fminlab/expression.hpp"
#include "fminlab/jet.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fminlab {

// Local immersion u -> X(u) into the ambient model, evaluated on jets.
struct ImmersionChart {
    AmbientModel model;
    int dim = 0;
    std::function<std::vector<Jet>(std::span<const Jet>)> map;
    // The normal is oriented so that <nu, orientation(point, u)> > 0.
    std::function<Vec(const Vec& point, const Vec& u)> orientation;
    Vec lo, hi; // domain box
    std::string label;

    bool contains(const Vec& u) const;
};

struct EvalOptions {
    int order = 4;
    // Orthogonal n x n matrix applied to the chart tangents before Gram-Schmidt.
    // Empty means identity.
    Mat basis;
};

struct GeometryAtPoint {
    Vec u;
    Vec point;
    Mat tangent_frame; // D x n, orthonormal e_i
    Vec normal;
    Mat metric, metric_inv; // chart basis
    Mat a;                  // second fundamental form in the frame
    std::vector<double> nablaA; // a_{ij,k} at (i*n + j)*n + k
    double H = 0, Hf = 0, A2 = 0, alpha = 0, t = 0, f = 0;
    Vec gradH, grad_alpha, grad_t, grad_f; // frame components

    int n() const { return static_cast<int>(a.rows()); }
    double nabla_a(int i, int j, int k) const { return nablaA[(i * n() + j) * n() + k]; }
    double nablaA_squared() const;
    // [e_1 .. e_n, nu], D x (n+1)
    Frame frame() const;
};

// Jets of the immersion at one point, kept for the operators module.
struct SurfacePoint {
    AmbientModel model;
    int n = 0, D = 0, order = 0;
    Vec u;
    std::vector<Jet> X;          // order K
    std::vector<Jet> nu;         // order K-1
    std::vector<Jet> g, ginv;    // n x n row-major, order K-1
    std::vector<Jet> h;          // n x n, order K-2
    Jet H, A2, alpha, f, t;      // orders K-2, K-2, K-1, K, K
    std::vector<double> gamma;   // Gamma^k_ij at (k*n + i)*n + j, needs K >= 2
    Mat E;                       // e_a = sum_i E(a,i) X_i
    GeometryAtPoint geo;

    double christoffel(int k, int i, int j) const { return gamma[(k * n + i) * n + j]; }
};

SurfacePoint evaluate_surface(const ImmersionChart& chart, const Vec& u, const EvalOptions& opts = {});
GeometryAtPoint evaluate_geometry(const ImmersionChart& chart, const Vec& u, const EvalOptions& opts = {});
double fminimality_residual(const ImmersionChart& chart, const Vec& u);

// Hyperspherical parametrization of S^m(r) from m angles: polar angles
// u_0..u_{m-2} in (0, pi), azimuth u_{m-1}.
std::vector<Jet> sphere_point(std::span<const Jet> angles, double r);

// Built-in charts. height != 0 gives the translated slice S^n(a) x {height}.
ImmersionChart slice_chart(const AmbientModel& model, double height = 0.0);
ImmersionChart equator_cylinder_chart(const AmbientModel& model);
ImmersionChart shrinker_sphere_chart(const AmbientModel& model);
ImmersionChart shrinker_cylinder_chart(const AmbientModel& model);
// Graph t = phi over the slice (cylinder; variables u1.., x1..x{n+1}) or
// x_{n+1} = phi(x1..xn) over a hyperplane (Gaussian; variables x1..xn or u1..un).
ImmersionChart graph_chart(const AmbientModel& model, const Expression& phi);

// Text file: '#' comments, optional "@model <spec>" and "@domain lo hi lo hi ..."
// directives, remaining lines joined as the expression for phi.
struct GraphFile {
    std::string model; // may be empty
    Expression phi;
    std::vector<double> domain;
};
GraphFile read_graph_file(const std::string& path);

std::vector<std::string> builtin_chart_names();
// Default model for a chart name when none is given.
AmbientModel default_model_for(std::string_view chart_name, int n);
// Resolves "slice", "equator-cylinder", "shrinker-sphere", "shrinker-cylinder",
// "graph:<file>", "profile:<file>".
ImmersionChart make_chart(std::string_view name, const AmbientModel& model);

} // namespace fminlab
