#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fminlab/errors.hpp"
#include "fminlab/hypersurface.hpp"
#include "fminlab/identities.hpp"

#include <Eigen/QR>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace fminlab;

namespace {

ImmersionChart bumpy_graph(const AmbientModel& m) {
    std::string phi = m.is_cylinder() ? "0.3*sin(u1)*cos(u2) + 0.1*x1*x2" : "0.2*x1*x1 - 0.15*x2*x2 + 0.1*sin(x1*x2)";
    if (m.n == 3) phi += m.is_cylinder() ? " + 0.2*cos(u3)" : " + 0.1*x3*x1";
    return graph_chart(m, Expression::parse(phi));
}

Mat random_rotation(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0, 1);
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = N(rng);
    Eigen::HouseholderQR<Mat> qr(A);
    return qr.householderQ() * Mat::Identity(n, n);
}

void check_frame(const GeometryAtPoint& G) {
    CHECK(std::abs(G.normal.norm() - 1) < 1e-12);
    CHECK((G.tangent_frame.transpose() * G.normal).norm() < 1e-12);
    const int n = G.n();
    CHECK((G.tangent_frame.transpose() * G.tangent_frame - Mat::Identity(n, n)).norm() < 1e-10);
    CHECK((G.a - G.a.transpose()).norm() < 1e-10);
    CHECK(std::abs(G.H - G.a.trace()) < 1e-12);
    CHECK(std::abs(G.A2 - G.a.squaredNorm()) < 1e-12);
}

} // namespace

TEST_CASE("slice geometry") {
    for (int n : {2, 3}) {
        AmbientModel m = AmbientModel::cylinder(n);
        ImmersionChart c = slice_chart(m);
        for (const Vec& u : sample_points(c, 20)) {
            GeometryAtPoint G = evaluate_geometry(c, u);
            check_frame(G);
            CHECK(G.a.norm() < 1e-12);
            CHECK(std::abs(G.H) < 1e-12);
            CHECK(std::abs(G.Hf) < 1e-12);
            CHECK(std::abs(G.alpha - 1) < 1e-14);
            CHECK(std::abs(G.A2) < 1e-14);
            CHECK(fminimality_residual(c, u) < 1e-14);
        }
    }
}

TEST_CASE("equatorial cylinder geometry") {
    for (int n : {2, 3}) {
        ImmersionChart c = equator_cylinder_chart(AmbientModel::cylinder(n));
        for (const Vec& u : sample_points(c, 20)) {
            GeometryAtPoint G = evaluate_geometry(c, u);
            check_frame(G);
            CHECK(G.a.norm() < 1e-12);
            CHECK(std::abs(G.Hf) < 1e-12);
            CHECK(std::abs(G.alpha) < 1e-14);
            CHECK(std::abs(G.grad_t.norm() - 1) < 1e-12);
        }
    }
}

TEST_CASE("shrinker sphere and cylinder") {
    for (int n : {2, 3}) {
        ImmersionChart c = shrinker_sphere_chart(AmbientModel::gaussian(n));
        for (const Vec& u : sample_points(c, 20)) {
            GeometryAtPoint G = evaluate_geometry(c, u);
            check_frame(G);
            CHECK((G.a - Mat::Identity(n, n) / std::sqrt(2.0 * n)).norm() < 1e-12);
            CHECK(std::abs(G.H - std::sqrt(n / 2.0)) < 1e-12);
            CHECK(std::abs(G.Hf) < 1e-12);
            CHECK(std::abs(G.A2 - 0.5) < 1e-12);
            for (int i = 0; i < n; ++i) CHECK(G.a(i, i) > 0);
            CHECK(G.normal.dot(G.point) > 0);
        }
    }
    ImmersionChart c = shrinker_cylinder_chart(AmbientModel::gaussian(2));
    for (const Vec& u : sample_points(c, 20)) CHECK(fminimality_residual(c, u) < 1e-14);
}

TEST_CASE("translated slice has weighted mean curvature -t C") {
    ImmersionChart c = slice_chart(AmbientModel::cylinder(2), 1.0);
    for (const Vec& u : sample_points(c, 10)) CHECK(fminimality_residual(c, u) == doctest::Approx(0.5).epsilon(1e-13));
    AmbientModel m3 = AmbientModel::cylinder(3, 1.5);
    ImmersionChart c3 = slice_chart(m3, 0.4);
    GeometryAtPoint G = evaluate_geometry(c3, sample_points(c3, 1)[0]);
    CHECK(G.Hf == doctest::Approx(-0.4 * m3.soliton_constant).epsilon(1e-13));
}

TEST_CASE("Codazzi with ambient curvature, height relation, orientation") {
    for (const AmbientModel& m : {AmbientModel::cylinder(2), AmbientModel::cylinder(3, 1.3), AmbientModel::gaussian(2),
                                  AmbientModel::gaussian(3)}) {
        ImmersionChart c = bumpy_graph(m);
        const int n = m.n;
        double worst = 0;
        for (const Vec& u : sample_points(c, 40)) {
            GeometryAtPoint G = evaluate_geometry(c, u);
            check_frame(G);
            Frame F = G.frame();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double lhs = G.nabla_a(i, k, j) - G.nabla_a(i, j, k);
                        double rhs = curvature(m, F, n, i, k, j);
                        worst = std::max(worst, std::abs(lhs - rhs));
                    }
            // nabla A is symmetric in its first two slots
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) CHECK(std::abs(G.nabla_a(i, j, k) - G.nabla_a(j, i, k)) < 1e-10);
            if (m.is_cylinder()) {
                CHECK(std::abs(G.grad_t.squaredNorm() + G.alpha * G.alpha - 1) < 1e-10);
                CHECK(G.alpha > 0);
            } else {
                CHECK(G.normal(n) > 0);
            }
        }
        INFO(m.name());
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("scalars do not depend on the tangent basis") {
    std::mt19937_64 rng(11);
    for (const AmbientModel& m : {AmbientModel::cylinder(3), AmbientModel::gaussian(3)}) {
        ImmersionChart c = bumpy_graph(m);
        for (const Vec& u : sample_points(c, 15)) {
            GeometryAtPoint G0 = evaluate_geometry(c, u);
            EvalOptions o;
            o.basis = random_rotation(m.n, rng);
            GeometryAtPoint G1 = evaluate_geometry(c, u, o);
            CHECK(std::abs(G0.H - G1.H) < 1e-10);
            CHECK(std::abs(G0.Hf - G1.Hf) < 1e-10);
            CHECK(std::abs(G0.A2 - G1.A2) < 1e-10);
            CHECK(std::abs(G0.alpha - G1.alpha) < 1e-10);
            CHECK(std::abs(G0.nablaA_squared() - G1.nablaA_squared()) < 1e-10);
            CHECK(std::abs(G0.gradH.norm() - G1.gradH.norm()) < 1e-10);
        }
    }
}

TEST_CASE("geometry errors") {
    AmbientModel m = AmbientModel::cylinder(2);
    ImmersionChart bad = slice_chart(m);
    bad.map = [](std::span<const Jet> u) {
        std::vector<Jet> X = sphere_point(u.subspan(0, 1), std::sqrt(2.0));
        X.push_back(zero_like(u[0]));
        X.push_back(zero_like(u[0]));
        return X;
    };
    Vec u(2);
    u << 1.0, 0.5;
    CHECK_THROWS_AS(evaluate_geometry(bad, u), GeometryError); // metric degenerate
    ImmersionChart off = slice_chart(m);
    off.map = [](std::span<const Jet> u) {
        std::vector<Jet> X = sphere_point(u, 1.0);
        X.push_back(zero_like(u[0]));
        return X;
    };
    CHECK_THROWS_AS(evaluate_geometry(off, u), GeometryError);
    EvalOptions o;
    o.order = 1;
    CHECK_THROWS_AS(evaluate_geometry(slice_chart(m), u, o), ArgumentError);
}

TEST_CASE("chart registry and graph files") {
    CHECK(builtin_chart_names().size() == 4);
    CHECK(default_model_for("shrinker-sphere", 3).kind == ModelKind::GaussianSpace);
    CHECK(default_model_for("slice", 3).a == doctest::Approx(2));
    CHECK_THROWS_AS(make_chart("nope", AmbientModel::cylinder(2)), ArgumentError);
    CHECK_THROWS_AS(make_chart("slice", AmbientModel::gaussian(2)), ArgumentError);
    CHECK(make_chart("equator-cylinder", AmbientModel::cylinder(3)).label == "equator-cylinder");

    auto path = std::filesystem::temp_directory_path() / "fminlab_graph_test.txt";
    {
        std::ofstream os(path);
        os << "# a tilted graph\n@model cylinder:2\n@domain 0.5 2.5 -1 1\n0.1*sin(u1)\n + 0.05*x3\n";
    }
    GraphFile g = read_graph_file(path.string());
    CHECK(g.model == "cylinder:2");
    CHECK(g.domain.size() == 4);
    ImmersionChart c = make_chart("graph:" + path.string(), default_model_for("graph:" + path.string(), 5));
    CHECK(c.model.n == 2);
    CHECK(c.lo(0) == 0.5);
    CHECK(c.hi(1) == 1);
    Vec u(2);
    u << 1.0, 0.2;
    GeometryAtPoint G = evaluate_geometry(c, u);
    CHECK(G.t == doctest::Approx(0.1 * std::sin(1.0) + 0.05 * G.point(2)));
    {
        std::ofstream os(path);
        os << "@bogus\n1\n";
    }
    CHECK_THROWS_AS(read_graph_file(path.string()), ArgumentError);
    {
        std::ofstream os(path);
        os << "0.1*q\n";
    }
    CHECK_THROWS_AS(make_chart("graph:" + path.string(), AmbientModel::cylinder(2)), ArgumentError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_graph_file(path.string()), ArgumentError);
}
