#include "fminlab/hypersurface.hpp"

#include "fminlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace fminlab {

namespace {

Jet dot(std::span<const Jet> a, std::span<const Jet> b) {
    Jet s = a[0] * b[0];
    for (std::size_t c = 1; c < a.size(); ++c) s += a[c] * b[c];
    return s;
}

Jet dot(std::span<const Jet> a, const Vec& v) {
    Jet s = a[0] * v(0);
    for (std::size_t c = 1; c < a.size(); ++c) s += a[c] * v(static_cast<Eigen::Index>(c));
    return s;
}

std::vector<Jet> truncate_all(std::span<const Jet> a, int order) {
    std::vector<Jet> r;
    r.reserve(a.size());
    for (const Jet& x : a) r.push_back(truncate(x, order));
    return r;
}

// Inverse of a symmetric positive definite jet matrix, Gauss-Jordan without pivoting.
std::vector<Jet> inverse_spd(const std::vector<Jet>& M, int n) {
    std::vector<Jet> A = M;
    std::vector<Jet> B(n * n, zero_like(M[0]));
    for (int i = 0; i < n; ++i) B[i * n + i][0] = 1.0;
    for (int p = 0; p < n; ++p) {
        Jet inv = 1.0 / A[p * n + p];
        for (int j = 0; j < n; ++j) {
            A[p * n + j] *= inv;
            B[p * n + j] *= inv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == p) continue;
            Jet fac = A[r * n + p];
            for (int j = 0; j < n; ++j) {
                A[r * n + j] -= fac * A[p * n + j];
                B[r * n + j] -= fac * B[p * n + j];
            }
        }
    }
    return B;
}

double first(const Jet& a, int i) { return a[1 + i]; }

Vec values(std::span<const Jet> a) {
    Vec v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t c = 0; c < a.size(); ++c) v(static_cast<Eigen::Index>(c)) = a[c].value();
    return v;
}

Vec frame_gradient(const Jet& F, const Mat& E) {
    int n = static_cast<int>(E.rows());
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = first(F, i);
    return E * d;
}

} // namespace

bool ImmersionChart::contains(const Vec& u) const {
    if (u.size() != dim) return false;
    for (int i = 0; i < dim; ++i)
        if (u(i) < lo(i) || u(i) > hi(i)) return false;
    return true;
}

double GeometryAtPoint::nablaA_squared() const {
    double s = 0;
    for (double x : nablaA) s += x * x;
    return s;
}

Frame GeometryAtPoint::frame() const {
    Frame F(point.size(), n() + 1);
    F.leftCols(n()) = tangent_frame;
    F.col(n()) = normal;
    return F;
}

SurfacePoint evaluate_surface(const ImmersionChart& chart, const Vec& u, const EvalOptions& opts) {
    const int n = chart.dim;
    const int K = opts.order;
    if (K < 2 || K > kMaxJetOrder) throw ArgumentError("geometry jet order must be in [2, 4]");
    if (u.size() != n) throw ArgumentError("chart point has wrong dimension");
    const AmbientModel& model = chart.model;

    SurfacePoint S;
    S.model = model;
    S.n = n;
    S.order = K;
    S.u = u;

    std::vector<Jet> U;
    for (int i = 0; i < n; ++i) U.push_back(jet_variable(u(i), i, n, K));
    S.X = chart.map(U);
    S.D = static_cast<int>(S.X.size());
    const int D = S.D;
    if (D != model.ambient_dim()) throw GeometryError("chart map has wrong ambient dimension");

    Vec p = values(S.X);
    if (model.is_cylinder()) {
        double r = p.head(model.n + 1).norm();
        if (std::abs(r - model.a) > 1e-10 * model.a)
            throw GeometryError(chart.label + ": point off the cylinder, |x| - a = " + std::to_string(r - model.a));
    }

    // tangents and second derivatives
    std::vector<std::vector<Jet>> Xi(n), Xij(n * n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < D; ++c) Xi[i].push_back(differentiate(S.X[c], i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < D; ++c) Xij[i * n + j].push_back(differentiate(Xi[i][c], j));

    S.g.assign(n * n, Jet());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) S.g[i * n + j] = S.g[j * n + i] = dot(Xi[i], Xi[j]);

    Mat gv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gv(i, j) = S.g[i * n + j].value();
    double det = gv.determinant();
    if (!(det > 1e-12))
        throw GeometryError(chart.label + ": degenerate metric, Gram determinant " + std::to_string(det));
    S.ginv = inverse_spd(S.g, n);

    // normal: project the orientation reference onto the normal line
    Vec ref = chart.orientation(p, u);
    std::vector<Jet> P;
    for (int c = 0; c < D; ++c) P.push_back(jet_constant(ref(c), n, K - 1));
    std::vector<Jet> proj;
    for (int j = 0; j < n; ++j) proj.push_back(dot(Xi[j], ref));
    for (int i = 0; i < n; ++i) {
        Jet coef = zero_like(P[0]);
        for (int j = 0; j < n; ++j) coef += S.ginv[i * n + j] * proj[j];
        for (int c = 0; c < D; ++c) P[c] -= coef * Xi[i][c];
    }
    if (model.is_cylinder()) {
        std::vector<Jet> N;
        for (int c = 0; c <= model.n; ++c) N.push_back(truncate(S.X[c], K - 1) / model.a);
        Jet nr = zero_like(P[0]);
        for (int c = 0; c <= model.n; ++c) nr += N[c] * ref(c);
        for (int c = 0; c <= model.n; ++c) P[c] -= nr * N[c];
    }
    Jet pn2 = dot(P, P);
    if (!(std::sqrt(pn2.value()) > 1e-8 * std::max(1.0, ref.norm())))
        throw GeometryError(chart.label + ": orientation reference is tangent to the surface");
    Jet inv_norm = pow(pn2, -0.5);
    for (int c = 0; c < D; ++c) S.nu.push_back(P[c] * inv_norm);

    // second fundamental form, h_ij = -<X_ij, nu>
    std::vector<Jet> nu2 = truncate_all(S.nu, K - 2);
    S.h.assign(n * n, Jet());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) S.h[i * n + j] = S.h[j * n + i] = -dot(Xij[i * n + j], nu2);

    std::vector<Jet> ginv2 = truncate_all(S.ginv, K - 2);
    S.H = zero_like(S.h[0]);
    for (int k = 0; k < n * n; ++k) S.H += ginv2[k] * S.h[k];
    // |A|^2 = tr(G^-1 h G^-1 h)
    std::vector<Jet> M(n * n, zero_like(S.h[0]));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) M[i * n + j] += ginv2[i * n + k] * S.h[k * n + j];
    S.A2 = zero_like(S.h[0]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S.A2 += M[i * n + j] * M[j * n + i];

    Vec V = parallel_field(model);
    S.alpha = dot(S.nu, V);
    S.f = model.weight(S.X);
    S.t = dot(S.X, V);

    // Christoffel symbols at the point
    S.gamma.assign(n * n * n, 0.0);
    Mat ginvv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ginvv(i, j) = S.ginv[i * n + j].value();
    auto dg = [&](int l, int i, int j) { return first(S.g[i * n + j], l); };
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int l = 0; l < n; ++l) s += ginvv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                S.gamma[(k * n + i) * n + j] = 0.5 * s;
            }

    // orthonormal frame via Cholesky of the rotated Gram matrix
    Mat R = opts.basis.size() ? opts.basis : Mat::Identity(n, n);
    if (R.rows() != n || R.cols() != n) throw ArgumentError("basis rotation has wrong size");
    Eigen::LLT<Mat> llt(R * gv * R.transpose());
    if (llt.info() != Eigen::Success) throw GeometryError(chart.label + ": metric not positive definite");
    Mat Linv = llt.matrixL().solve(Mat::Identity(n, n));
    S.E = Linv * R;

    GeometryAtPoint& G = S.geo;
    G.u = u;
    G.point = p;
    Mat Xv(D, n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < D; ++c) Xv(c, i) = Xi[i][c].value();
    G.tangent_frame = Xv * S.E.transpose();
    G.normal = values(S.nu);
    G.metric = gv;
    G.metric_inv = ginvv;
    Mat hv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hv(i, j) = S.h[i * n + j].value();
    G.a = S.E * hv * S.E.transpose();
    G.H = S.H.value();
    G.A2 = S.A2.value();
    G.alpha = S.alpha.value();
    G.t = S.t.value();
    G.f = S.f.value();
    G.Hf = G.H - model.weight_gradient(p).dot(G.normal);
    G.grad_alpha = frame_gradient(S.alpha, S.E);
    G.grad_t = frame_gradient(S.t, S.E);
    G.grad_f = frame_gradient(S.f, S.E);

    if (K >= 3) {
        // nabla_k h_ij in chart coordinates, then to the frame
        std::vector<double> Dh(n * n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = first(S.h[i * n + j], k);
                    for (int m = 0; m < n; ++m)
                        s -= S.christoffel(m, k, i) * hv(m, j) + S.christoffel(m, k, j) * hv(i, m);
                    Dh[(i * n + j) * n + k] = s;
                }
        G.nablaA.assign(n * n * n, 0.0);
        const Mat& E = S.E;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    double s = 0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            for (int k = 0; k < n; ++k) s += E(a, i) * E(b, j) * E(c, k) * Dh[(i * n + j) * n + k];
                    G.nablaA[(a * n + b) * n + c] = s;
                }
        G.gradH = frame_gradient(S.H, S.E);
    }
    return S;
}

GeometryAtPoint evaluate_geometry(const ImmersionChart& chart, const Vec& u, const EvalOptions& opts) {
    return evaluate_surface(chart, u, opts).geo;
}

double fminimality_residual(const ImmersionChart& chart, const Vec& u) {
    EvalOptions o;
    o.order = 2;
    GeometryAtPoint G = evaluate_geometry(chart, u, o);
    return std::abs(G.Hf);
}

std::vector<Jet> sphere_point(std::span<const Jet> angles, double r) {
    const int m = static_cast<int>(angles.size());
    std::vector<Jet> x;
    Jet prod = zero_like(angles[0]) + r;
    for (int i = 0; i < m; ++i) {
        x.push_back(prod * cos(angles[i]));
        prod = prod * sin(angles[i]);
    }
    x.push_back(prod);
    return x;
}

namespace {

void sphere_domain(int m, Vec& lo, Vec& hi, int offset) {
    for (int i = 0; i < m; ++i) {
        bool azimuth = i == m - 1;
        lo(offset + i) = azimuth ? -3.0 : 0.3;
        hi(offset + i) = azimuth ? 3.0 : M_PI - 0.3;
    }
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ArgumentError(what);
}

} // namespace

ImmersionChart slice_chart(const AmbientModel& model, double height) {
    require(model.is_cylinder(), "slice chart needs a cylinder model");
    ImmersionChart c;
    c.model = model;
    c.dim = model.n;
    c.lo.resize(c.dim);
    c.hi.resize(c.dim);
    sphere_domain(model.n, c.lo, c.hi, 0);
    const double a = model.a;
    c.map = [a, height](std::span<const Jet> u) {
        std::vector<Jet> X = sphere_point(u, a);
        X.push_back(zero_like(u[0]) + height);
        return X;
    };
    const int tc = model.n + 1;
    c.orientation = [tc](const Vec& p, const Vec&) {
        Vec r = Vec::Zero(p.size());
        r(tc) = 1.0;
        return r;
    };
    c.label = height == 0.0 ? "slice" : "slice@t=" + std::to_string(height);
    return c;
}

ImmersionChart equator_cylinder_chart(const AmbientModel& model) {
    require(model.is_cylinder(), "equator-cylinder chart needs a cylinder model");
    ImmersionChart c;
    c.model = model;
    c.dim = model.n;
    c.lo.resize(c.dim);
    c.hi.resize(c.dim);
    sphere_domain(model.n - 1, c.lo, c.hi, 0);
    c.lo(model.n - 1) = -3.0;
    c.hi(model.n - 1) = 3.0;
    const double a = model.a;
    c.map = [a](std::span<const Jet> u) {
        std::vector<Jet> X = sphere_point(u.first(u.size() - 1), a);
        X.push_back(zero_like(u[0]));
        X.push_back(u.back());
        return X;
    };
    const int ec = model.n;
    c.orientation = [ec](const Vec& p, const Vec&) {
        Vec r = Vec::Zero(p.size());
        r(ec) = 1.0;
        return r;
    };
    c.label = "equator-cylinder";
    return c;
}

ImmersionChart shrinker_sphere_chart(const AmbientModel& model) {
    require(!model.is_cylinder(), "shrinker-sphere chart needs a gaussian model");
    ImmersionChart c;
    c.model = model;
    c.dim = model.n;
    c.lo.resize(c.dim);
    c.hi.resize(c.dim);
    sphere_domain(model.n, c.lo, c.hi, 0);
    const double r = std::sqrt(2.0 * model.n);
    c.map = [r](std::span<const Jet> u) { return sphere_point(u, r); };
    c.orientation = [](const Vec& p, const Vec&) { return Vec(p); };
    c.label = "shrinker-sphere";
    return c;
}

ImmersionChart shrinker_cylinder_chart(const AmbientModel& model) {
    require(!model.is_cylinder(), "shrinker-cylinder chart needs a gaussian model");
    ImmersionChart c;
    c.model = model;
    c.dim = model.n;
    c.lo.resize(c.dim);
    c.hi.resize(c.dim);
    sphere_domain(model.n - 1, c.lo, c.hi, 0);
    c.lo(model.n - 1) = -3.0;
    c.hi(model.n - 1) = 3.0;
    const double r = std::sqrt(2.0 * (model.n - 1));
    c.map = [r](std::span<const Jet> u) {
        std::vector<Jet> X = sphere_point(u.first(u.size() - 1), r);
        X.push_back(u.back());
        return X;
    };
    const int n = model.n;
    c.orientation = [n](const Vec& p, const Vec&) {
        Vec q = p;
        q(n) = 0.0;
        return q;
    };
    c.label = "shrinker-cylinder";
    return c;
}

ImmersionChart graph_chart(const AmbientModel& model, const Expression& phi) {
    ImmersionChart c;
    c.model = model;
    c.dim = model.n;
    c.lo.resize(c.dim);
    c.hi.resize(c.dim);
    const int n = model.n;
    c.label = "graph:" + phi.source();
    if (model.is_cylinder()) {
        sphere_domain(n, c.lo, c.hi, 0);
        const double a = model.a;
        c.map = [a, n, phi](std::span<const Jet> u) {
            std::vector<Jet> X = sphere_point(u, a);
            auto lookup = [&](const std::string& name) -> Jet {
                if (name.size() > 1 && (name[0] == 'u' || name[0] == 'x')) {
                    int k = std::stoi(name.substr(1)) - 1;
                    if (name[0] == 'u' && k >= 0 && k < n) return u[k];
                    if (name[0] == 'x' && k >= 0 && k <= n) return X[k];
                }
                throw ArgumentError("graph expression: unknown variable '" + name + "'");
            };
            X.push_back(phi.eval(u[0].layout(), lookup));
            return X;
        };
        c.orientation = [n](const Vec& p, const Vec&) {
            Vec r = Vec::Zero(p.size());
            r(n + 1) = 1.0;
            return r;
        };
    } else {
        c.lo.setConstant(-2.0);
        c.hi.setConstant(2.0);
        c.map = [n, phi](std::span<const Jet> u) {
            std::vector<Jet> X(u.begin(), u.end());
            auto lookup = [&](const std::string& name) -> Jet {
                if (name.size() > 1 && (name[0] == 'u' || name[0] == 'x')) {
                    int k = std::stoi(name.substr(1)) - 1;
                    if (k >= 0 && k < n) return u[k];
                }
                throw ArgumentError("graph expression: unknown variable '" + name + "'");
            };
            X.push_back(phi.eval(u[0].layout(), lookup));
            return X;
        };
        c.orientation = [n](const Vec& p, const Vec&) {
            Vec r = Vec::Zero(p.size());
            r(n) = 1.0;
            return r;
        };
    }
    // validate variable names once, before any evaluation
    for (const std::string& v : phi.variables()) {
        bool ok = v.size() > 1 && (v[0] == 'u' || v[0] == 'x') &&
                  v.find_first_not_of("0123456789", 1) == std::string::npos;
        int k = ok ? std::stoi(v.substr(1)) : 0;
        int max_x = model.is_cylinder() ? n + 1 : n;
        ok = ok && k >= 1 && k <= (v[0] == 'u' ? n : max_x);
        if (!ok) throw ArgumentError("graph expression: unknown variable '" + v + "'");
    }
    return c;
}

} // namespace fminlab
