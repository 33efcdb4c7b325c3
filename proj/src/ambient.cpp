#include "fminlab/ambient.hpp"

#include "fminlab/errors.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace fminlab {

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ArgumentError("bad " + std::string(what) + ": '" + std::string(s) + "'");
    return v;
}

double parse_double(std::string_view s, std::string_view what) {
    std::string str(s);
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(str, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != str.size()) throw ArgumentError("bad " + std::string(what) + ": '" + str + "'");
    return v;
}

double dotc(const Frame& F, int i, int k) { return F.col(i).dot(F.col(k)); }

} // namespace

double AmbientModel::default_radius(int n) { return std::sqrt(2.0 * (n - 1)); }

AmbientModel AmbientModel::gaussian(int n) {
    if (n < 2) throw ArgumentError("model dimension n must be >= 2");
    AmbientModel m;
    m.kind = ModelKind::GaussianSpace;
    m.n = n;
    m.a = 0.0;
    m.soliton_constant = 0.5;
    return m;
}

AmbientModel AmbientModel::cylinder(int n) { return cylinder(n, default_radius(n)); }

AmbientModel AmbientModel::cylinder(int n, double a) {
    if (n < 2) throw ArgumentError("model dimension n must be >= 2");
    if (!(a > 0) || !std::isfinite(a)) throw ArgumentError("cylinder radius must be positive");
    AmbientModel m;
    m.kind = ModelKind::SphereCylinder;
    m.n = n;
    m.a = a;
    m.soliton_constant = (n - 1) / (a * a);
    return m;
}

AmbientModel AmbientModel::parse(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto p = spec.find(':', start);
        parts.push_back(spec.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    if (parts.size() == 2 && parts[0] == "gaussian") return gaussian(parse_int(parts[1], "model dimension"));
    if (parts[0] == "cylinder" && parts.size() == 2) return cylinder(parse_int(parts[1], "model dimension"));
    if (parts[0] == "cylinder" && parts.size() == 3)
        return cylinder(parse_int(parts[1], "model dimension"), parse_double(parts[2], "cylinder radius"));
    throw ArgumentError("unknown model '" + std::string(spec) + "' (expected gaussian:n or cylinder:n[:a])");
}

std::string AmbientModel::name() const {
    if (!is_cylinder()) return "gaussian:" + std::to_string(n);
    if (has_default_radius()) return "cylinder:" + std::to_string(n);
    std::ostringstream os;
    os.precision(17);
    os << "cylinder:" << n << ":" << a;
    return os.str();
}

bool AmbientModel::has_default_radius() const {
    return is_cylinder() && std::abs(a - default_radius(n)) <= 1e-14 * a;
}

void AmbientModel::check_point(const Vec& p, double rel_tol) const {
    if (p.size() != ambient_dim())
        throw GeometryError("point has dimension " + std::to_string(p.size()) + ", model expects " +
                            std::to_string(ambient_dim()));
    if (is_cylinder()) {
        double r = p.head(n + 1).norm();
        if (std::abs(r - a) > rel_tol * a)
            throw GeometryError("point off the cylinder: |x| - a = " + std::to_string(r - a));
    }
}

double AmbientModel::weight(const Vec& p) const {
    if (is_cylinder()) {
        double t = p(n + 1);
        return 0.5 * weight_scale() * t * t;
    }
    return 0.25 * p.squaredNorm();
}

Vec AmbientModel::weight_gradient(const Vec& p) const {
    if (is_cylinder()) {
        Vec g = Vec::Zero(ambient_dim());
        g(n + 1) = weight_scale() * p(n + 1);
        return g;
    }
    return 0.5 * p;
}

Jet AmbientModel::weight(std::span<const Jet> X) const {
    if (is_cylinder()) return 0.5 * weight_scale() * (X[n + 1] * X[n + 1]);
    Jet f = zero_like(X[0]);
    for (const Jet& x : X) f += x * x;
    return 0.25 * f;
}

std::vector<Jet> AmbientModel::weight_gradient(std::span<const Jet> X) const {
    std::vector<Jet> g;
    g.reserve(X.size());
    for (std::size_t c = 0; c < X.size(); ++c) {
        if (is_cylinder())
            g.push_back(c == static_cast<std::size_t>(n + 1) ? weight_scale() * X[c] : zero_like(X[c]));
        else
            g.push_back(0.5 * X[c]);
    }
    return g;
}

double WeightDerivatives::third_at(int j, int i, int k) const {
    int m = static_cast<int>(grad.size());
    return third[(j * m + i) * m + k];
}

WeightDerivatives weight_derivatives(const AmbientModel& model, const Vec& p, const Frame& frame) {
    model.check_point(p);
    int m = static_cast<int>(frame.cols());
    WeightDerivatives w;
    w.f = model.weight(p);
    w.grad = frame.transpose() * model.weight_gradient(p);
    w.hess.resize(m, m);
    if (model.is_cylinder()) {
        Vec T = frame.row(model.n + 1).transpose();
        w.hess = model.weight_scale() * T * T.transpose();
    } else {
        w.hess = 0.5 * frame.transpose() * frame;
    }
    w.third.assign(static_cast<std::size_t>(m) * m * m, 0.0);
    return w;
}

double curvature(const AmbientModel& model, const Frame& F, int i, int j, int k, int l) {
    int m = static_cast<int>(F.cols());
    if (i < 0 || j < 0 || k < 0 || l < 0 || i >= m || j >= m || k >= m || l >= m)
        throw ArgumentError("curvature index out of range");
    if (!model.is_cylinder()) return 0.0;
    const int tc = model.n + 1;
    double Ti = F(tc, i), Tj = F(tc, j), Tk = F(tc, k), Tl = F(tc, l);
    double kappa = 1.0 / (model.a * model.a);
    return kappa * (dotc(F, i, k) * dotc(F, j, l) - dotc(F, i, l) * dotc(F, j, k) - Tj * Tl * dotc(F, i, k) -
                    Ti * Tk * dotc(F, j, l) + Tj * Tk * dotc(F, i, l) + Ti * Tl * dotc(F, j, k));
}

double ricci(const AmbientModel& model, const Frame& F, int i, int k) {
    if (!model.is_cylinder()) return 0.0;
    const int tc = model.n + 1;
    return (model.n - 1) / (model.a * model.a) * (dotc(F, i, k) - F(tc, i) * F(tc, k));
}

double bakry_emery_ricci(const AmbientModel& model, const Frame& F, int i, int k) {
    double hess;
    if (model.is_cylinder()) {
        const int tc = model.n + 1;
        hess = model.weight_scale() * F(tc, i) * F(tc, k);
    } else {
        hess = 0.5 * dotc(F, i, k);
    }
    return ricci(model, F, i, k) + hess;
}

double curvature_derivative(const AmbientModel& model, const Frame& F, int i, int j, int k, int l, int m) {
    int c = static_cast<int>(F.cols());
    for (int x : {i, j, k, l, m})
        if (x < 0 || x >= c) throw ArgumentError("curvature index out of range");
    (void)model;
    return 0.0;
}

double bakry_emery_ricci_derivative(const AmbientModel& model, const Frame& F, int i, int k, int m) {
    int c = static_cast<int>(F.cols());
    for (int x : {i, k, m})
        if (x < 0 || x >= c) throw ArgumentError("Ricci index out of range");
    (void)model;
    return 0.0;
}

Vec parallel_field(const AmbientModel& model) {
    Vec v = Vec::Zero(model.ambient_dim());
    if (model.is_cylinder())
        v(model.n + 1) = 1.0;
    else
        v(0) = 1.0;
    return v;
}

} // namespace fminlab
