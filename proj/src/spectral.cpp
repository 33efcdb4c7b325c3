#include "fminlab/spectral.hpp"

#include "fminlab/errors.hpp"
#include "fminlab/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fminlab {

namespace {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

void finish(SpectrumResult& R) {
    std::sort(R.eigenvalues.begin(), R.eigenvalues.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.mu < b.mu; });
    if (!R.range_closed) {
        R.index = -1;
        return;
    }
    std::uint64_t idx = 0;
    for (const auto& e : R.eigenvalues)
        if (e.mu < -kZeroModeTolerance) idx += e.multiplicity;
    R.index = static_cast<int>(idx);
}

// All eigenvalues of one mode on an N-cell grid.
Eigen::VectorXd mode_eigenvalues(const ProfileCurve& P, int N, double lambda) {
    const AmbientModel& m = P.model;
    const double a = m.a, c = m.weight_scale();
    const double s0 = P.s_begin(), L = P.length(), h = L / N;
    auto weight = [&](const ProfileState& y) {
        return std::pow(a * std::sin(y.rho / a), m.n - 1) * std::exp(-0.5 * c * y.t * y.t);
    };
    Eigen::VectorXd wf(N + 1), W(N), d(N), e(N > 1 ? N - 1 : 0);
    wf(0) = 0.0;
    wf(N) = 0.0;
    for (int j = 1; j < N; ++j) wf(j) = weight(P.state_at(s0 + j * h));
    for (int j = 0; j < N; ++j) {
        ProfileState y = P.state_at(s0 + (j + 0.5) * h);
        RotationalQuantities q = rotational_quantities(y, m);
        W(j) = weight(y);
        d(j) = (wf(j) + wf(j + 1)) / (h * h * W(j)) + lambda / (q.r * q.r) - (q.A2 + c);
    }
    for (int j = 0; j + 1 < N; ++j) e(j) = -wf(j + 1) / (h * h * std::sqrt(W(j) * W(j + 1)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("tridiagonal eigensolver did not converge");
    return es.eigenvalues();
}

} // namespace

std::uint64_t harmonic_multiplicity(int k, int dim) {
    if (k < 0 || dim < 1) throw ArgumentError("bad harmonic degree or sphere dimension");
    return binomial(k + dim, dim) - binomial(k + dim - 2, dim);
}

SpectrumResult slice_spectrum_closed_form(const AmbientModel& model, int k_max) {
    if (!model.is_cylinder()) throw ArgumentError("the slice lives in a cylinder model");
    if (k_max < 0) throw ArgumentError("k_max must be >= 0");
    const int n = model.n;
    const double a2 = model.a * model.a;
    SpectrumResult R;
    R.label = "slice(" + model.name() + ") closed form";
    R.m_max = k_max;
    for (int k = 0; k <= k_max; ++k)
        R.eigenvalues.push_back({(k * (k + n - 1.0) - (n - 1.0)) / a2, harmonic_multiplicity(k, n), k, 0});
    R.range_closed = R.eigenvalues.back().mu >= 0;
    finish(R);
    return R;
}

SpectrumResult sturm_liouville_spectrum(const ProfileCurve& P, const SturmLiouvilleOptions& opts) {
    if (!P.closed) throw PreconditionError("spectrum needs a closed profile");
    if (opts.m_max < 0) throw ArgumentError("m_max must be >= 0");
    if (opts.grid < 100 || (opts.richardson && opts.grid % 2)) throw ArgumentError("grid must be even and >= 100");
    const int n = P.model.n;
    std::vector<std::vector<SpectrumEntry>> per_mode(opts.m_max + 1);
    parallel_for(opts.m_max + 1, [&](int mode) {
        double lambda = mode * (mode + n - 2.0);
        Eigen::VectorXd fine = mode_eigenvalues(P, opts.grid, lambda);
        Eigen::VectorXd mu = fine;
        if (opts.richardson) {
            Eigen::VectorXd coarse = mode_eigenvalues(P, opts.grid / 2, lambda);
            mu = (4.0 * fine.head(coarse.size()) - coarse) / 3.0;
        }
        int negative = static_cast<int>((mu.array() < -kZeroModeTolerance).count());
        int keep = std::min<int>(static_cast<int>(mu.size()), std::max(opts.m_max - mode + 1, negative + 1));
        std::uint64_t mult = harmonic_multiplicity(mode, n - 1);
        for (int k = 0; k < keep; ++k) per_mode[mode].push_back({mu(k), mult, mode, k});
    });
    SpectrumResult R;
    std::ostringstream os;
    os << "profile(" << P.model.name() << ", L=" << P.length() << ") Sturm-Liouville";
    R.label = os.str();
    R.m_max = opts.m_max;
    R.grid = opts.grid;
    for (auto& v : per_mode) R.eigenvalues.insert(R.eigenvalues.end(), v.begin(), v.end());
    R.range_closed = per_mode.back().front().mu >= -kZeroModeTolerance;
    finish(R);
    return R;
}

SpectrumResult sturm_liouville_spectrum_closed(const ProfileCurve& P, int grid, int m_limit) {
    SturmLiouvilleOptions o;
    o.grid = grid;
    for (o.m_max = 2;; o.m_max *= 2) {
        o.m_max = std::min(o.m_max, m_limit);
        SpectrumResult R = sturm_liouville_spectrum(P, o);
        if (R.range_closed || o.m_max == m_limit) return R;
    }
}

int lf_index(const SpectrumResult& S) {
    if (!S.range_closed)
        throw IncompleteSpectrumError("spectrum '" + S.label + "' may miss negative eigenvalues; raise the mode range");
    return S.index;
}

double rayleigh_quotient(const ProfileCurve& P, const ScalarField& phi) {
    require_closed_fminimal(P);
    const AmbientModel& m = P.model;
    const double c = m.weight_scale();
    double num = weighted_integral(P, [&](const ProfileState& y) {
        Jet u = rotational_field_jet(y, m, phi);
        RotationalQuantities q = rotational_quantities(y, m);
        return u[1] * u[1] - (q.A2 + c) * u.value() * u.value();
    });
    double den = weighted_integral(P, [&](const ProfileState& y) {
        double v = rotational_field_jet(y, m, phi).value();
        return v * v;
    });
    if (!(std::sqrt(den) > 1e-14)) throw ArgumentError("trial function vanishes identically");
    return num / den;
}

} // namespace fminlab
