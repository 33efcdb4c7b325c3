#pragma once

// Randomized property checks of the jet engine, shared by the unit tests and
// the acceptance binary. Each returns the number of failed comparisons.

#include "fminlab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace fminlab::testing {

inline Jet random_jet(std::mt19937_64& rng, int nv, int order) {
    std::uniform_real_distribution<double> U(-2, 2);
    Jet a(JetLayout::get(nv, order));
    for (int k = 0; k < a.size(); ++k) a[k] = U(rng);
    return a;
}

inline double factorial(int k) { return std::tgamma(k + 1.0); }

inline double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Leibniz expansion of d^beta (a b)
inline double leibniz(const Jet& a, const Jet& b, const MultiIndex& beta) {
    double s = 0;
    MultiIndex g{};
    // iterate over all gamma <= beta
    for (g[0] = 0; g[0] <= beta[0]; ++g[0])
        for (g[1] = 0; g[1] <= beta[1]; ++g[1])
            for (g[2] = 0; g[2] <= beta[2]; ++g[2])
                for (g[3] = 0; g[3] <= beta[3]; ++g[3]) {
                    MultiIndex r{};
                    double c = 1;
                    for (int v = 0; v < 4; ++v) {
                        r[v] = beta[v] - g[v];
                        c *= binom(beta[v], g[v]);
                    }
                    s += c * extract_partial(a, g) * extract_partial(b, r);
                }
    return s;
}

// Test function used for both jets and doubles.
template <class T>
T probe(const std::vector<T>& u, int which) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    const T& x = u[0];
    T y = u.size() > 1 ? u[1] : u[0] * 0.5;
    T z = u.size() > 2 ? u[2] : y * y;
    T w = u.size() > 3 ? u[3] : x - z;
    switch (which % 4) {
    case 0: return sin(x * y) + exp(0.3 * z) * cos(w);
    case 1: return sqrt(2.0 + x * x + y * y) / (1.5 + 0.5 * cos(z + w));
    case 2: return log(3.0 + sin(x) * y) * exp(-0.2 * w * w) + z * z * z;
    default: return pow(1.0 + 0.25 * x * x, 1.5) * sin(y - z) + w / (2.0 + x * x);
    }
}

inline constexpr double stencil1[] = {-0.5, 0, 0.5};              // d1 on -1..1
inline constexpr double stencil2[] = {1, -2, 1};                  // d2 on -1..1
inline constexpr double stencil3[] = {-0.5, 1, 0, -1, 0.5};       // d3 on -2..2
inline constexpr double stencil4[] = {1, -4, 6, -4, 1};           // d4 on -2..2

// Tensor-product central difference of d^beta probe at u0.
inline double finite_difference(const std::vector<double>& u0, int which, const MultiIndex& beta, double h) {
    int nv = static_cast<int>(u0.size());
    std::vector<std::vector<std::pair<int, double>>> axis(nv);
    for (int v = 0; v < nv; ++v) {
        switch (beta[v]) {
        case 0: axis[v] = {{0, 1.0}}; break;
        case 1: for (int k = 0; k < 3; ++k) if (stencil1[k] != 0) axis[v].push_back({k - 1, stencil1[k] / h}); break;
        case 2: for (int k = 0; k < 3; ++k) axis[v].push_back({k - 1, stencil2[k] / (h * h)}); break;
        case 3: for (int k = 0; k < 5; ++k) if (stencil3[k] != 0) axis[v].push_back({k - 2, stencil3[k] / (h * h * h)}); break;
        default: for (int k = 0; k < 5; ++k) axis[v].push_back({k - 2, stencil4[k] / (h * h * h * h)});
        }
    }
    double total = 0;
    std::vector<int> pos(nv, 0);
    while (true) {
        std::vector<double> u = u0;
        double c = 1;
        for (int v = 0; v < nv; ++v) {
            u[v] += axis[v][pos[v]].first * h;
            c *= axis[v][pos[v]].second;
        }
        total += c * probe(u, which);
        int v = 0;
        while (v < nv && ++pos[v] == static_cast<int>(axis[v].size())) pos[v++] = 0;
        if (v == nv) break;
    }
    return total;
}

// Richardson table over steps h, h/2, h/4, h/8 for the O(h^2) central
// differences: removes the h^2, h^4 and h^6 terms.
inline double richardson_difference(const std::vector<double>& u0, int which, const MultiIndex& beta, double h) {
    double T[4][4];
    for (int i = 0; i < 4; ++i) T[i][0] = finite_difference(u0, which, beta, h / (1 << i));
    for (int j = 1; j < 4; ++j) {
        double f = std::pow(4.0, j);
        for (int i = j; i < 4; ++i) T[i][j] = (f * T[i][j - 1] - T[i - 1][j - 1]) / (f - 1);
    }
    return T[3][3];
}

inline int product_rule_failures(int cases, unsigned seed) {
    std::mt19937_64 rng(seed);
    int failures = 0;
    for (int trial = 0; trial < cases; ++trial) {
        int nv = 1 + static_cast<int>(rng() % 4), order = static_cast<int>(rng() % 5);
        Jet a = random_jet(rng, nv, order), b = random_jet(rng, nv, order);
        Jet p = a * b;
        for (const MultiIndex& beta : p.layout().index) {
            double want = leibniz(a, b, beta), got = extract_partial(p, beta);
            if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want))) ++failures;
        }
    }
    return failures;
}

struct FdResult {
    int failures = 0;
    double worst = 0; // relative
};

// Random partial of a random composition against finite differences,
// agreement within 1e-6 relative to max(1, |value|).
inline FdResult finite_difference_failures(int cases, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    FdResult r;
    for (int trial = 0; trial < cases; ++trial) {
        int nv = 1 + static_cast<int>(rng() % 4);
        int which = static_cast<int>(rng() % 4);
        std::vector<double> u0(nv);
        for (double& x : u0) x = U(rng);
        std::vector<Jet> ju;
        for (int v = 0; v < nv; ++v) ju.push_back(jet_variable(u0[v], v, nv, 4));
        Jet f = probe(ju, which);
        const auto& idx = f.layout().index;
        const MultiIndex& beta = idx[1 + rng() % (idx.size() - 1)];
        double got = extract_partial(f, beta);
        double fd = richardson_difference(u0, which, beta, 0.08);
        double e = std::abs(fd - got) / std::max(1.0, std::abs(got));
        r.worst = std::max(r.worst, e);
        if (e > 1e-6) ++r.failures;
    }
    return r;
}

} // namespace fminlab::testing
