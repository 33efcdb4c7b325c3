#pragma once

#include "fminlab/ambient.hpp"

#include <Eigen/QR>

#include <random>

namespace fminlab::testing {

// Random point of the model.
inline Vec random_point(const AmbientModel& m, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0, 1);
    Vec p(m.ambient_dim());
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = N(rng);
    if (m.is_cylinder()) p.head(m.n + 1) *= m.a / p.head(m.n + 1).norm();
    return p;
}

// Random orthonormal basis of the tangent space at p, as columns.
inline Frame random_frame(const AmbientModel& m, const Vec& p, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0, 1);
    const int D = m.ambient_dim(), k = m.n + 1;
    Mat A(D, k);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = N(rng);
    if (m.is_cylinder()) {
        Vec nx = Vec::Zero(D);
        nx.head(m.n + 1) = p.head(m.n + 1) / m.a;
        A -= nx * (nx.transpose() * A);
    }
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ() * Mat::Identity(D, k);
    return Q;
}

} // namespace fminlab::testing
