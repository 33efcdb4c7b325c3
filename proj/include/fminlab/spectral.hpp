#pragma once

#include "fminlab/ambient.hpp"
#include "fminlab/operators.hpp"
#include "fminlab/rotsym.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fminlab {

// Eigenvalues follow L_f u = -mu u, so negative mu are unstable directions.
struct SpectrumEntry {
    double mu = 0;
    std::uint64_t multiplicity = 0;
    int mode = 0; // degree of the harmonic on the orbit sphere (closed form: degree on S^n)
    int k = 0;    // position within the mode, from 0
};

struct SpectrumResult {
    std::string label;
    std::string convention = "L_f u = -mu u";
    std::vector<SpectrumEntry> eigenvalues; // sorted by mu
    bool range_closed = false; // every negative eigenvalue is accounted for
    int index = -1;            // with multiplicity; -1 when not range_closed
    int m_max = 0, grid = 0;
};

// Eigenvalues within this distance of zero count as zero modes (Jacobi
// fields of rotations); it matches the discretization accuracy.
inline constexpr double kZeroModeTolerance = 1e-6;

// Dimension of degree-k spherical harmonics on S^dim.
std::uint64_t harmonic_multiplicity(int k, int dim);

// Slice S^n(a) x {0}: mu_k = (k(k+n-1) - (n-1)) / a^2 for k = 0..k_max.
SpectrumResult slice_spectrum_closed_form(const AmbientModel& model, int k_max);

struct SturmLiouvilleOptions {
    int m_max = 4;      // highest orbit mode
    int grid = 2000;    // cells; must be even, Richardson pairs it with grid / 2
    bool richardson = true;
};

// Separation of variables on a closed rotational profile: one tridiagonal
// problem per orbit mode, cell-centred finite volumes in arclength.
SpectrumResult sturm_liouville_spectrum(const ProfileCurve& profile, const SturmLiouvilleOptions& opts = {});
// Raises m_max until the lowest eigenvalue of the top mode is >= -kZeroModeTolerance.
SpectrumResult sturm_liouville_spectrum_closed(const ProfileCurve& profile, int grid, int m_limit = 64);

// Throws IncompleteSpectrumError unless the result is range_closed.
int lf_index(const SpectrumResult& spectrum);

// B_f(phi, phi) / int phi^2 e^{-f} for a rotationally invariant field.
double rayleigh_quotient(const ProfileCurve& profile, const ScalarField& phi);

} // namespace fminlab
