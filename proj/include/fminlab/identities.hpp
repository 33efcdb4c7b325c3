#pragma once

#include "fminlab/hypersurface.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fminlab {

enum class IdentityId {
    FLAP_H,
    LF_H,
    SIMONS_FULL,
    SIMONS_SOLITON,
    ALPHA_LAW,
    ALPHA_SOLITON,
    CYL_DALPHA2,
    CYL_DH2,
    CYL_DA2,
    SHRINKER_H2,
    SHRINKER_A2,
    SHRINKER_LFH,
    HEIGHT,
    DELTAF_F
};

enum class ModelRequirement { Any, Soliton, SphereCylinder, DefaultCylinder, GaussianSpace };

struct IdentityInfo {
    IdentityId id;
    std::string name;
    std::string anchor; // the equation, written out
    ModelRequirement model;
    int jet_order;
};

const std::vector<IdentityInfo>& list_identities();
const IdentityInfo& identity_info(IdentityId id);
IdentityId parse_identity(std::string_view name);
std::string to_string(IdentityId id);
std::string to_string(ModelRequirement req);
bool is_compatible(IdentityId id, const AmbientModel& model);

// Everything the fourteen identities need at one point.
struct IdentityTerms {
    Vec u;
    int n = 0;
    double C = 0;
    GeometryAtPoint geo;
    double lap_H = 0, lap_H2 = 0, lap_A2 = 0, lap_alpha = 0, lap_alpha2 = 0, lap_f = 0;
    double ricf_nn = 0;     // Ric_f(nu, nu)
    double ricf_X_nu = 0;   // Ric_f(X, nu), X the parallel field
    double aa_ricf = 0;     // sum a_ij a_ik (Ric_f)_jk
    double ricf_d1 = 0;     // sum a_ij (Ric_f)_{i nu; j}
    double ricf_d2 = 0;     // sum a_ij (Ric_f)_{ij; nu}
    double a_R_d = 0;       // sum a_ij R_{i nu j nu; nu}
    double aa_R_nu = 0;     // sum a_ij a_ik R_{j nu k nu}
    double aa_R = 0;        // sum a_ij a_lk R_{iljk}
    double third_1 = 0;     // sum (nabla^3 f)_{i nu i}
    double third_2 = 0;     // sum (nabla^3 f)_{nu i i}
    double a_hess = 0;      // sum a_ij (nabla^2 f)_ij
    double grad_A_sq = 0, grad_H_sq = 0, grad_alpha_sq = 0, grad_t_sq = 0;
    double grad_alpha2_dot_grad_f = 0;
};

IdentityTerms evaluate_terms(const ImmersionChart& chart, const Vec& u, int order = 4);

struct IdentityValue {
    double lhs = 0, rhs = 0, residual = 0;
};
IdentityValue identity_value(IdentityId id, const IdentityTerms& T);

struct ResidualSample {
    Vec u;
    double lhs = 0, rhs = 0, residual = 0;
};

struct ResidualReport {
    IdentityId identity;
    std::string chart;
    std::vector<ResidualSample> samples;
    double max_residual = 0;
    double tol = 0;
    bool pass = false;
};

// Throws ArgumentError for an incompatible model and PreconditionError if any
// sample has |H_f| > 1e-8.
ResidualReport check_identity(IdentityId id, const ImmersionChart& chart, const std::vector<Vec>& samples,
                              double tol);
std::vector<ResidualReport> check_identities(const std::vector<IdentityId>& ids, const ImmersionChart& chart,
                                             const std::vector<Vec>& samples, double tol);

inline constexpr double kFMinimalityTolerance = 1e-8;

// Halton points in the chart domain; seed != 0 applies a random shift modulo 1.
std::vector<Vec> sample_points(const ImmersionChart& chart, int count, std::uint64_t seed = 0);

} // namespace fminlab
