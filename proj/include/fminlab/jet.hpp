#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace fminlab {

inline constexpr int kMaxJetVars = 4;
inline constexpr int kMaxJetOrder = 4;
inline constexpr int kMaxJetCoeffs = 70; // C(4+4, 4)

using MultiIndex = std::array<int, kMaxJetVars>;

// Index tables for one (n_vars, order) shape. Multi-indices are enumerated in
// graded-lexicographic order, so a lower order layout is a prefix of a higher one.
struct JetLayout {
    struct Term {
        std::uint8_t i, j, k; // coeff_i * coeff_j contributes to coeff_k
    };

    int n_vars = 0;
    int order = 0;
    int size = 0;
    std::vector<MultiIndex> index;
    std::vector<Term> products; // sorted by k
    std::array<std::int16_t, 625> lookup{};

    static const JetLayout& get(int n_vars, int order);
    int find(const MultiIndex& beta) const;
};

class Jet {
public:
    Jet();
    explicit Jet(const JetLayout& layout);

    int n_vars() const { return layout_->n_vars; }
    int order() const { return layout_->order; }
    int size() const { return layout_->size; }
    const JetLayout& layout() const { return *layout_; }
    bool same_shape(const Jet& o) const { return layout_ == o.layout_; }

    double value() const { return c_[0]; }
    double operator[](int k) const { return c_[k]; }
    double& operator[](int k) { return c_[k]; }
    double coeff(const MultiIndex& beta) const;
    std::span<const double> coeffs() const { return {c_.data(), static_cast<std::size_t>(size())}; }

    Jet& operator+=(const Jet& b);
    Jet& operator-=(const Jet& b);
    Jet& operator*=(const Jet& b);
    Jet& operator/=(const Jet& b);
    Jet& operator+=(double s);
    Jet& operator-=(double s);
    Jet& operator*=(double s);
    Jet& operator/=(double s);

private:
    const JetLayout* layout_;
    std::array<double, kMaxJetCoeffs> c_{};
};

Jet jet_variable(double value, int var_index, int n_vars, int order);
Jet jet_constant(double value, int n_vars, int order);
Jet jet_from_coeffs(std::initializer_list<double> coeffs, int n_vars, int order);
Jet zero_like(const Jet& a);

Jet operator-(const Jet& a);
Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double r);
Jet square(const Jet& a);

// sum_k taylor[k] * (a - a(0))^k, with taylor[k] the k-th univariate Taylor
// coefficient of some g at a(0). Entries past the jet order are ignored.
Jet compose_univariate(std::span<const double> taylor, const Jet& a);

// Leading coefficients of a at a lower order.
Jet truncate(const Jet& a, int order);
// d/du_var, one order lower.
Jet differentiate(const Jet& a, int var);

// beta! * coeff(beta): the actual partial derivative.
double extract_partial(const Jet& a, const MultiIndex& beta);
double extract_partial(const Jet& a, std::initializer_list<int> beta);

std::ostream& operator<<(std::ostream& os, const Jet& a);

} // namespace fminlab
