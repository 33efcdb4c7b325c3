#include "fminlab/jet.hpp"

#include "fminlab/errors.hpp"

#include <cmath>
#include <mutex>
#include <ostream>
#include <string>

namespace fminlab {

namespace {

int key_of(const MultiIndex& beta) {
    int key = 0;
    for (int v = kMaxJetVars - 1; v >= 0; --v) key = key * 5 + beta[v];
    return key;
}

int degree(const MultiIndex& beta) { return beta[0] + beta[1] + beta[2] + beta[3]; }

// All multi-indices of total degree d in n variables, lexicographically descending.
void append_degree(int n, int d, int var, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (var == n - 1) {
        cur[var] = d;
        out.push_back(cur);
        cur[var] = 0;
        return;
    }
    for (int e = d; e >= 0; --e) {
        cur[var] = e;
        append_degree(n, d - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

JetLayout build_layout(int n, int order) {
    JetLayout L;
    L.n_vars = n;
    L.order = order;
    L.lookup.fill(-1);
    MultiIndex cur{};
    for (int d = 0; d <= order; ++d) append_degree(n, d, 0, cur, L.index);
    L.size = static_cast<int>(L.index.size());
    for (int k = 0; k < L.size; ++k) L.lookup[key_of(L.index[k])] = static_cast<std::int16_t>(k);
    for (int k = 0; k < L.size; ++k) {
        for (int i = 0; i < L.size; ++i) {
            MultiIndex rest{};
            bool ok = true;
            for (int v = 0; v < kMaxJetVars; ++v) {
                rest[v] = L.index[k][v] - L.index[i][v];
                if (rest[v] < 0) ok = false;
            }
            if (!ok) continue;
            int j = L.lookup[key_of(rest)];
            L.products.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                                  static_cast<std::uint8_t>(k)});
        }
    }
    return L;
}

void check_shape(const Jet& a, const Jet& b) {
    if (!a.same_shape(b))
        throw ArgumentError("jet shape mismatch: (" + std::to_string(a.n_vars()) + "," +
                            std::to_string(a.order()) + ") vs (" + std::to_string(b.n_vars()) + "," +
                            std::to_string(b.order()) + ")");
}

void check_shape_args(int n_vars, int order) {
    if (n_vars < 1 || n_vars > kMaxJetVars)
        throw ArgumentError("jet n_vars out of range: " + std::to_string(n_vars));
    if (order < 0 || order > kMaxJetOrder)
        throw ArgumentError("jet order out of range: " + std::to_string(order));
}

double factorial(int k) {
    double r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

} // namespace

const JetLayout& JetLayout::get(int n_vars, int order) {
    check_shape_args(n_vars, order);
    static std::once_flag once;
    static std::array<std::array<JetLayout, kMaxJetOrder + 1>, kMaxJetVars> table;
    std::call_once(once, [] {
        for (int n = 1; n <= kMaxJetVars; ++n)
            for (int k = 0; k <= kMaxJetOrder; ++k) table[n - 1][k] = build_layout(n, k);
    });
    return table[n_vars - 1][order];
}

int JetLayout::find(const MultiIndex& beta) const {
    for (int v = 0; v < kMaxJetVars; ++v)
        if (beta[v] < 0 || (v >= n_vars && beta[v] != 0)) return -1;
    if (degree(beta) > order) return -1;
    return lookup[key_of(beta)];
}

Jet::Jet() : layout_(&JetLayout::get(1, 0)) {}

Jet::Jet(const JetLayout& layout) : layout_(&layout) {}

double Jet::coeff(const MultiIndex& beta) const {
    int k = layout_->find(beta);
    if (k < 0) throw ArgumentError("multi-index outside jet");
    return c_[k];
}

Jet& Jet::operator+=(const Jet& b) {
    check_shape(*this, b);
    for (int k = 0; k < size(); ++k) c_[k] += b.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& b) {
    check_shape(*this, b);
    for (int k = 0; k < size(); ++k) c_[k] -= b.c_[k];
    return *this;
}

Jet& Jet::operator*=(const Jet& b) {
    *this = *this * b;
    return *this;
}

Jet& Jet::operator/=(const Jet& b) {
    *this = *this / b;
    return *this;
}

Jet& Jet::operator+=(double s) {
    c_[0] += s;
    return *this;
}

Jet& Jet::operator-=(double s) {
    c_[0] -= s;
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (int k = 0; k < size(); ++k) c_[k] *= s;
    return *this;
}

Jet& Jet::operator/=(double s) {
    for (int k = 0; k < size(); ++k) c_[k] /= s;
    return *this;
}

Jet jet_variable(double value, int var_index, int n_vars, int order) {
    check_shape_args(n_vars, order);
    if (var_index < 0 || var_index >= n_vars)
        throw ArgumentError("jet variable index out of range: " + std::to_string(var_index));
    Jet x(JetLayout::get(n_vars, order));
    x[0] = value;
    if (order >= 1) x[1 + var_index] = 1.0;
    return x;
}

Jet jet_constant(double value, int n_vars, int order) {
    Jet x(JetLayout::get(n_vars, order));
    x[0] = value;
    return x;
}

Jet jet_from_coeffs(std::initializer_list<double> coeffs, int n_vars, int order) {
    Jet x(JetLayout::get(n_vars, order));
    if (static_cast<int>(coeffs.size()) != x.size())
        throw ArgumentError("coefficient count does not match jet shape");
    int k = 0;
    for (double c : coeffs) x[k++] = c;
    return x;
}

Jet zero_like(const Jet& a) { return Jet(a.layout()); }

Jet operator-(const Jet& a) {
    Jet r(a.layout());
    for (int k = 0; k < a.size(); ++k) r[k] = -a[k];
    return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }

Jet operator*(const Jet& a, const Jet& b) {
    check_shape(a, b);
    Jet r(a.layout());
    for (const auto& t : a.layout().products) r[t.k] += a[t.i] * b[t.j];
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    check_shape(a, b);
    double b0 = b[0];
    if (std::abs(b0) <= 1e-300) throw SingularityError("jet division by zero constant term");
    Jet r(a.layout());
    const auto& P = a.layout().products;
    std::size_t p = 0;
    for (int k = 0; k < a.size(); ++k) {
        double acc = a[k];
        for (; p < P.size() && P[p].k == k; ++p)
            if (P[p].i != 0) acc -= b[P[p].i] * r[P[p].j];
        r[k] = acc / b0;
    }
    return r;
}

Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator-(double s, const Jet& a) { return -a + s; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) { return a /= s; }
Jet operator/(double s, const Jet& a) {
    Jet one(a.layout());
    one[0] = s;
    return one / a;
}

Jet compose_univariate(std::span<const double> taylor, const Jet& a) {
    Jet nil = a;
    nil[0] = 0.0;
    int K = std::min<int>(a.order(), static_cast<int>(taylor.size()) - 1);
    Jet r(a.layout());
    r[0] = taylor[K];
    for (int k = K - 1; k >= 0; --k) {
        r = r * nil;
        r[0] += taylor[k];
    }
    return r;
}

Jet sin(const Jet& a) {
    double s = std::sin(a[0]), c = std::cos(a[0]);
    std::array<double, kMaxJetOrder + 1> t;
    const double cyc[4] = {s, c, -s, -c};
    for (int k = 0; k <= kMaxJetOrder; ++k) t[k] = cyc[k % 4] / factorial(k);
    return compose_univariate(t, a);
}

Jet cos(const Jet& a) {
    double s = std::sin(a[0]), c = std::cos(a[0]);
    std::array<double, kMaxJetOrder + 1> t;
    const double cyc[4] = {c, -s, -c, s};
    for (int k = 0; k <= kMaxJetOrder; ++k) t[k] = cyc[k % 4] / factorial(k);
    return compose_univariate(t, a);
}

Jet exp(const Jet& a) {
    double e = std::exp(a[0]);
    std::array<double, kMaxJetOrder + 1> t;
    for (int k = 0; k <= kMaxJetOrder; ++k) t[k] = e / factorial(k);
    return compose_univariate(t, a);
}

Jet log(const Jet& a) {
    double x = a[0];
    if (!(x > 1e-300)) throw SingularityError("jet log of non-positive value");
    std::array<double, kMaxJetOrder + 1> t;
    t[0] = std::log(x);
    for (int k = 1; k <= kMaxJetOrder; ++k) t[k] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(x, k));
    return compose_univariate(t, a);
}

Jet pow(const Jet& a, double r) {
    double x = a[0];
    bool whole = r >= 0 && r == std::floor(r);
    if (!whole && !(x > 1e-300)) throw SingularityError("jet pow of non-positive value");
    std::array<double, kMaxJetOrder + 1> t{};
    double binom = 1.0;
    for (int k = 0; k <= kMaxJetOrder; ++k) {
        if (whole && k > r) break;
        t[k] = binom * std::pow(x, r - k);
        binom *= (r - k) / (k + 1);
    }
    return compose_univariate(t, a);
}

Jet sqrt(const Jet& a) {
    if (!(a[0] > 1e-300)) throw SingularityError("jet sqrt of non-positive value");
    return pow(a, 0.5);
}

Jet square(const Jet& a) { return a * a; }

Jet truncate(const Jet& a, int order) {
    if (order > a.order()) throw ArgumentError("truncate cannot raise jet order");
    Jet r(JetLayout::get(a.n_vars(), order));
    for (int k = 0; k < r.size(); ++k) r[k] = a[k];
    return r;
}

Jet differentiate(const Jet& a, int var) {
    if (a.order() < 1) throw CapabilityError("cannot differentiate an order-0 jet");
    if (var < 0 || var >= a.n_vars()) throw ArgumentError("differentiation variable out of range");
    const JetLayout& lo = JetLayout::get(a.n_vars(), a.order() - 1);
    Jet r(lo);
    for (int k = 0; k < lo.size; ++k) {
        MultiIndex up = lo.index[k];
        up[var] += 1;
        r[k] = up[var] * a[a.layout().find(up)];
    }
    return r;
}

double extract_partial(const Jet& a, const MultiIndex& beta) {
    int k = a.layout().find(beta);
    if (k < 0) throw ArgumentError("derivative order exceeds jet order");
    double f = 1.0;
    for (int v = 0; v < kMaxJetVars; ++v) f *= factorial(beta[v]);
    return f * a[k];
}

double extract_partial(const Jet& a, std::initializer_list<int> beta) {
    if (static_cast<int>(beta.size()) > kMaxJetVars) throw ArgumentError("multi-index too long");
    MultiIndex b{};
    int v = 0;
    for (int e : beta) b[v++] = e;
    return extract_partial(a, b);
}

std::ostream& operator<<(std::ostream& os, const Jet& a) {
    os << "Jet(" << a.n_vars() << "," << a.order() << ")[";
    for (int k = 0; k < a.size(); ++k) os << (k ? ", " : "") << a[k];
    return os << "]";
}

} // namespace fminlab
