#include "qtk/gate_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace qtk {

namespace {
int dim_for_arity(int arity) {
    if (arity != 1 && arity != 2) {
        throw std::invalid_argument("GateMatrix arity must be 1 or 2");
    }
    return arity == 1 ? 3 : 9;
}
}  // namespace

GateMatrix::GateMatrix(int arity) : arity_(arity), dim_(dim_for_arity(arity)) {}

GateMatrix GateMatrix::identity(int arity) {
    GateMatrix g(arity);
    for (int i = 0; i < g.dim_; ++i) g.at(i, i) = 1.0;
    return g;
}

GateMatrix GateMatrix::unchecked(int arity, std::span<const Cx> entries) {
    GateMatrix g(arity);
    const size_t need = static_cast<size_t>(g.dim_) * g.dim_;
    if (entries.size() != need) {
        throw std::invalid_argument("GateMatrix entry count does not match arity");
    }
    for (size_t i = 0; i < need; ++i) g.m_[i] = entries[i];
    return g;
}

GateMatrix GateMatrix::checked(int arity, std::span<const Cx> entries) {
    GateMatrix g = unchecked(arity, entries);
    if (g.unitarity_defect() >= 1e-12) {
        throw std::invalid_argument("GateMatrix is not unitary to 1e-12");
    }
    return g;
}

GateMatrix GateMatrix::dagger() const {
    GateMatrix g(arity_);
    for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) g.at(c, r) = std::conj((*this)(r, c));
    return g;
}

GateMatrix GateMatrix::operator*(const GateMatrix& rhs) const {
    if (arity_ != rhs.arity_) throw std::invalid_argument("arity mismatch in GateMatrix product");
    GateMatrix g(arity_);
    for (int r = 0; r < dim_; ++r) {
        for (int k = 0; k < dim_; ++k) {
            const Cx a = (*this)(r, k);
            if (a == 0.0) continue;
            for (int c = 0; c < dim_; ++c) g.at(r, c) += a * rhs(k, c);
        }
    }
    return g;
}

double GateMatrix::max_abs_diff(const GateMatrix& rhs) const {
    double m = 0.0;
    for (int i = 0; i < dim_ * dim_; ++i) m = std::max(m, std::abs(m_[i] - rhs.m_[i]));
    return m;
}

double GateMatrix::unitarity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) {
            Cx acc = 0.0;
            for (int k = 0; k < dim_; ++k) acc += std::conj((*this)(k, r)) * (*this)(k, c);
            if (r == c) acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

Unitary Unitary::identity(size_t dim) {
    Unitary u(dim);
    for (size_t i = 0; i < dim; ++i) u.at(i, i) = 1.0;
    return u;
}

Unitary Unitary::dagger() const {
    Unitary u(dim_);
    for (size_t r = 0; r < dim_; ++r)
        for (size_t c = 0; c < dim_; ++c) u.at(c, r) = std::conj((*this)(r, c));
    return u;
}

Unitary Unitary::operator*(const Unitary& rhs) const {
    if (dim_ != rhs.dim_) throw std::invalid_argument("dim mismatch in Unitary product");
    Unitary u(dim_);
    for (size_t r = 0; r < dim_; ++r) {
        for (size_t k = 0; k < dim_; ++k) {
            const Cx a = (*this)(r, k);
            if (a == 0.0) continue;
            for (size_t c = 0; c < dim_; ++c) u.at(r, c) += a * rhs(k, c);
        }
    }
    return u;
}

double Unitary::max_abs_diff(const Unitary& rhs) const {
    double m = 0.0;
    for (size_t i = 0; i < m_.size(); ++i) m = std::max(m, std::abs(m_[i] - rhs.m_[i]));
    return m;
}

double max_diff_up_to_global_phase(std::span<const Cx> a, std::span<const Cx> b) {
    if (a.size() != b.size()) throw std::invalid_argument("size mismatch in phase-aligned diff");
    size_t anchor = 0;
    double best = -1.0;
    for (size_t i = 0; i < b.size(); ++i) {
        const double m = std::abs(b[i]);
        if (m > best) {
            best = m;
            anchor = i;
        }
    }
    if (best <= 0.0) {
        double m = 0.0;
        for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
        return m;
    }
    const Cx ratio = a[anchor] / b[anchor];
    const double mag = std::abs(ratio);
    const Cx phase = mag > 0.0 ? ratio / mag : Cx(1.0, 0.0);
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - phase * b[i]));
    return m;
}

double max_diff_up_to_global_phase(const Unitary& a, const Unitary& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dim mismatch in phase-aligned diff");
    const size_t total = a.dim() * a.dim();
    return max_diff_up_to_global_phase(std::span<const Cx>(a.data(), total),
                                       std::span<const Cx>(b.data(), total));
}

bool equal_up_to_global_phase(const Unitary& a, const Unitary& b, double tol) {
    return max_diff_up_to_global_phase(a, b) < tol;
}

}  // namespace qtk
