#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qtk {

using Cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Dense unitary acting on one or two qutrits (3x3 or 9x9), row-major.
// Public constructors validate unitarity to 1e-12 in the max norm.
class GateMatrix {
public:
    static GateMatrix identity(int arity);
    static GateMatrix checked(int arity, std::span<const Cx> entries);
    // Skips the unitarity check; for internal composition of already-checked
    // factors.
    static GateMatrix unchecked(int arity, std::span<const Cx> entries);

    int arity() const { return arity_; }
    int dim() const { return dim_; }
    Cx operator()(int r, int c) const { return m_[static_cast<size_t>(r) * dim_ + c]; }
    Cx& at(int r, int c) { return m_[static_cast<size_t>(r) * dim_ + c]; }
    const Cx* data() const { return m_.data(); }

    GateMatrix dagger() const;
    GateMatrix operator*(const GateMatrix& rhs) const;

    double max_abs_diff(const GateMatrix& rhs) const;
    // max|U†U - I|
    double unitarity_defect() const;

private:
    explicit GateMatrix(int arity);
    int arity_;
    int dim_;
    std::array<Cx, 81> m_{};
};

// Dense n-qutrit matrix (dim = 3^n); used for circuit unitaries and oracles.
class Unitary {
public:
    Unitary() = default;
    explicit Unitary(size_t dim) : dim_(dim), m_(dim * dim) {}
    static Unitary identity(size_t dim);

    size_t dim() const { return dim_; }
    Cx operator()(size_t r, size_t c) const { return m_[r * dim_ + c]; }
    Cx& at(size_t r, size_t c) { return m_[r * dim_ + c]; }
    const Cx* data() const { return m_.data(); }

    Unitary dagger() const;
    Unitary operator*(const Unitary& rhs) const;
    double max_abs_diff(const Unitary& rhs) const;

private:
    size_t dim_ = 0;
    std::vector<Cx> m_;
};

// Quotients out one global phase by aligning the largest-magnitude entry of
// `b`, then returns max|a - e^{i phase} b|.
double max_diff_up_to_global_phase(const Unitary& a, const Unitary& b);
bool equal_up_to_global_phase(const Unitary& a, const Unitary& b, double tol);

double max_diff_up_to_global_phase(std::span<const Cx> a, std::span<const Cx> b);

}  // namespace qtk
