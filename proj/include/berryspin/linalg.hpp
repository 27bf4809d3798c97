#pragma once

// Dense complex linear algebra for the 2x2 and 4x4 Hermitian problems of a
// two-spin system: states, Hermitian operators, a cyclic Jacobi eigensolver,
// partial traces, Schmidt decomposition and gauge alignment.
//
// Composite basis order is {|eg>, |ee>, |gg>, |ge>}, the first letter naming
// subsystem 1. Single-spin basis order is {|e>, |g>}.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include "berryspin/errors.hpp"

namespace berryspin {

using Complex = std::complex<double>;

template <std::size_t N>
using ComplexMatrix = std::array<std::array<Complex, N>, N>;

inline constexpr double kDefaultDegeneracyThreshold = 1e-6;

namespace detail {

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline double abs2(Complex z) { return std::norm(z); }

template <std::size_t N>
ComplexMatrix<N> identity_matrix() {
    ComplexMatrix<N> m{};
    for (std::size_t i = 0; i < N; ++i) m[i][i] = 1.0;
    return m;
}

template <std::size_t N>
ComplexMatrix<N> multiply(const ComplexMatrix<N>& a, const ComplexMatrix<N>& b) {
    ComplexMatrix<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const Complex aik = a[i][k];
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < N; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

template <std::size_t N>
ComplexMatrix<N> adjoint(const ComplexMatrix<N>& a) {
    ComplexMatrix<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out[i][j] = std::conj(a[j][i]);
    return out;
}

}  // namespace detail

/// Column vector of N complex amplitudes. Not necessarily normalized;
/// use `normalize()` / `normalized()` where a physical ket is required.
template <std::size_t N>
class StateVector {
public:
    StateVector() = default;

    explicit StateVector(const std::array<Complex, N>& amplitudes) : amps_(amplitudes) {
        for (const auto& z : amps_)
            if (!detail::finite(z)) throw ValidationError("StateVector: non-finite amplitude");
    }

    /// Builds and normalizes in one step; rejects the zero vector.
    static StateVector normalized(const std::array<Complex, N>& amplitudes) {
        return StateVector(amplitudes).normalize();
    }

    static StateVector basis(std::size_t index) {
        if (index >= N) throw ValidationError("StateVector::basis: index out of range");
        StateVector v;
        v.amps_[index] = 1.0;
        return v;
    }

    static constexpr std::size_t dim() { return N; }

    Complex operator[](std::size_t i) const { return amps_[i]; }
    const std::array<Complex, N>& amplitudes() const { return amps_; }
    std::span<const Complex, N> view() const { return std::span<const Complex, N>(amps_); }

    double norm() const {
        double s = 0.0;
        for (const auto& z : amps_) s += detail::abs2(z);
        return std::sqrt(s);
    }

    StateVector normalize() const {
        const double n = norm();
        if (!(n > 0.0)) throw ValidationError("StateVector::normalize: zero vector");
        return *this * Complex(1.0 / n);
    }

    friend StateVector operator*(const StateVector& v, Complex s) {
        StateVector out;
        for (std::size_t i = 0; i < N; ++i) out.amps_[i] = v.amps_[i] * s;
        return out;
    }
    friend StateVector operator*(Complex s, const StateVector& v) { return v * s; }

    friend StateVector operator+(const StateVector& a, const StateVector& b) {
        StateVector out;
        for (std::size_t i = 0; i < N; ++i) out.amps_[i] = a.amps_[i] + b.amps_[i];
        return out;
    }
    friend StateVector operator-(const StateVector& a, const StateVector& b) {
        StateVector out;
        for (std::size_t i = 0; i < N; ++i) out.amps_[i] = a.amps_[i] - b.amps_[i];
        return out;
    }

private:
    std::array<Complex, N> amps_{};
};

/// <bra|ket>
template <std::size_t N>
Complex inner(const StateVector<N>& bra, const StateVector<N>& ket) {
    Complex s{};
    for (std::size_t i = 0; i < N; ++i) s += std::conj(bra[i]) * ket[i];
    return s;
}

template <std::size_t N>
double distance(const StateVector<N>& a, const StateVector<N>& b) {
    return (a - b).norm();
}

/// Hermitian N x N operator. Input entries are symmetrized on construction,
/// so entries(i,j) == conj(entries(j,i)) holds exactly.
template <std::size_t N>
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const ComplexMatrix<N>& m) {
        for (std::size_t i = 0; i < N; ++i) {
            if (!detail::finite(m[i][i])) throw ValidationError("HermitianMatrix: non-finite entry");
            m_[i][i] = m[i][i].real();
            for (std::size_t j = i + 1; j < N; ++j) {
                if (!detail::finite(m[i][j]) || !detail::finite(m[j][i]))
                    throw ValidationError("HermitianMatrix: non-finite entry");
                const Complex upper = 0.5 * (m[i][j] + std::conj(m[j][i]));
                m_[i][j] = upper;
                m_[j][i] = std::conj(upper);
            }
        }
    }

    static HermitianMatrix diagonal(const std::array<double, N>& d) {
        ComplexMatrix<N> m{};
        for (std::size_t i = 0; i < N; ++i) m[i][i] = d[i];
        return HermitianMatrix(m);
    }

    static HermitianMatrix projector(const StateVector<N>& v) {
        ComplexMatrix<N> m{};
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m[i][j] = v[i] * std::conj(v[j]);
        return HermitianMatrix(m);
    }

    static constexpr std::size_t dim() { return N; }

    Complex operator()(std::size_t i, std::size_t j) const { return m_[i][j]; }
    const ComplexMatrix<N>& entries() const { return m_; }

    StateVector<N> apply(const StateVector<N>& v) const {
        std::array<Complex, N> out{};
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) out[i] += m_[i][j] * v[j];
        return StateVector<N>(out);
    }

    /// <v|M|v>, real for Hermitian M.
    double expectation(const StateVector<N>& v) const { return inner(v, apply(v)).real(); }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < N; ++i) t += m_[i][i].real();
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& row : m_)
            for (const auto& z : row) s += detail::abs2(z);
        return std::sqrt(s);
    }

private:
    ComplexMatrix<N> m_{};
};

/// Eigenpairs in ascending energy order. Each vector's largest-magnitude
/// component is real and positive.
template <std::size_t N>
struct EigenSystem {
    std::array<double, N> energies{};
    std::array<StateVector<N>, N> vectors{};
};

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiTolerance = 1e-14;

/// Fixes the global phase so that the largest-magnitude component is real
/// and positive (first such index on ties).
template <std::size_t N>
StateVector<N> fix_phase_by_largest_component(const StateVector<N>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < N; ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    const double mag = std::abs(v[best]);
    if (mag == 0.0) return v;
    return v * (std::conj(v[best]) / mag);
}

/// Cyclic Jacobi diagonalization with two-sided complex rotations.
/// Throws ConvergenceError naming `name` if the off-diagonal Frobenius norm
/// has not dropped below 1e-14 * ||M||_F within 100 sweeps.
template <std::size_t N>
EigenSystem<N> hermitian_eig(const HermitianMatrix<N>& matrix, std::string_view name = "matrix") {
    static_assert(N >= 1);
    ComplexMatrix<N> a = matrix.entries();
    ComplexMatrix<N> v = detail::identity_matrix<N>();
    const double scale = matrix.frobenius_norm();

    auto off_diagonal = [&a] {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (i != j) s += detail::abs2(a[i][j]);
        return std::sqrt(s);
    };

    bool converged = false;
    for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
        if (off_diagonal() <= kJacobiTolerance * scale) {
            converged = true;
            break;
        }
        if (sweep == kJacobiMaxSweeps) break;
        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const Complex apq = a[p][q];
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const Complex phase_conj = std::conj(apq) / mag;
                const double tau = (a[q][q].real() - a[p][p].real()) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                ComplexMatrix<N> u = detail::identity_matrix<N>();
                u[p][p] = c;
                u[p][q] = s;
                u[q][p] = -s * phase_conj;
                u[q][q] = c * phase_conj;

                a = detail::multiply(detail::adjoint(u), detail::multiply(a, u));
                v = detail::multiply(v, u);
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for (std::size_t i = 0; i < N; ++i) a[i][i] = a[i][i].real();
            }
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "hermitian_eig: no convergence after " << kJacobiMaxSweeps << " sweeps for " << name
            << " (off-diagonal norm " << off_diagonal() << ", scale " << scale << ")";
        throw ConvergenceError(msg.str());
    }

    std::array<std::size_t, N> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t i, std::size_t j) { return a[i][i].real() < a[j][j].real(); });

    EigenSystem<N> out;
    for (std::size_t k = 0; k < N; ++k) {
        const std::size_t col = order[k];
        std::array<Complex, N> amps{};
        for (std::size_t i = 0; i < N; ++i) amps[i] = v[i][col];
        out.energies[k] = a[col][col].real();
        out.vectors[k] = fix_phase_by_largest_component(StateVector<N>::normalized(amps));
    }
    return out;
}

/// Unit-trace, positive semidefinite Hermitian operator.
template <std::size_t N>
class DensityMatrix {
public:
    static constexpr double kTraceTolerance = 1e-12;
    static constexpr double kPositivityTolerance = 1e-12;

    explicit DensityMatrix(const HermitianMatrix<N>& m) : m_(m) {
        if (std::abs(m_.trace() - 1.0) > kTraceTolerance) {
            std::ostringstream msg;
            msg << "DensityMatrix: trace " << m_.trace() << " differs from 1";
            throw ValidationError(msg.str());
        }
        const auto ev = eigenvalues();
        if (ev.front() < -kPositivityTolerance) {
            std::ostringstream msg;
            msg << "DensityMatrix: negative eigenvalue " << ev.front();
            throw ValidationError(msg.str());
        }
    }

    static DensityMatrix pure(const StateVector<N>& psi) {
        return DensityMatrix(HermitianMatrix<N>::projector(psi.normalize()));
    }

    const HermitianMatrix<N>& matrix() const { return m_; }
    Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    double trace() const { return m_.trace(); }

    /// Tr(rho^2)
    double purity() const {
        double s = 0.0;
        for (const auto& row : m_.entries())
            for (const auto& z : row) s += detail::abs2(z);
        return s;
    }

    /// Ascending.
    std::array<double, N> eigenvalues() const {
        if constexpr (N == 2) {
            const double a = m_(0, 0).real();
            const double d = m_(1, 1).real();
            const double half_trace = 0.5 * (a + d);
            const double radius = std::hypot(0.5 * (a - d), std::abs(m_(0, 1)));
            return {half_trace - radius, half_trace + radius};
        } else {
            return hermitian_eig(m_, "density matrix").energies;
        }
    }

private:
    HermitianMatrix<N> m_;
};

// ---------------------------------------------------------------------------
// Bipartite structure of the composite space.

enum class Subsystem { first = 1, second = 2 };

/// Index in {|eg>,|ee>,|gg>,|ge>} of the product |s1>|s2>, with 0 = e, 1 = g.
constexpr std::size_t composite_index(std::size_t s1, std::size_t s2) {
    constexpr std::size_t table[2][2] = {{1, 0}, {3, 2}};
    return table[s1][s2];
}

/// |a> (x) |b> laid out in the composite basis order.
inline StateVector<4> tensor(const StateVector<2>& first, const StateVector<2>& second) {
    std::array<Complex, 4> amps{};
    for (std::size_t s1 = 0; s1 < 2; ++s1)
        for (std::size_t s2 = 0; s2 < 2; ++s2) amps[composite_index(s1, s2)] = first[s1] * second[s2];
    return StateVector<4>(amps);
}

namespace detail {

/// C[s1][s2] = <s1 s2|psi>
inline ComplexMatrix<2> coefficient_matrix(const StateVector<4>& psi) {
    ComplexMatrix<2> c{};
    for (std::size_t s1 = 0; s1 < 2; ++s1)
        for (std::size_t s2 = 0; s2 < 2; ++s2) c[s1][s2] = psi[composite_index(s1, s2)];
    return c;
}

inline void require_unit_norm(double norm, const char* where) {
    if (std::abs(norm - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << where << ": input norm " << norm << " is not 1";
        throw ValidationError(msg.str());
    }
}

}  // namespace detail

/// Reduced state of the subsystem `keep` for a normalized composite ket.
inline DensityMatrix<2> partial_trace(const StateVector<4>& psi, Subsystem keep) {
    detail::require_unit_norm(psi.norm(), "partial_trace");
    const auto c = detail::coefficient_matrix(psi);
    ComplexMatrix<2> rho{};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                rho[i][j] += keep == Subsystem::first ? c[i][k] * std::conj(c[j][k])
                                                      : c[k][i] * std::conj(c[k][j]);
    return DensityMatrix<2>(HermitianMatrix<2>(rho));
}

inline DensityMatrix<2> partial_trace(const DensityMatrix<4>& rho, Subsystem keep) {
    ComplexMatrix<2> out{};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                out[i][j] += keep == Subsystem::first
                                 ? rho(composite_index(i, k), composite_index(j, k))
                                 : rho(composite_index(k, i), composite_index(k, j));
    return DensityMatrix<2>(HermitianMatrix<2>(out));
}

/// Runtime-sized entry point; rejects anything but a 4-component ket.
inline DensityMatrix<2> partial_trace(std::span<const Complex> amplitudes, Subsystem keep) {
    if (amplitudes.size() != 4) {
        std::ostringstream msg;
        msg << "partial_trace: expected a 4-component composite state, got " << amplitudes.size();
        throw ValidationError(msg.str());
    }
    std::array<Complex, 4> a{};
    std::copy(amplitudes.begin(), amplitudes.end(), a.begin());
    return partial_trace(StateVector<4>(a), keep);
}

/// psi = sum_i sqrt(weights[i]) first[i] (x) second[i], weights descending.
struct SchmidtDecomposition {
    std::array<double, 2> weights{};
    std::array<StateVector<2>, 2> first{};
    std::array<StateVector<2>, 2> second{};

    StateVector<4> reconstruct() const {
        StateVector<4> out;
        for (std::size_t i = 0; i < 2; ++i)
            out = out + Complex(std::sqrt(weights[i])) * tensor(first[i], second[i]);
        return out;
    }
};

inline SchmidtDecomposition schmidt_decompose(const StateVector<4>& psi) {
    detail::require_unit_norm(psi.norm(), "schmidt_decompose");
    const auto c = detail::coefficient_matrix(psi);
    const auto rho1 = partial_trace(psi, Subsystem::first);
    const auto eig = hermitian_eig(rho1.matrix(), "reduced density matrix");

    // f_i = (<e_i| (x) 1)|psi> = sqrt(p_i) |E_i>
    std::array<StateVector<2>, 2> local1{eig.vectors[1], eig.vectors[0]};
    std::array<StateVector<2>, 2> unnormalized{};
    for (std::size_t i = 0; i < 2; ++i) {
        std::array<Complex, 2> f{};
        for (std::size_t s2 = 0; s2 < 2; ++s2)
            for (std::size_t s1 = 0; s1 < 2; ++s1) f[s2] += std::conj(local1[i][s1]) * c[s1][s2];
        unnormalized[i] = StateVector<2>(f);
    }

    SchmidtDecomposition out;
    out.first = local1;
    for (std::size_t i = 0; i < 2; ++i) out.weights[i] = std::pow(unnormalized[i].norm(), 2);
    const double total = out.weights[0] + out.weights[1];
    for (auto& w : out.weights) w /= total;

    constexpr double kNullWeight = 1e-24;
    const std::size_t major = out.weights[0] >= out.weights[1] ? 0 : 1;
    const std::size_t minor = 1 - major;
    out.second[major] = unnormalized[major].normalize();
    if (out.weights[minor] > kNullWeight) {
        out.second[minor] = unnormalized[minor].normalize();
    } else {
        const auto& e = out.second[major];
        out.second[minor] = StateVector<2>(std::array<Complex, 2>{-std::conj(e[1]), std::conj(e[0])});
    }
    if (major == 1) {
        std::swap(out.weights[0], out.weights[1]);
        std::swap(out.first[0], out.first[1]);
        std::swap(out.second[0], out.second[1]);
    }
    return out;
}

/// Returns `candidate` times the unit phase that makes <reference|result>
/// real and positive. Throws GaugeTrackingError when the overlap magnitude
/// is at or below `threshold` (level crossing or too coarse a grid).
template <std::size_t N>
StateVector<N> phase_align(const StateVector<N>& reference, const StateVector<N>& candidate,
                           double threshold = kDefaultDegeneracyThreshold) {
    const Complex overlap = inner(reference, candidate);
    const double mag = std::abs(overlap);
    if (!(mag > threshold)) {
        std::ostringstream msg;
        msg << "phase_align: overlap " << mag << " at or below threshold " << threshold;
        throw GaugeTrackingError(msg.str());
    }
    return candidate * (std::conj(overlap) / mag);
}

}  // namespace berryspin
