#pragma once

// Two spin-1/2 particles with a double-spin-flip coupling g; only spin 1 sees
// a field of fixed polar angle theta whose azimuth phi is rotated. Energies
// are in units of the Zeeman scale (half alpha B0), hbar = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "berryspin/errors.hpp"
#include "berryspin/linalg.hpp"

namespace berryspin {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Distance kept from the field poles theta = 0 and theta = pi.
inline constexpr double kDefaultThetaMargin = 1e-3;

/// Physical parameter point (g, theta). Validated on construction.
class ModelParams {
public:
    ModelParams(double g, double theta, double theta_margin = kDefaultThetaMargin) : g_(g), theta_(theta) {
        if (!std::isfinite(g) || g < 0.0) {
            std::ostringstream msg;
            msg << "ModelParams: coupling g must be finite and >= 0, got " << g;
            throw ValidationError(msg.str());
        }
        if (!std::isfinite(theta) || !(theta > theta_margin) || !(theta < kPi - theta_margin)) {
            std::ostringstream msg;
            msg << "ModelParams: theta must lie in (" << theta_margin << ", pi - " << theta_margin << "), got "
                << theta;
            throw ValidationError(msg.str());
        }
    }

    double g() const { return g_; }
    double theta() const { return theta_; }
    bool decoupled() const { return g_ == 0.0; }

private:
    double g_;
    double theta_;
};

/// Level index j in {1,2,3,4}; E1 > E3 > 0 > E4 > E2 for g > 0.
class EigenLabel {
public:
    explicit constexpr EigenLabel(int j) : j_(j) {
        if (j < 1 || j > 4) throw ValidationError("EigenLabel: label must be 1, 2, 3 or 4, got " + std::to_string(j));
    }

    constexpr int value() const { return j_; }
    constexpr std::size_t slot() const { return static_cast<std::size_t>(j_ - 1); }

    /// Levels 1 and 2 come from the outer root pair +-E1, levels 3 and 4 from +-E3.
    constexpr bool outer_pair() const { return j_ <= 2; }
    /// Levels 1 and 3 have positive energy.
    constexpr bool positive() const { return j_ % 2 == 1; }

    friend constexpr bool operator==(EigenLabel, EigenLabel) = default;

    static constexpr std::array<EigenLabel, 4> all() {
        return {EigenLabel(1), EigenLabel(2), EigenLabel(3), EigenLabel(4)};
    }

private:
    int j_;
};

/// Hamiltonian matrix at field azimuth phi, in the basis {|eg>,|ee>,|gg>,|ge>}.
inline HermitianMatrix<4> hamiltonian(const ModelParams& params, double phi) {
    const double c = std::cos(params.theta());
    const double s = std::sin(params.theta());
    const Complex down = s * Complex(std::cos(phi), -std::sin(phi));  // sin(theta) e^{-i phi}
    const double g = params.g();
    ComplexMatrix<4> m{};
    m[0] = {c, 0.0, down, 0.0};
    m[1] = {0.0, c, g, down};
    m[2] = {std::conj(down), g, -c, 0.0};
    m[3] = {0.0, std::conj(down), 0.0, -c};
    return HermitianMatrix<4>(m);
}

/// Energies indexed by label slot (E1, E2, E3, E4).
struct Spectrum {
    std::array<double, 4> energies{};
    double operator[](EigenLabel label) const { return energies[label.slot()]; }
};

namespace detail {

/// Closed-form pieces shared by the spectrum and eigenvector formulas, all
/// evaluated without catastrophic cancellation.
struct RootPair {
    double energy_sq;      // E^2
    double cos2_minus_e2;  // cos^2(theta) - E^2
};

inline RootPair root_pair(const ModelParams& params, bool outer) {
    const double g = params.g();
    const double s = std::sin(params.theta());
    const double c = std::cos(params.theta());
    const double s2 = s * s;
    const double root = std::sqrt(g * g + 4.0 * s2);
    const double outer_e2 = 1.0 + 0.5 * g * g + 0.5 * g * root;
    if (outer) {
        return {outer_e2, -0.5 * (2.0 * s2 + g * g + g * root)};
    }
    // E1^2 E3^2 = 1 + g^2 cos^2(theta)
    const double inner_e2 = (1.0 + g * g * c * c) / outer_e2;
    const double cos2_minus_e2 = -2.0 * s2 * s2 / (2.0 * s2 + g * g + g * root);
    return {inner_e2, cos2_minus_e2};
}

}  // namespace detail

/// E1 = sqrt(1 + g^2/2 + (g/2) sqrt(g^2 + 4 sin^2 theta)) = -E2,
/// E3 = sqrt(1 + g^2/2 - (g/2) sqrt(g^2 + 4 sin^2 theta)) = -E4.
inline Spectrum eigenvalues_analytic(const ModelParams& params) {
    const double e1 = std::sqrt(detail::root_pair(params, true).energy_sq);
    const double e3 = std::sqrt(detail::root_pair(params, false).energy_sq);
    return Spectrum{{e1, -e1, e3, -e3}};
}

/// Quartic whose roots are the eigenvalues:
/// (cos^2 - E^2)^2 + (2 sin^2 + g^2)(cos^2 - E^2) + sin^4.
inline double char_poly_residual(const ModelParams& params, double energy) {
    const double c = std::cos(params.theta());
    const double s = std::sin(params.theta());
    const double x = c * c - energy * energy;
    const double g = params.g();
    return x * x + (2.0 * s * s + g * g) * x + s * s * s * s;
}

/// Minimum pairwise level spacing.
inline double spectral_gap(const ModelParams& params) {
    const auto e = eigenvalues_analytic(params).energies;
    double gap = std::abs(e[0] - e[1]);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) gap = std::min(gap, std::abs(e[i] - e[j]));
    return gap;
}

inline constexpr double kEigenvectorResidualTolerance = 1e-8;

/// Instantaneous eigenvector of `label` at azimuth `phi`, from the
/// eigenvalue equation of the model:
///   a = sin(theta) e^{-i phi},  b = (E^2 - 1)/g,  c = E - cos(theta),
///   d = sin(theta) b e^{i phi} / (E + cos(theta)).
/// Component moduli do not depend on phi. The returned vector is normalized
/// and its residual ||H psi - E psi|| is checked at runtime.
inline StateVector<4> eigenvector_analytic(const ModelParams& params, double phi, EigenLabel label) {
    if (params.decoupled())
        throw ValidationError("eigenvector_analytic: requires g > 0 (levels are degenerate at g = 0)");

    const double g = params.g();
    const double s = std::sin(params.theta());
    const double c = std::cos(params.theta());
    const auto pair = detail::root_pair(params, label.outer_pair());
    const double mag_e = std::sqrt(pair.energy_sq);
    const double energy = label.positive() ? mag_e : -mag_e;

    // E - cos and E + cos: evaluate the non-cancelling one directly and get
    // the other from (E - cos)(E + cos) = -(cos^2 - E^2).
    double e_minus_c = energy - c;
    double e_plus_c = energy + c;
    if (std::abs(e_plus_c) >= std::abs(e_minus_c)) {
        e_minus_c = -pair.cos2_minus_e2 / e_plus_c;
    } else {
        e_plus_c = -pair.cos2_minus_e2 / e_minus_c;
    }

    // (E^2 - 1)/g has a finite g -> 0 limit; use the cancellation-free form.
    const double root = std::sqrt(g * g + 4.0 * s * s);
    const double b = label.outer_pair() ? 0.5 * (g + root) : -2.0 * s * s / (g + root);

    const Complex rot_down(std::cos(phi), -std::sin(phi));
    const Complex rot_up = std::conj(rot_down);
    std::array<Complex, 4> amps{s * rot_down, b, e_minus_c, (s * b / e_plus_c) * rot_up};
    const auto psi = StateVector<4>::normalized(amps);

    const double residual = (hamiltonian(params, phi).apply(psi) - Complex(energy) * psi).norm();
    if (!(residual <= kEigenvectorResidualTolerance)) {
        std::ostringstream msg;
        msg << "eigenvector_analytic: residual " << residual << " exceeds " << kEigenvectorResidualTolerance
            << " at g=" << g << " theta=" << params.theta() << " label=" << label.value();
        throw ConsistencyError(msg.str());
    }
    return psi;
}

// ---------------------------------------------------------------------------
// Decoupled (g = 0) solution. Spin 1 is aligned (upper Zeeman level, E = +1)
// or anti-aligned (lower, E = -1) with the field; spin 2 is frozen. Labels 1
// and 2 take spin 2 in |g>, labels 3 and 4 in |e>; odd labels are upper.

enum class ZeemanLevel { upper, lower };

inline ZeemanLevel decoupled_level(EigenLabel label) {
    return label.positive() ? ZeemanLevel::upper : ZeemanLevel::lower;
}

/// Spin-1 eigenstate (sin(theta) e^{-i phi}, +-1 - cos(theta)) of n.sigma, normalized.
inline StateVector<2> field_aligned_spin(double theta, double phi, ZeemanLevel level) {
    const double sign = level == ZeemanLevel::upper ? 1.0 : -1.0;
    return StateVector<2>::normalized(
        {std::sin(theta) * Complex(std::cos(phi), -std::sin(phi)), Complex(sign - std::cos(theta))});
}

inline StateVector<4> decoupled_eigenvector(double theta, double phi, EigenLabel label) {
    const auto spin1 = field_aligned_spin(theta, phi, decoupled_level(label));
    const auto spin2 = StateVector<2>::basis(label.outer_pair() ? 1 : 0);
    return tensor(spin1, spin2);
}

/// Energy of `label` at g = 0.
inline double decoupled_energy(EigenLabel label) { return label.positive() ? 1.0 : -1.0; }

}  // namespace berryspin
