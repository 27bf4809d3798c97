#pragma once

// Time evolution under the rotating-field Hamiltonian, phi(t) = 2 pi t / T,
// and extraction of the geometric phase from the evolved state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "berryspin/berry.hpp"
#include "berryspin/errors.hpp"
#include "berryspin/linalg.hpp"
#include "berryspin/spin_model.hpp"

namespace berryspin {

inline constexpr double kDefaultPeriod = 1000.0;
inline constexpr double kDefaultMaxStep = 5e-3;
inline constexpr std::size_t kMinEvolutionSteps = 1000;
inline constexpr double kNormDriftLimit = 1e-6;
inline constexpr double kMinCyclicity = 0.99;

/// Smallest step count keeping T / n <= 5e-3 (and at least 1000).
inline std::size_t default_steps(double period) {
    const auto n = static_cast<std::size_t>(std::ceil(period / kDefaultMaxStep));
    return std::max(n, kMinEvolutionSteps);
}

struct EvolutionConfig {
    double period;
    std::size_t n_steps;
    ModelParams params;
    EigenLabel label;

    EvolutionConfig(ModelParams p, EigenLabel l, double T = kDefaultPeriod, std::size_t steps = 0)
        : period(T), n_steps(steps == 0 ? default_steps(T) : steps), params(p), label(l) {
        if (!std::isfinite(T) || !(T > 0.0)) {
            std::ostringstream msg;
            msg << "EvolutionConfig: period T must be > 0, got " << T;
            throw ValidationError(msg.str());
        }
        if (n_steps < kMinEvolutionSteps)
            throw ValidationError("EvolutionConfig: need at least " + std::to_string(kMinEvolutionSteps) +
                                  " steps, got " + std::to_string(n_steps));
    }

    double step() const { return period / static_cast<double>(n_steps); }
};

struct Trajectory {
    StateVector<4> final_state;
    double dynamical_phase = 0.0;  // integral of <psi|H|psi> dt
    double max_norm_drift = 0.0;   // max_t | ||psi(t)|| - 1 |
    double energy_min = 0.0;       // range of <psi|H|psi> over step endpoints
    double energy_max = 0.0;
};

/// Classic fixed-step RK4 for i d/dt psi = H(t) psi, with the dynamical
/// phase carried as an extra ODE component through the same stages.
/// `hamiltonian_at` maps t -> HermitianMatrix<4>.
template <class HamiltonianAt>
Trajectory integrate_schrodinger(HamiltonianAt&& hamiltonian_at, const StateVector<4>& initial, double period,
                                 std::size_t n_steps) {
    const double h = period / static_cast<double>(n_steps);
    const Complex minus_i(0.0, -1.0);

    StateVector<4> psi = initial;
    const double initial_norm = initial.norm();
    Trajectory out;
    {
        const double e0 = hamiltonian_at(0.0).expectation(psi);
        out.energy_min = out.energy_max = e0;
    }

    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = h * static_cast<double>(step);
        const auto h0 = hamiltonian_at(t);
        const auto hm = hamiltonian_at(t + 0.5 * h);
        const auto h1 = hamiltonian_at(t + h);

        const auto y1 = psi;
        const auto k1 = minus_i * h0.apply(y1);
        const auto y2 = psi + Complex(0.5 * h) * k1;
        const auto k2 = minus_i * hm.apply(y2);
        const auto y3 = psi + Complex(0.5 * h) * k2;
        const auto k3 = minus_i * hm.apply(y3);
        const auto y4 = psi + Complex(h) * k3;
        const auto k4 = minus_i * h1.apply(y4);

        out.dynamical_phase += h / 6.0 *
                               (h0.expectation(y1) + 2.0 * hm.expectation(y2) + 2.0 * hm.expectation(y3) +
                                h1.expectation(y4));
        psi = psi + Complex(h / 6.0) * (k1 + Complex(2.0) * k2 + Complex(2.0) * k3 + k4);

        const double drift = std::abs(psi.norm() - initial_norm);
        out.max_norm_drift = std::max(out.max_norm_drift, drift);
        if (drift > kNormDriftLimit) {
            std::ostringstream msg;
            msg << "evolve: norm drift " << drift << " at t=" << t + h << " exceeds " << kNormDriftLimit
                << "; reduce the step (currently " << h << ")";
            throw StepSizeError(msg.str());
        }
        const double e = h1.expectation(psi);
        out.energy_min = std::min(out.energy_min, e);
        out.energy_max = std::max(out.energy_max, e);
    }
    out.final_state = psi;
    return out;
}

/// Initial state for an evolution: the labelled eigenvector at phi = 0.
inline StateVector<4> initial_eigenstate(const ModelParams& params, EigenLabel label) {
    if (params.decoupled()) return decoupled_eigenvector(params.theta(), 0.0, label);
    return eigenvector_analytic(params, 0.0, label);
}

inline double level_energy(const ModelParams& params, EigenLabel label) {
    return params.decoupled() ? decoupled_energy(label) : eigenvalues_analytic(params)[label];
}

/// Evolves the labelled eigenstate once around the field loop.
inline Trajectory evolve(const EvolutionConfig& config, const StateVector<4>& initial) {
    const double omega = kTwoPi / config.period;
    return integrate_schrodinger([&](double t) { return hamiltonian(config.params, omega * t); }, initial,
                                 config.period, config.n_steps);
}

inline Trajectory evolve(const EvolutionConfig& config) {
    return evolve(config, initial_eigenstate(config.params, config.label));
}

struct EvolutionPhase {
    PhaseResult phase;
    double cyclicity = 0.0;  // |<psi(0)|psi(T)>|
    double dynamical_phase = 0.0;
    double max_norm_drift = 0.0;
    double max_energy_deviation = 0.0;  // max_t |<H> - E_label|
};

/// arg<psi(0)|psi(T)> + integral <H> dt, reduced to [0, 2pi). Throws
/// AdiabaticityError when |<psi(0)|psi(T)>| <= 0.99.
inline EvolutionPhase geometric_phase_from_evolution(const EvolutionConfig& config, const StateVector<4>& initial) {
    const auto traj = evolve(config, initial);
    const Complex overlap = inner(initial, traj.final_state);
    EvolutionPhase out;
    out.cyclicity = std::abs(overlap);
    out.dynamical_phase = traj.dynamical_phase;
    out.max_norm_drift = traj.max_norm_drift;
    const double energy = level_energy(config.params, config.label);
    out.max_energy_deviation = std::max(std::abs(traj.energy_max - energy), std::abs(traj.energy_min - energy));
    if (!(out.cyclicity > kMinCyclicity)) {
        std::ostringstream msg;
        msg << "geometric_phase_from_evolution: cyclicity |<psi(0)|psi(T)>| = " << out.cyclicity
            << " <= " << kMinCyclicity << " at T=" << config.period << "; evolution not adiabatic enough";
        throw AdiabaticityError(msg.str());
    }
    out.phase = {canonical_branch(std::arg(overlap) + traj.dynamical_phase), PhaseMethod::evolution,
                 config.n_steps};
    return out;
}

inline EvolutionPhase geometric_phase_from_evolution(const EvolutionConfig& config) {
    return geometric_phase_from_evolution(config, initial_eigenstate(config.params, config.label));
}

}  // namespace berryspin
