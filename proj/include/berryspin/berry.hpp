#pragma once

// Berry phases of the composite two-spin eigenstates around the closed field
// loop phi: 0 -> 2pi, mixed-state phases of the two reduced subsystems, and
// the additivity check between them. All phases live on [0, 2pi).

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "berryspin/errors.hpp"
#include "berryspin/linalg.hpp"
#include "berryspin/spin_model.hpp"

namespace berryspin {

enum class PhaseMethod { loop, closed_form, connection_integral, evolution };

inline std::string_view to_string(PhaseMethod m) {
    switch (m) {
        case PhaseMethod::loop: return "loop";
        case PhaseMethod::closed_form: return "closed_form";
        case PhaseMethod::connection_integral: return "connection_integral";
        case PhaseMethod::evolution: return "evolution";
    }
    return "unknown";
}

/// Accepts the long tags and the CLI short forms "closed" and "integral".
inline PhaseMethod parse_method(std::string_view tag) {
    if (tag == "loop") return PhaseMethod::loop;
    if (tag == "closed" || tag == "closed_form") return PhaseMethod::closed_form;
    if (tag == "integral" || tag == "connection_integral") return PhaseMethod::connection_integral;
    if (tag == "evolution") return PhaseMethod::evolution;
    throw ValidationError("unknown phase method '" + std::string(tag) + "' (expected loop, closed or integral)");
}

/// Reduces any finite angle to [0, 2pi).
inline double canonical_branch(double phase) {
    if (!std::isfinite(phase)) throw ValidationError("canonical_branch: non-finite phase");
    double r = std::fmod(phase, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// Shortest distance between two angles on the circle, in [0, pi].
inline double circle_distance(double a, double b) {
    const double d = canonical_branch(a - b);
    return std::min(d, kTwoPi - d);
}

struct PhaseResult {
    double value = 0.0;  // radians, [0, 2pi)
    PhaseMethod method = PhaseMethod::loop;
    std::size_t grid_points = 0;  // 0 for closed forms

    double in_units_of_pi() const { return value / kPi; }
};

inline constexpr std::size_t kDefaultLoopPoints = 1024;
inline constexpr std::size_t kSweepLoopPoints = 256;
inline constexpr std::size_t kMinLoopPoints = 16;

/// Uniform closed discretization phi_k = 2 pi k / n, k = 0..n-1; the point
/// after the last wraps to phi = 0.
class LoopPath {
public:
    explicit LoopPath(std::size_t n_points = kDefaultLoopPoints) : n_(n_points) {
        if (n_points < kMinLoopPoints)
            throw ValidationError("LoopPath: need at least " + std::to_string(kMinLoopPoints) + " points, got " +
                                  std::to_string(n_points));
    }

    std::size_t size() const { return n_; }
    double step() const { return kTwoPi / static_cast<double>(n_); }
    double phi(std::size_t k) const { return kTwoPi * static_cast<double>(k) / static_cast<double>(n_); }

private:
    std::size_t n_;
};

/// -arg prod_k <psi_k|psi_{k+1}> around the closed list (last wraps to
/// first). Independent rephasing of any sample leaves the result unchanged.
template <std::size_t N>
PhaseResult pancharatnam_loop_phase(std::span<const StateVector<N>> states,
                                    double threshold = kDefaultDegeneracyThreshold) {
    if (states.empty()) throw ValidationError("pancharatnam_loop_phase: empty state list");
    Complex product(1.0, 0.0);
    for (std::size_t k = 0; k < states.size(); ++k) {
        const Complex overlap = inner(states[k], states[(k + 1) % states.size()]);
        const double mag = std::abs(overlap);
        if (!(mag > threshold)) {
            std::ostringstream msg;
            msg << "pancharatnam_loop_phase: overlap " << mag << " between samples " << k << " and "
                << (k + 1) % states.size() << " is below " << threshold << " (grid too coarse or level crossing)";
            throw GaugeTrackingError(msg.str());
        }
        product *= overlap / mag;
        product /= std::abs(product);
    }
    return {canonical_branch(-std::arg(product)), PhaseMethod::loop, states.size()};
}

template <std::size_t N>
PhaseResult pancharatnam_loop_phase(const std::vector<StateVector<N>>& states,
                                    double threshold = kDefaultDegeneracyThreshold) {
    return pancharatnam_loop_phase(std::span<const StateVector<N>>(states), threshold);
}

// ---------------------------------------------------------------------------
// Eigenstate families along the loop.

using StatePath = std::vector<StateVector<4>>;

namespace detail {

/// Numerical eigenvectors at one azimuth, reordered into label slots by
/// matching against the closed-form energies.
inline std::array<StateVector<4>, 4> labelled_eigenvectors(const ModelParams& params, const Spectrum& spectrum,
                                                           double phi) {
    const auto eig = hermitian_eig(hamiltonian(params, phi), "model Hamiltonian");
    const double gap = spectral_gap(params);
    std::array<StateVector<4>, 4> out;
    for (const auto label : EigenLabel::all()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 4; ++i)
            if (std::abs(eig.energies[i] - spectrum[label]) < std::abs(eig.energies[best] - spectrum[label]))
                best = i;
        if (!(std::abs(eig.energies[best] - spectrum[label]) < 0.5 * gap)) {
            std::ostringstream msg;
            msg << "cannot match numerical level to label " << label.value() << " at g=" << params.g()
                << " theta=" << params.theta() << " phi=" << phi << " (gap " << gap << ")";
            throw ConsistencyError(msg.str());
        }
        out[label.slot()] = eig.vectors[best];
    }
    return out;
}

}  // namespace detail

/// Instantaneous eigenstates of every label on the loop samples. For g > 0
/// the states come from the Jacobi eigensolver; at g = 0 the decoupled
/// product states are used.
inline std::array<StatePath, 4> eigenstate_paths(const ModelParams& params, const LoopPath& path) {
    std::array<StatePath, 4> out;
    for (auto& p : out) p.reserve(path.size());
    if (params.decoupled()) {
        for (std::size_t k = 0; k < path.size(); ++k)
            for (const auto label : EigenLabel::all())
                out[label.slot()].push_back(decoupled_eigenvector(params.theta(), path.phi(k), label));
        return out;
    }
    const auto spectrum = eigenvalues_analytic(params);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto vs = detail::labelled_eigenvectors(params, spectrum, path.phi(k));
        for (std::size_t j = 0; j < 4; ++j) out[j].push_back(vs[j]);
    }
    return out;
}

inline StatePath eigenstate_path(const ModelParams& params, EigenLabel label, const LoopPath& path) {
    if (params.decoupled()) {
        StatePath out;
        out.reserve(path.size());
        for (std::size_t k = 0; k < path.size(); ++k)
            out.push_back(decoupled_eigenvector(params.theta(), path.phi(k), label));
        return out;
    }
    const auto spectrum = eigenvalues_analytic(params);
    StatePath out;
    out.reserve(path.size());
    for (std::size_t k = 0; k < path.size(); ++k)
        out.push_back(detail::labelled_eigenvectors(params, spectrum, path.phi(k))[label.slot()]);
    return out;
}

// ---------------------------------------------------------------------------
// Composite phase by three routes.

/// Discretized connection integral: the eigenstates are gauge-aligned to the
/// basis vector of their dominant component, the derivative is a fourth-order
/// periodic central difference, and i<psi|d_phi psi> is summed by the
/// (periodic) trapezoid rule.
inline PhaseResult connection_integral_phase(std::span<const StateVector<4>> states,
                                             double threshold = kDefaultDegeneracyThreshold) {
    const std::size_t n = states.size();
    if (n < kMinLoopPoints) throw ValidationError("connection_integral_phase: too few samples");
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (std::abs(states[0][i]) > std::abs(states[0][anchor])) anchor = i;
    const auto reference = StateVector<4>::basis(anchor);

    StatePath aligned;
    aligned.reserve(n);
    for (const auto& s : states) aligned.push_back(phase_align(reference, s, threshold));

    const double h = kTwoPi / static_cast<double>(n);
    double integral = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& m2 = aligned[(k + n - 2) % n];
        const auto& m1 = aligned[(k + n - 1) % n];
        const auto& p1 = aligned[(k + 1) % n];
        const auto& p2 = aligned[(k + 2) % n];
        const auto derivative = Complex(1.0 / (12.0 * h)) * (m2 - p2 + Complex(8.0) * (p1 - m1));
        // i<psi|psi'> is real for a normalized family; keep its real part.
        integral += -inner(aligned[k], derivative).imag();
    }
    return {canonical_branch(integral * h), PhaseMethod::connection_integral, n};
}

inline PhaseResult connection_integral_phase(const ModelParams& params, EigenLabel label, const LoopPath& path) {
    const auto states = eigenstate_path(params, label, path);
    return connection_integral_phase(std::span<const StateVector<4>>(states));
}

/// pi (1 + cos theta) for the upper Zeeman level, pi (1 - cos theta) for the lower.
inline PhaseResult decoupled_berry_phase(double theta, EigenLabel label) {
    const double c = std::cos(theta);
    const double value = decoupled_level(label) == ZeemanLevel::upper ? kPi * (1.0 + c) : kPi * (1.0 - c);
    return {canonical_branch(value), PhaseMethod::closed_form, 0};
}

/// Only the e^{-i phi} (|eg>) and e^{+i phi} (|ge>) components of the
/// eigenvector depend on phi, so i<psi|d_phi psi> = |a|^2 - |d|^2 at every
/// azimuth and the loop integral is 2 pi (|a|^2 - |d|^2). At g = 0 the
/// decoupled result is returned.
inline PhaseResult berry_phase_closed_form(const ModelParams& params, EigenLabel label) {
    if (params.decoupled()) return decoupled_berry_phase(params.theta(), label);
    const auto psi = eigenvector_analytic(params, 0.0, label);
    const double weight = std::norm(psi[0]) - std::norm(psi[3]);
    return {canonical_branch(kTwoPi * weight), PhaseMethod::closed_form, 0};
}

inline PhaseResult berry_phase(const ModelParams& params, EigenLabel label, PhaseMethod method,
                               const LoopPath& path = LoopPath()) {
    switch (method) {
        case PhaseMethod::loop: return pancharatnam_loop_phase(eigenstate_path(params, label, path));
        case PhaseMethod::closed_form: return berry_phase_closed_form(params, label);
        case PhaseMethod::connection_integral: return connection_integral_phase(params, label, path);
        case PhaseMethod::evolution: break;
    }
    throw ValidationError("berry_phase: the evolution method needs an evolution configuration");
}

// ---------------------------------------------------------------------------
// Mixed states of the subsystems.

inline constexpr double kDefaultWeightDriftTolerance = 1e-8;

struct MixedStatePhase {
    PhaseResult phase;
    double schmidt_p = 1.0;          // larger eigenvalue at the first sample
    double max_weight_drift = 0.0;   // max_k |p(phi_k) - p(phi_0)|
    std::array<double, 2> branch_phases{};  // per eigenvector branch, larger weight first
};

/// Eigenvalue-weighted sum of the Berry phases of the two eigenvector
/// branches of a closed path of 2x2 density matrices. Weights come from the
/// first sample and are required to stay constant along the path.
inline MixedStatePhase mixed_state_phase(std::span<const DensityMatrix<2>> path,
                                         double gap_threshold = kDefaultDegeneracyThreshold,
                                         double drift_tolerance = kDefaultWeightDriftTolerance) {
    if (path.empty()) throw ValidationError("mixed_state_phase: empty path");

    std::array<std::vector<StateVector<2>>, 2> branches;
    for (auto& b : branches) b.reserve(path.size());
    MixedStatePhase out;
    std::array<double, 2> weights{};

    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto eig = hermitian_eig(path[k].matrix(), "reduced density matrix");
        const double p_large = eig.energies[1];
        if (!(eig.energies[1] - eig.energies[0] > gap_threshold)) {
            std::ostringstream msg;
            msg << "mixed_state_phase: reduced spectrum degenerate at sample " << k << " (p = " << p_large
                << "); eigenbasis ill-defined";
            throw DegenerateSpectrumError(msg.str());
        }
        if (k == 0) {
            weights = {eig.energies[1], eig.energies[0]};
            branches[0].push_back(eig.vectors[1]);
            branches[1].push_back(eig.vectors[0]);
            continue;
        }
        const double drift = std::abs(p_large - weights[0]);
        out.max_weight_drift = std::max(out.max_weight_drift, drift);
        if (drift > drift_tolerance) {
            std::ostringstream msg;
            msg << "mixed_state_phase: reduced eigenvalue drifted by " << drift << " at sample " << k
                << " (tolerance " << drift_tolerance << ")";
            throw AdiabaticityError(msg.str());
        }
        const auto& previous = branches[0].back();
        const bool keep_order =
            std::abs(inner(previous, eig.vectors[1])) >= std::abs(inner(previous, eig.vectors[0]));
        branches[0].push_back(keep_order ? eig.vectors[1] : eig.vectors[0]);
        branches[1].push_back(keep_order ? eig.vectors[0] : eig.vectors[1]);
    }

    double total = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        out.branch_phases[j] = pancharatnam_loop_phase(branches[j]).value;
        total += weights[j] * out.branch_phases[j];
    }
    out.phase = {canonical_branch(total), PhaseMethod::loop, path.size()};
    out.schmidt_p = weights[0];
    return out;
}

inline MixedStatePhase mixed_state_phase(const std::vector<DensityMatrix<2>>& path,
                                         double gap_threshold = kDefaultDegeneracyThreshold,
                                         double drift_tolerance = kDefaultWeightDriftTolerance) {
    return mixed_state_phase(std::span<const DensityMatrix<2>>(path), gap_threshold, drift_tolerance);
}

struct SubsystemPhases {
    MixedStatePhase first;
    MixedStatePhase second;

    const PhaseResult& gamma_sub1() const { return first.phase; }
    const PhaseResult& gamma_sub2() const { return second.phase; }
    double schmidt_p() const { return first.schmidt_p; }
};

inline std::vector<DensityMatrix<2>> reduced_path(std::span<const StateVector<4>> states, Subsystem keep) {
    std::vector<DensityMatrix<2>> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(partial_trace(s, keep));
    return out;
}

inline SubsystemPhases subsystem_phases(std::span<const StateVector<4>> states) {
    return {mixed_state_phase(reduced_path(states, Subsystem::first)),
            mixed_state_phase(reduced_path(states, Subsystem::second))};
}

inline SubsystemPhases subsystem_phases(const ModelParams& params, EigenLabel label, const LoopPath& path) {
    const auto states = eigenstate_path(params, label, path);
    return subsystem_phases(std::span<const StateVector<4>>(states));
}

struct AdditivityReport {
    PhaseResult composite;
    SubsystemPhases subsystems;
    double sum = 0.0;       // (gamma_sub1 + gamma_sub2) mod 2 pi
    double residual = 0.0;  // circle distance between sum and composite
};

inline AdditivityReport additivity_report(std::span<const StateVector<4>> states) {
    AdditivityReport out;
    out.composite = pancharatnam_loop_phase(states);
    out.subsystems = subsystem_phases(states);
    out.sum = canonical_branch(out.subsystems.gamma_sub1().value + out.subsystems.gamma_sub2().value);
    out.residual = circle_distance(out.sum, out.composite.value);
    return out;
}

inline AdditivityReport additivity_report(const ModelParams& params, EigenLabel label, const LoopPath& path) {
    const auto states = eigenstate_path(params, label, path);
    return additivity_report(std::span<const StateVector<4>>(states));
}

inline double additivity_residual(const ModelParams& params, EigenLabel label, const LoopPath& path) {
    return additivity_report(params, label, path).residual;
}

}  // namespace berryspin
