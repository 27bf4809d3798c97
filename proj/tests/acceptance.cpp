// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "berryspin/berryspin.hpp"
#include "oracles.hpp"

using namespace berryspin;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::vector<double> kGridG{0.25, 0.5, 1.0, 2.0, 4.0};

std::vector<double> grid_theta() {
    std::vector<double> t;
    for (int k = 1; k <= 9; ++k) t.push_back(0.3 * k);
    return t;
}

double expected_decoupled(double theta, EigenLabel label) {
    return kPi * (1.0 + (label.positive() ? 1.0 : -1.0) * std::cos(theta));
}

void criterion1() {
    const std::vector<double> thetas{kPi / 6, kPi / 4, kPi / 3, kPi / 2, 2 * kPi / 3};
    double closed_err = 0.0, loop_err = 0.0, g0_loop_err = 0.0;
    for (double theta : thetas)
        for (const auto label : EigenLabel::all()) {
            const double want = expected_decoupled(theta, label);
            closed_err = std::max(closed_err, circle_distance(decoupled_berry_phase(theta, label).value, want));
            const auto g0 = eigenstate_path(ModelParams(0.0, theta), label, LoopPath(2048));
            g0_loop_err = std::max(g0_loop_err, circle_distance(pancharatnam_loop_phase(g0).value, want));
            const auto states = eigenstate_path(ModelParams(1e-6, theta), label, LoopPath(2048));
            loop_err = std::max(loop_err, circle_distance(pancharatnam_loop_phase(states).value, want));
        }
    report(1, closed_err <= 1e-12 && loop_err <= 1e-4,
           fmt("decoupled closed form max err %.3g rad (<= 1e-12); loop at g=1e-6, n=2048 max err %.6g rad "
               "(<= 1e-4); [info] loop at g=0 max err %.3g rad",
               closed_err, loop_err, g0_loop_err));
}

void criterion2() {
    const double theta = kPi / 4;
    const LoopPath path(2048);
    const auto small = eigenstate_paths(ModelParams(1e-4, theta), path);
    double small_err = 0.0;
    for (const auto label : EigenLabel::all())
        small_err = std::max(small_err, circle_distance(pancharatnam_loop_phase(small[label.slot()]).value,
                                                        expected_decoupled(theta, label)));
    auto large_err = [&](double g) {
        const auto states = eigenstate_paths(ModelParams(g, theta), path);
        double e = 0.0;
        for (const auto& s : states) e = std::max(e, circle_distance(pancharatnam_loop_phase(s).value, 0.0));
        return e;
    };
    const double e20 = large_err(20.0), e50 = large_err(50.0);
    report(2, small_err <= 1e-3 * kPi && e20 <= 0.15 * kPi && e50 <= 0.05 * kPi,
           fmt("g=1e-4 max dist to (1+-0.707)pi %.6g pi (<= 1e-3); g=20 max dist to 0 %.4g pi (<= 0.15); "
               "g=50 %.4g pi (<= 0.05)",
               small_err / kPi, e20 / kPi, e50 / kPi));
}

void criterion3() {
    double worst = 0.0;
    for (double g : kGridG)
        for (double theta : grid_theta()) {
            const ModelParams p(g, theta), q(g, kPi - theta);
            worst = std::max(worst, circle_distance(berry_phase_closed_form(p, EigenLabel(1)).value,
                                                    berry_phase_closed_form(q, EigenLabel(2)).value));
            worst = std::max(worst, circle_distance(berry_phase_closed_form(p, EigenLabel(3)).value,
                                                    berry_phase_closed_form(q, EigenLabel(4)).value));
        }
    report(3, worst <= 1e-8, fmt("max |gamma_1(theta) - gamma_2(pi-theta)|, |gamma_3 - gamma_4| = %.3g rad (<= 1e-8)",
                                 worst));
}

void criterion4() {
    double worst = 0.0;
    const LoopPath path(2048);
    for (double g : kGridG)
        for (double theta : grid_theta()) {
            const auto states = eigenstate_paths(ModelParams(g, theta), path);
            for (const auto& s : states)
                worst = std::max(worst, additivity_report(std::span<const StateVector<4>>(s)).residual);
        }
    report(4, worst <= 1e-4, fmt("max additivity residual at n=2048 = %.3g rad (<= 1e-4)", worst));
}

void criterion5() {
    double loop_closed = 0.0, loop_integral = 0.0;
    const LoopPath path(2048);
    for (double g : kGridG)
        for (double theta : grid_theta()) {
            const ModelParams p(g, theta);
            const auto states = eigenstate_paths(p, path);
            for (const auto label : EigenLabel::all()) {
                const double loop = pancharatnam_loop_phase(states[label.slot()]).value;
                loop_closed = std::max(loop_closed, circle_distance(loop, berry_phase_closed_form(p, label).value));
                loop_integral = std::max(
                    loop_integral,
                    circle_distance(loop, connection_integral_phase(std::span<const StateVector<4>>(states[label.slot()]))
                                              .value));
            }
        }

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    auto states = eigenstate_path(ModelParams(1.0, kPi / 4), EigenLabel(3), path);
    const double reference = pancharatnam_loop_phase(states).value;
    double rephase = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        auto r = states;
        for (auto& s : r) s = s * std::polar(1.0, angle(rng));
        rephase = std::max(rephase, circle_distance(pancharatnam_loop_phase(r).value, reference));
    }
    report(5, loop_closed <= 1e-6 && loop_integral <= 1e-6 && rephase <= 1e-12,
           fmt("n=2048 max |loop-closed| %.3g rad, max |loop-integral| %.3g rad (<= 1e-6); rephasing %.3g rad "
               "(<= 1e-12)",
               loop_closed, loop_integral, rephase));
}

void criterion6() {
    double vs_jacobi = 0.0, poly = 0.0;
    for (double g : kGridG)
        for (double theta : grid_theta()) {
            const ModelParams p(g, theta);
            auto analytic = eigenvalues_analytic(p).energies;
            for (double e : analytic) poly = std::max(poly, std::abs(oracle::quartic(g, theta, e)));
            std::sort(analytic.begin(), analytic.end());
            for (double phi : {0.0, 1.0, kTwoPi - 0.1}) {
                const auto numeric = hermitian_eig(hamiltonian(p, phi));
                for (std::size_t k = 0; k < 4; ++k)
                    vs_jacobi = std::max(vs_jacobi, std::abs(numeric.energies[k] - analytic[k]));
            }
        }
    report(6, vs_jacobi <= 1e-10 && poly <= 1e-10,
           fmt("max |analytic - Jacobi| %.3g (<= 1e-10); max |quartic(E)| %.3g (<= 1e-10)", vs_jacobi, poly));
}

void criterion7() {
    double drift = 0.0;
    const LoopPath path(256);
    for (double g : kGridG)
        for (double theta : grid_theta()) {
            const auto states = eigenstate_paths(ModelParams(g, theta), path);
            for (const auto& s : states)
                for (auto keep : {Subsystem::first, Subsystem::second}) {
                    const auto ref = partial_trace(s.front(), keep).eigenvalues();
                    for (const auto& psi : s) {
                        const auto ev = partial_trace(psi, keep).eigenvalues();
                        for (std::size_t i = 0; i < 2; ++i) drift = std::max(drift, std::abs(ev[i] - ref[i]));
                    }
                }
        }
    report(7, drift <= 1e-10, fmt("max phi-drift of reduced eigenvalues %.3g (<= 1e-10)", drift));
}

void criterion8() {
    const ModelParams p(1.0, kPi / 4);
    const double loop = pancharatnam_loop_phase(eigenstate_path(p, EigenLabel(1), LoopPath(2048))).value;
    const auto r1000 = geometric_phase_from_evolution(EvolutionConfig(p, EigenLabel(1), 1000.0));
    const auto r250 = geometric_phase_from_evolution(EvolutionConfig(p, EigenLabel(1), 250.0));
    const double e1000 = circle_distance(r1000.phase.value, loop);
    const double e250 = circle_distance(r250.phase.value, loop);
    report(8, e1000 <= 1e-2 && e1000 < e250 && r1000.cyclicity >= 0.999,
           fmt("|evolution - loop| at T=1000 %.4g rad (<= 1e-2), at T=250 %.4g rad (must exceed T=1000); "
               "cyclicity %.8f (>= 0.999)",
               e1000, e250, r1000.cyclicity));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    for (auto* c : {criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8}) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion: exception %s\n", e.what());
            ++failures;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 8 criteria failed (%.1f s)\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
