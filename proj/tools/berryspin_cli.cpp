// berryspin: command-line front end for the two-spin Berry phase library.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure. Every
// successful run ends with one `key=value` summary line on stdout; failures
// print a single `error kind=... message="..."` line on stderr.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "berryspin/berryspin.hpp"

namespace bs = berryspin;

namespace {

struct Point {
    double g = 0.0;
    std::optional<double> theta;
    std::optional<double> theta_deg;

    bs::ModelParams params() const {
        if (theta.has_value() == theta_deg.has_value())
            throw bs::ValidationError("give exactly one of --theta (rad) and --theta-deg (degrees)");
        const double t = theta ? *theta : *theta_deg * bs::kPi / 180.0;
        return bs::ModelParams(g, t);
    }
};

void add_point_flags(CLI::App* cmd, Point& p) {
    cmd->add_option("--g", p.g, "rescaled coupling g = 2J/(alpha B0), dimensionless, >= 0")->required();
    cmd->add_option("--theta", p.theta, "polar angle of the field, radians, in (1e-3, pi-1e-3)");
    cmd->add_option("--theta-deg", p.theta_deg, "polar angle of the field, degrees (alternative to --theta)");
}

std::string num(double x) { return bs::format_real(x); }

class Summary {
public:
    explicit Summary(const std::string& command) { line_ << "command=" << command; }
    template <class T>
    Summary& add(const std::string& key, const T& value) {
        line_ << ' ' << key << '=' << value;
        return *this;
    }
    Summary& real(const std::string& key, double value) { return add(key, num(value)); }
    void print() const { std::cout << line_.str() << '\n'; }

private:
    std::ostringstream line_;
};

std::string format_state(const bs::StateVector<4>& v) {
    std::ostringstream s;
    s << "[";
    for (std::size_t i = 0; i < 4; ++i) s << (i ? ", " : "") << "(" << num(v[i].real()) << "," << num(v[i].imag()) << ")";
    s << "]";
    return s.str();
}

int run_eig(const Point& point, double phi, bool vectors) {
    const auto params = point.params();
    const auto analytic = bs::eigenvalues_analytic(params);
    const auto numeric = bs::hermitian_eig(bs::hamiltonian(params, phi), "model Hamiltonian");

    std::cout << "basis order: |eg>, |ee>, |gg>, |ge>; energies in units of alpha*B0/2\n";
    for (const auto label : bs::EigenLabel::all())
        std::cout << "E" << label.value() << " = " << num(analytic[label]) << '\n';
    std::cout << "numerical (ascending):";
    for (double e : numeric.energies) std::cout << ' ' << num(e);
    std::cout << '\n';
    if (vectors) {
        for (std::size_t k = 0; k < 4; ++k)
            std::cout << "v[" << k << "] E=" << num(numeric.energies[k]) << " " << format_state(numeric.vectors[k])
                      << '\n';
    }

    Summary s("eig");
    s.real("g", params.g()).real("theta", params.theta()).real("phi", phi);
    for (const auto label : bs::EigenLabel::all()) s.real("E" + std::to_string(label.value()), analytic[label]);
    s.real("gap", bs::spectral_gap(params));
    s.print();
    return 0;
}

int run_berry(const Point& point, int label_index, const std::string& method_tag, std::size_t n) {
    const auto params = point.params();
    const bs::EigenLabel label(label_index);
    const auto method = bs::parse_method(method_tag);
    if (method == bs::PhaseMethod::evolution) throw bs::ValidationError("use the evolve subcommand for evolution");
    const auto phase = bs::berry_phase(params, label, method, bs::LoopPath(n));

    std::cout << "label " << label.value() << (params.decoupled() ? " (decoupled g = 0 solution)" : "") << '\n'
              << "gamma = " << num(phase.value) << " rad = " << num(phase.in_units_of_pi()) << " pi\n";
    Summary("berry")
        .real("g", params.g())
        .real("theta", params.theta())
        .add("label", label.value())
        .add("method", bs::to_string(phase.method))
        .add("n", phase.grid_points)
        .add("decoupled", params.decoupled() ? 1 : 0)
        .real("gamma", phase.value)
        .real("gamma_pi", phase.in_units_of_pi())
        .print();
    return 0;
}

int run_subsystem(const Point& point, int label_index, std::size_t n) {
    const auto params = point.params();
    const bs::EigenLabel label(label_index);
    const auto report = bs::additivity_report(params, label, bs::LoopPath(n));
    const auto& sub = report.subsystems;

    std::cout << "composite gamma = " << num(report.composite.in_units_of_pi()) << " pi\n"
              << "subsystem 1 gamma = " << num(sub.gamma_sub1().in_units_of_pi()) << " pi\n"
              << "subsystem 2 gamma = " << num(sub.gamma_sub2().in_units_of_pi()) << " pi\n"
              << "sum mod 2pi = " << num(report.sum / bs::kPi) << " pi\n"
              << "schmidt weights = " << num(sub.schmidt_p()) << ", " << num(1.0 - sub.schmidt_p()) << '\n'
              << "additivity residual = " << num(report.residual) << " rad\n";
    Summary("subsystem")
        .real("g", params.g())
        .real("theta", params.theta())
        .add("label", label.value())
        .add("n", n)
        .real("gamma", report.composite.value)
        .real("gamma_sub1", sub.gamma_sub1().value)
        .real("gamma_sub2", sub.gamma_sub2().value)
        .real("gamma_sum", report.sum)
        .real("schmidt_p", sub.schmidt_p())
        .real("weight_drift", std::max(sub.first.max_weight_drift, sub.second.max_weight_drift))
        .real("additivity_residual", report.residual)
        .print();
    return 0;
}

int run_evolve(const Point& point, int label_index, double period, std::size_t steps) {
    const auto params = point.params();
    const bs::EvolutionConfig config(params, bs::EigenLabel(label_index), period, steps);
    const auto result = bs::geometric_phase_from_evolution(config);

    std::cout << "T = " << num(config.period) << ", steps = " << config.n_steps << ", h = " << num(config.step())
              << '\n'
              << "geometric phase = " << num(result.phase.value) << " rad = " << num(result.phase.in_units_of_pi())
              << " pi\n"
              << "cyclicity |<psi(0)|psi(T)>| = " << num(result.cyclicity) << '\n';
    Summary("evolve")
        .real("g", params.g())
        .real("theta", params.theta())
        .add("label", label_index)
        .real("T", config.period)
        .add("steps", config.n_steps)
        .real("gamma", result.phase.value)
        .real("gamma_pi", result.phase.in_units_of_pi())
        .real("cyclicity", result.cyclicity)
        .real("dynamical_phase", result.dynamical_phase)
        .real("norm_drift", result.max_norm_drift)
        .print();
    return 0;
}

int run_sweep(const std::string& config_path, unsigned threads) {
    const auto config = bs::load_config(config_path);
    const auto rows = bs::run_sweep(config, threads);
    if (config.output_path.empty()) {
        std::cout << bs::to_csv(rows);
    } else {
        bs::write_csv(rows, config.output_path);
        std::cout << "wrote " << rows.size() << " rows to " << config.output_path << '\n';
    }
    Summary("sweep")
        .add("rows", rows.size())
        .add("output", config.output_path.empty() ? std::string("-") : config.output_path)
        .print();
    return 0;
}

void report_error(const std::string& kind, const std::string& message) {
    std::string escaped;
    for (char ch : message) escaped += ch == '"' ? std::string("\\\"") : std::string(1, ch);
    std::cerr << "error kind=" << kind << " message=\"" << escaped << "\"\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Berry phases of two coupled spin-1/2 particles in a rotating field"};
    app.require_subcommand(1);

    Point point;
    double phi = 0.0;
    bool vectors = false;
    int label = 1;
    std::string method = "loop";
    std::size_t n_points = bs::kDefaultLoopPoints;
    double period = bs::kDefaultPeriod;
    std::size_t steps = 0;
    std::string config_path;
    unsigned threads = 0;

    auto* eig = app.add_subcommand("eig", "energies (and eigenvectors) of the Hamiltonian at one field direction");
    add_point_flags(eig, point);
    eig->add_option("--phi", phi, "field azimuth, radians (default 0)");
    eig->add_flag("--vectors", vectors, "also print the numerical eigenvectors");

    auto* berry = app.add_subcommand("berry", "Berry phase of one instantaneous eigenstate");
    add_point_flags(berry, point);
    berry->add_option("--label", label, "eigenstate label 1..4 (E1 > E3 > 0 > E4 > E2)")->required();
    berry->add_option("--method", method, "loop | closed | integral (default loop)");
    berry->add_option("--n", n_points, "loop samples in phi, count >= 16 (default 1024)");

    auto* subsystem = app.add_subcommand("subsystem", "mixed-state phases of both subsystems and additivity");
    add_point_flags(subsystem, point);
    subsystem->add_option("--label", label, "eigenstate label 1..4")->required();
    subsystem->add_option("--n", n_points, "loop samples in phi, count >= 16 (default 1024)");

    auto* evolve = app.add_subcommand("evolve", "geometric phase from explicit time evolution over one period");
    add_point_flags(evolve, point);
    evolve->add_option("--label", label, "initial eigenstate label 1..4")->required();
    evolve->add_option("--T", period, "period of the field rotation, units of 2/(alpha B0) (default 1000)");
    evolve->add_option("--steps", steps, "RK4 steps, count >= 1000 (default: step <= 5e-3)");

    auto* sweep = app.add_subcommand("sweep", "(g, theta) sweep described by a JSON config, CSV output");
    sweep->add_option("--config", config_path, "path to the JSON sweep configuration")->required();
    sweep->add_option("--threads", threads, "worker threads, 0 = hardware concurrency (default 0)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report_error("usage", e.what());
        return 1;
    }

    try {
        if (*eig) return run_eig(point, phi, vectors);
        if (*berry) return run_berry(point, label, method, n_points);
        if (*subsystem) return run_subsystem(point, label, n_points);
        if (*evolve) return run_evolve(point, label, period, steps);
        if (*sweep) return run_sweep(config_path, threads);
    } catch (const bs::ValidationError& e) {
        report_error("validation", e.what());
        return 1;
    } catch (const bs::ComputationError& e) {
        report_error(e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        report_error("runtime", e.what());
        return 2;
    }
    return 1;
}
