#pragma once

// (g, theta) parameter sweeps of the Berry phases, CSV export and JSON run
// configuration.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "berryspin/berry.hpp"
#include "berryspin/errors.hpp"
#include "berryspin/spin_model.hpp"

namespace berryspin {

enum class PhaseUnit { pi, radians };

struct SweepConfig {
    double g_min = 0.0;
    double g_max = 0.0;
    std::size_t g_steps = 1;
    double theta_min = kPi / 4;
    double theta_max = kPi / 4;
    std::size_t theta_steps = 1;
    std::vector<int> labels{1, 2, 3, 4};
    std::size_t n_points = kSweepLoopPoints;
    PhaseMethod method = PhaseMethod::loop;
    bool include_subsystems = false;
    bool radians = false;
    std::string output_path;  // empty: caller decides (the CLI prints to stdout)

    /// Throws ValidationError naming the offending field.
    void validate() const {
        auto fail = [](const std::string& key, const std::string& why) {
            throw ValidationError("sweep config: '" + key + "' " + why);
        };
        auto check_axis = [&](const char* min_key, double lo, const char* max_key, double hi, const char* steps_key,
                              std::size_t steps) {
            if (!std::isfinite(lo)) fail(min_key, "must be finite");
            if (!std::isfinite(hi)) fail(max_key, "must be finite");
            if (hi < lo) fail(max_key, "must be >= " + std::string(min_key));
            if (steps == 0) fail(steps_key, "must be >= 1");
            if (steps == 1 && hi != lo) fail(steps_key, "must be >= 2 for a swept axis");
        };
        check_axis("g_min", g_min, "g_max", g_max, "g_steps", g_steps);
        check_axis("theta_min", theta_min, "theta_max", theta_max, "theta_steps", theta_steps);
        if (g_min < 0.0) fail("g_min", "must be >= 0");
        if (!(theta_min > kDefaultThetaMargin)) fail("theta_min", "must exceed the pole margin 1e-3 rad");
        if (!(theta_max < kPi - kDefaultThetaMargin)) fail("theta_max", "must stay below pi - 1e-3 rad");
        if (labels.empty()) fail("labels", "must name at least one level");
        std::set<int> seen;
        for (int j : labels) {
            if (j < 1 || j > 4) fail("labels", "entries must be 1..4");
            if (!seen.insert(j).second) fail("labels", "entries must be unique");
        }
        if (n_points < kMinLoopPoints) fail("n_points", "must be >= " + std::to_string(kMinLoopPoints));
        if (method == PhaseMethod::evolution) fail("method", "must be loop, closed or integral");
    }

    std::vector<double> g_grid() const { return grid(g_min, g_max, g_steps); }
    std::vector<double> theta_grid() const { return grid(theta_min, theta_max, theta_steps); }

    std::vector<EigenLabel> sorted_labels() const {
        std::vector<int> l = labels;
        std::sort(l.begin(), l.end());
        std::vector<EigenLabel> out;
        for (int j : l) out.emplace_back(j);
        return out;
    }

private:
    static std::vector<double> grid(double lo, double hi, std::size_t steps) {
        if (steps == 1) return {lo};
        std::vector<double> out(steps);
        for (std::size_t i = 0; i < steps; ++i)
            out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
        out.back() = hi;
        return out;
    }
};

struct SubsystemColumns {
    double gamma_sub1 = 0.0;
    double gamma_sub2 = 0.0;
    double gamma_sum = 0.0;
    double add_residual = 0.0;
};

struct LabelColumns {
    EigenLabel label{1};
    double gamma = 0.0;
    std::optional<SubsystemColumns> subsystems;
};

/// One (g, theta) point. Phase columns are expressed in `unit`.
struct SweepRow {
    double g = 0.0;
    double theta = 0.0;
    PhaseUnit unit = PhaseUnit::pi;
    std::vector<LabelColumns> levels;
};

/// Evaluates every level of one grid point.
inline SweepRow evaluate_point(const SweepConfig& config, double g, double theta) {
    const ModelParams params(g, theta);
    const LoopPath path(config.n_points);
    const double scale = config.radians ? 1.0 : 1.0 / kPi;

    SweepRow row{g, theta, config.radians ? PhaseUnit::radians : PhaseUnit::pi, {}};
    std::optional<std::array<StatePath, 4>> states;
    if (config.method == PhaseMethod::loop || config.include_subsystems) states = eigenstate_paths(params, path);

    for (const auto label : config.sorted_labels()) {
        LabelColumns col{label, 0.0, std::nullopt};
        PhaseResult phase;
        switch (config.method) {
            case PhaseMethod::loop: phase = pancharatnam_loop_phase((*states)[label.slot()]); break;
            case PhaseMethod::closed_form: phase = berry_phase_closed_form(params, label); break;
            default: phase = connection_integral_phase(params, label, path); break;
        }
        col.gamma = phase.value * scale;
        if (config.include_subsystems) {
            const auto report = additivity_report(std::span<const StateVector<4>>((*states)[label.slot()]));
            col.subsystems = SubsystemColumns{report.subsystems.gamma_sub1().value * scale,
                                              report.subsystems.gamma_sub2().value * scale, report.sum * scale,
                                              report.residual * scale};
        }
        row.levels.push_back(col);
    }
    return row;
}

/// Rows in g-major, theta-minor order. Points are evaluated on up to
/// `threads` workers; the result does not depend on the thread count. The
/// first failing point (in row order) is rethrown with its coordinates.
inline std::vector<SweepRow> run_sweep(const SweepConfig& config, unsigned threads = 0) {
    config.validate();
    const auto gs = config.g_grid();
    const auto thetas = config.theta_grid();
    const std::size_t total = gs.size() * thetas.size();

    std::vector<SweepRow> rows(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                rows[i] = evaluate_point(config, gs[i / thetas.size()], thetas[i % thetas.size()]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    for (std::size_t i = 0; i < total; ++i) {
        if (!errors[i]) continue;
        std::ostringstream where;
        where << "sweep point g=" << gs[i / thetas.size()] << " theta=" << thetas[i % thetas.size()] << ": ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ComputationError& e) {
            throw ComputationError(e.kind(), where.str() + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(where.str() + e.what());
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::vector<std::string> csv_header(const SweepRow& row) {
    std::vector<std::string> cols{"g", "theta"};
    for (const auto& l : row.levels) cols.push_back("gamma_" + std::to_string(l.label.value()));
    for (const auto& l : row.levels) {
        if (!l.subsystems) continue;
        const auto j = std::to_string(l.label.value());
        for (const char* name : {"gamma_sub1_l", "gamma_sub2_l", "gamma_sum_l", "add_residual_l"})
            cols.push_back(name + j);
    }
    return cols;
}

inline std::vector<double> csv_fields(const SweepRow& row) {
    std::vector<double> f{row.g, row.theta};
    for (const auto& l : row.levels) f.push_back(l.gamma);
    for (const auto& l : row.levels) {
        if (!l.subsystems) continue;
        const auto& s = *l.subsystems;
        f.insert(f.end(), {s.gamma_sub1, s.gamma_sub2, s.gamma_sum, s.add_residual});
    }
    return f;
}

/// Header plus one LF-terminated line per row, reals with 12 significant digits.
inline std::string to_csv(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw ValidationError("write_csv: no rows");
    const auto header = csv_header(rows.front());
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        if (csv_header(row) != header) throw ValidationError("write_csv: rows have differing column layouts");
        const auto fields = csv_fields(row);
        for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + format_real(fields[i]);
        out += '\n';
    }
    return out;
}

inline void write_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    const auto text = to_csv(rows);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write_csv: write to '" + path + "' failed");
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ValidationError("csv: no column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_csv: cannot open '" + path + "'");
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        return cells;
    };
    CsvTable table;
    std::string line;
    if (!std::getline(f, line)) throw ValidationError("read_csv: '" + path + "' is empty");
    table.header = split(line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> values;
        for (const auto& cell : split(line)) values.push_back(std::stod(cell));
        if (values.size() != table.header.size())
            throw ValidationError("read_csv: ragged row in '" + path + "'");
        table.rows.push_back(std::move(values));
    }
    return table;
}

// ---------------------------------------------------------------------------
// JSON configuration

/// Parses a flat JSON object whose keys are the SweepConfig field names.
/// Unknown keys are rejected; n_points, method, include_subsystems, labels,
/// radians and output_path are optional.
inline SweepConfig parse_config(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("sweep config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("sweep config: top level must be a JSON object");

    static const std::set<std::string> known{"g_min",     "g_max",   "g_steps", "theta_min",          "theta_max",
                                             "theta_steps", "labels", "n_points", "method", "include_subsystems",
                                             "radians",   "output_path"};
    for (const auto& [key, value] : doc.items())
        if (!known.contains(key)) throw ValidationError("sweep config: unknown key '" + key + "'");

    auto require = [&](const char* key) -> const json& {
        if (!doc.contains(key)) throw ValidationError(std::string("sweep config: missing key '") + key + "'");
        return doc.at(key);
    };
    auto as_real = [](const json& v, const char* key) {
        if (!v.is_number()) throw ValidationError(std::string("sweep config: '") + key + "' must be a number");
        return v.get<double>();
    };
    auto as_count = [](const json& v, const char* key) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ValidationError(std::string("sweep config: '") + key + "' must be a non-negative integer");
        return static_cast<std::size_t>(v.get<long long>());
    };
    auto as_bool = [](const json& v, const char* key) {
        if (!v.is_boolean()) throw ValidationError(std::string("sweep config: '") + key + "' must be true or false");
        return v.get<bool>();
    };

    SweepConfig c;
    c.g_min = as_real(require("g_min"), "g_min");
    c.g_max = as_real(require("g_max"), "g_max");
    c.g_steps = as_count(require("g_steps"), "g_steps");
    c.theta_min = as_real(require("theta_min"), "theta_min");
    c.theta_max = as_real(require("theta_max"), "theta_max");
    c.theta_steps = as_count(require("theta_steps"), "theta_steps");
    if (doc.contains("labels")) {
        const auto& l = doc.at("labels");
        if (!l.is_array()) throw ValidationError("sweep config: 'labels' must be an array of integers");
        c.labels.clear();
        for (const auto& v : l) {
            if (!v.is_number_integer()) throw ValidationError("sweep config: 'labels' must be an array of integers");
            c.labels.push_back(v.get<int>());
        }
    }
    if (doc.contains("n_points")) c.n_points = as_count(doc.at("n_points"), "n_points");
    if (doc.contains("method")) {
        const auto& m = doc.at("method");
        if (!m.is_string()) throw ValidationError("sweep config: 'method' must be a string");
        try {
            c.method = parse_method(m.get<std::string>());
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("sweep config: 'method': ") + e.what());
        }
    }
    if (doc.contains("include_subsystems"))
        c.include_subsystems = as_bool(doc.at("include_subsystems"), "include_subsystems");
    if (doc.contains("radians")) c.radians = as_bool(doc.at("radians"), "radians");
    if (doc.contains("output_path")) {
        const auto& p = doc.at("output_path");
        if (!p.is_string()) throw ValidationError("sweep config: 'output_path' must be a string");
        c.output_path = p.get<std::string>();
    }
    c.validate();
    return c;
}

inline SweepConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("sweep config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << f.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace berryspin
