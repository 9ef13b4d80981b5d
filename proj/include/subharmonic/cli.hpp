#ifndef SUBHARMONIC_CLI_HPP
#define SUBHARMONIC_CLI_HPP

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subharmonic/closed_form.hpp"
#include "subharmonic/model.hpp"
#include "subharmonic/oracles/verification.hpp"
#include "subharmonic/qfunc.hpp"
#include "subharmonic/squeezing.hpp"

namespace subharmonic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRegime = 3;

/// Relative --output paths are resolved against this directory when set.
inline constexpr const char* kOutputDirEnv = "SUBHARMONIC_OUTPUT_DIR";

enum class Command { moments, photon_dist, squeezing, spectrum, local_squeezing, pump, verify, sweep };
enum class Format { json, csv };
enum class GridScale { linear, log };

struct Grid {
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<int> points;
    std::optional<GridScale> scale;
};

struct RunConfig {
    Command command = Command::moments;
    std::optional<Command> sweep_quantity;
    std::optional<double> kappa;
    std::optional<double> epsilon;
    std::optional<double> mu;
    std::optional<double> g;
    std::optional<double> half_width;
    double offset = 0.0;
    std::optional<unsigned> max_n;
    Grid grid;
    std::optional<std::string> output;
    Format format = Format::json;
    std::uint64_t seed = oracles::VerifyOptions{}.seed;
    std::uint64_t samples = oracles::VerifyOptions{}.samples;
    bool skip_fock = false;
    bool cavity_analogue_minus = false;
};

class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline const std::map<std::string, Command>& command_names() {
    static const std::map<std::string, Command> names{
        {"moments", Command::moments},     {"photon-dist", Command::photon_dist},
        {"squeezing", Command::squeezing}, {"spectrum", Command::spectrum},
        {"local-squeezing", Command::local_squeezing}, {"pump", Command::pump},
        {"verify", Command::verify},       {"sweep", Command::sweep}};
    return names;
}

inline std::string command_name(Command c) {
    for (const auto& [name, value] : command_names())
        if (value == c) return name;
    return "?";
}

/// %.9g, the fixed CSV number rendering.
inline std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& x) { return x ? fmt_num(*x) : std::string(); }

namespace detail {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const {
        std::ostringstream os;
        auto line = [&os](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
            os << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return os.str();
    }
};

inline nlohmann::json opt_json(const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(); }

/// Rendered output of one command: JSON document plus its CSV table.
struct Output {
    nlohmann::json json;
    Table table;
};

inline ModelParams params_from(const RunConfig& c, std::optional<double> epsilon_override = std::nullopt) {
    if (!c.kappa) throw usage_error("--kappa is required");
    if (epsilon_override) return ModelParams::from_epsilon(*c.kappa, *epsilon_override);
    const bool has_eps = c.epsilon.has_value();
    const bool has_pump = c.mu.has_value() || c.g.has_value();
    if (has_eps == has_pump) throw usage_error("give exactly one of --epsilon or (--mu and --g)");
    if (has_pump) {
        if (!c.mu || !c.g) throw usage_error("--mu and --g must be given together");
        return ModelParams::from_pump(*c.kappa, *c.mu, *c.g);
    }
    return ModelParams::from_epsilon(*c.kappa, *c.epsilon);
}

inline nlohmann::json params_json(const ModelParams& p) {
    nlohmann::json j{{"kappa", p.kappa()}, {"epsilon", p.epsilon()}};
    if (p.pump()) {
        j["mu"] = p.pump()->mu;
        j["g"] = p.pump()->g;
    }
    const auto r = validate_regime(p);
    j["regime"] = to_string(r.regime);
    j["margin"] = r.margin;
    return j;
}

inline Output moments_output(const ModelParams& p) {
    const auto m = steady_moments(p);
    const auto s = photon_statistics(p);
    const double conv = conventional_mean_photon_number(p);
    Output o;
    o.json = {{"n1", m.n1},
              {"n2", m.n2},
              {"cross", m.cross},
              {"first_moments_zero", m.first_moments_zero},
              {"vanishing_moments_zero", m.vanishing_moments_zero},
              {"mean_photon_number", s.mean},
              {"photon_number_variance", s.variance},
              {"fano", opt_json(s.fano)},
              {"conventional_mean_photon_number", conv}};
    o.table.header = {"n1", "n2", "cross", "mean_photon_number", "photon_number_variance", "fano",
                      "conventional_mean_photon_number"};
    o.table.rows.push_back({fmt_num(m.n1), fmt_num(m.n2), fmt_num(m.cross), fmt_num(s.mean), fmt_num(s.variance),
                            fmt_opt(s.fano), fmt_num(conv)});
    return o;
}

inline Output photon_dist_output(const ModelParams& p, std::optional<unsigned> max_n) {
    const auto q = q_params(p);
    const unsigned n = max_n ? *max_n : adaptive_cutoff(q);
    const auto table = joint_distribution_table(q, n);
    Output o;
    nlohmann::json probs = nlohmann::json::array();
    nlohmann::json diag = nlohmann::json::array();
    o.table.header = {"m", "n", "probability"};
    for (unsigned i = 0; i <= n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (unsigned j = 0; j <= n; ++j) {
            const double pij = table[i * (n + 1) + j];
            row.push_back(pij);
            o.table.rows.push_back({std::to_string(i), std::to_string(j), fmt_num(pij)});
        }
        probs.push_back(row);
        diag.push_back(table[i * (n + 1) + i]);
    }
    o.json = {{"cutoff", n}, {"a_coef", q.a_coef}, {"b_coef", q.b_coef}, {"u", q.u}, {"v", q.v},
              {"probabilities", probs}, {"diagonal", diag}};
    return o;
}

inline Output squeezing_output(const ModelParams& p, bool cavity_analogue) {
    const auto r = squeezing_report(p, cavity_analogue ? OutputMinusForm::cavity_analogue : OutputMinusForm::sum_denominator);
    Output o;
    o.json = {{"var_plus", r.var_plus},
              {"var_minus", opt_json(r.var_minus)},
              {"s_global", r.s_global},
              {"var_plus_out", opt_json(r.var_plus_out)},
              {"var_minus_out", opt_json(r.var_minus_out)},
              {"s_out", opt_json(r.s_out)},
              {"vacuum_level", r.vacuum_level},
              {"output_minus_form", cavity_analogue ? "cavity_analogue" : "sum_denominator"}};
    o.table.header = {"var_plus", "var_minus", "s_global", "var_plus_out", "var_minus_out", "s_out", "vacuum_level"};
    o.table.rows.push_back({fmt_num(r.var_plus), fmt_opt(r.var_minus), fmt_num(r.s_global), fmt_opt(r.var_plus_out),
                            fmt_opt(r.var_minus_out), fmt_opt(r.s_out), fmt_num(r.vacuum_level)});
    return o;
}

inline Output spectrum_output(const ModelParams& p, double offset) {
    const auto w = spectrum_window(p, 0.0);
    const double s = spectrum_plus(p, offset);
    Output o;
    o.json = {{"offset", offset}, {"spectral_density", s}, {"eta_plus", w.eta_plus}, {"eta_minus", w.eta_minus}};
    o.table.header = {"offset", "spectral_density"};
    o.table.rows.push_back({fmt_num(offset), fmt_num(s)});
    return o;
}

inline Output local_squeezing_output(const ModelParams& p, double half_width) {
    const double s = local_squeezing(p, half_width);
    const double g = global_squeezing(p);
    Output o;
    o.json = {{"half_width", half_width},
              {"s_local", s},
              {"var_local", local_variance_plus(p, half_width)},
              {"s_global_reference", g}};
    o.table.header = {"half_width", "s_local", "s_global_reference"};
    o.table.rows.push_back({fmt_num(half_width), fmt_num(s), fmt_num(g)});
    return o;
}

inline Output pump_output(const ModelParams& p) {
    if (!p.pump()) throw usage_error("pump needs --mu and --g");
    const auto r = pump_mean_photon_number(p);
    Output o;
    o.json = {{"pump_mean_photon_number", r.value}, {"depletion_warning", r.depletion_warning}};
    o.table.header = {"pump_mean_photon_number", "depletion_warning"};
    o.table.rows.push_back({fmt_num(r.value), r.depletion_warning ? "true" : "false"});
    return o;
}

inline std::vector<double> make_grid(double start, double stop, int points, GridScale scale) {
    if (points < 2) throw usage_error("sweep grids need at least 2 points");
    if (scale == GridScale::log && !(start > 0.0 && stop > 0.0)) {
        throw usage_error("log-scaled grids need positive bounds");
    }
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        g[i] = scale == GridScale::log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                                       : start + t * (stop - start);
    }
    g.front() = start;
    g.back() = stop;
    return g;
}

inline Output sweep_output(const RunConfig& c) {
    if (!c.sweep_quantity) throw usage_error("sweep needs a quantity: local-squeezing, spectrum, squeezing or moments");
    if (!c.kappa) throw usage_error("--kappa is required");
    const double k = *c.kappa;
    Output o;
    nlohmann::json rows = nlohmann::json::array();

    auto grid_for = [&](double start, double stop, int points, GridScale scale) {
        return make_grid(c.grid.start.value_or(start), c.grid.stop.value_or(stop), c.grid.points.value_or(points),
                         c.grid.scale.value_or(scale));
    };

    switch (*c.sweep_quantity) {
        case Command::local_squeezing: {
            const auto p = params_from(c);
            o.table.header = {"half_width", "s_local", "s_global_reference"};
            const double g = global_squeezing(p);
            for (double h : grid_for(0.05, 10.0, 200, GridScale::log)) {
                const double s = local_squeezing(p, h);
                o.table.rows.push_back({fmt_num(h), fmt_num(s), fmt_num(g)});
                rows.push_back({{"half_width", h}, {"s_local", s}, {"s_global_reference", g}});
            }
            break;
        }
        case Command::spectrum: {
            const auto p = params_from(c);
            o.table.header = {"offset", "spectral_density"};
            for (double w : grid_for(-2.0 * k, 2.0 * k, 201, GridScale::linear)) {
                const double s = spectrum_plus(p, w);
                o.table.rows.push_back({fmt_num(w), fmt_num(s)});
                rows.push_back({{"offset", w}, {"spectral_density", s}});
            }
            break;
        }
        case Command::squeezing: {
            o.table.header = {"epsilon", "var_plus", "var_minus", "s_global", "s_out"};
            for (double e : grid_for(0.0, 0.5 * k, 51, GridScale::linear)) {
                const auto p = params_from(c, e);
                const auto r = squeezing_report(p);
                o.table.rows.push_back(
                    {fmt_num(e), fmt_num(r.var_plus), fmt_opt(r.var_minus), fmt_num(r.s_global), fmt_opt(r.s_out)});
                rows.push_back({{"epsilon", e},
                                {"var_plus", r.var_plus},
                                {"var_minus", opt_json(r.var_minus)},
                                {"s_global", r.s_global},
                                {"s_out", opt_json(r.s_out)}});
            }
            break;
        }
        case Command::moments: {
            o.table.header = {"epsilon", "n1", "cross", "mean_photon_number", "photon_number_variance"};
            for (double e : grid_for(0.0, 0.45 * k, 46, GridScale::linear)) {
                const auto p = params_from(c, e);
                const auto m = steady_moments(p);
                const auto s = photon_statistics(p);
                o.table.rows.push_back(
                    {fmt_num(e), fmt_num(m.n1), fmt_num(m.cross), fmt_num(s.mean), fmt_num(s.variance)});
                rows.push_back({{"epsilon", e},
                                {"n1", m.n1},
                                {"cross", m.cross},
                                {"mean_photon_number", s.mean},
                                {"photon_number_variance", s.variance}});
            }
            break;
        }
        default:
            throw usage_error("sweep supports local-squeezing, spectrum, squeezing and moments");
    }
    o.json = {{"quantity", command_name(*c.sweep_quantity)}, {"rows", rows}};
    return o;
}

inline std::string render(const RunConfig& c, const Output& o, const nlohmann::json& header) {
    if (c.format == Format::csv) return o.table.csv();
    nlohmann::json doc = header;
    doc["results"] = o.json;
    return doc.dump(2) + "\n";
}

inline void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
    if (!c.output) {
        out << text;
        return;
    }
    std::filesystem::path path(*c.output);
    if (path.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) path = std::filesystem::path(dir) / path;
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path.string());
    f << text;
}

}  // namespace detail

/// Executes one command. Returns the process exit status.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        nlohmann::json header{{"command", command_name(c.command)}};
        detail::Output o;
        if (c.command == Command::verify) {
            oracles::VerifyOptions vo;
            vo.include_fock = !c.skip_fock;
            vo.seed = c.seed;
            vo.samples = c.samples;
            const auto checks = oracles::run_verification(vo);
            o.json = oracles::verification_report(checks);
            o.table.header = {"name", "computed", "expected", "tolerance", "pass"};
            for (const auto& ch : checks) {
                o.table.rows.push_back({"\"" + ch.name + "\"", fmt_num(ch.computed), fmt_num(ch.expected),
                                        fmt_num(ch.tolerance), ch.passed ? "true" : "false"});
            }
            detail::emit(c, detail::render(c, o, header), out);
            if (!oracles::all_passed(checks)) {
                err << "verification failed\n";
                return kExitVerifyFailed;
            }
            return kExitOk;
        }
        if (c.command == Command::sweep) {
            o = detail::sweep_output(c);
            if (c.kappa) header["kappa"] = *c.kappa;
        } else {
            const auto p = detail::params_from(c);
            header["params"] = detail::params_json(p);
            switch (c.command) {
                case Command::moments: o = detail::moments_output(p); break;
                case Command::photon_dist: o = detail::photon_dist_output(p, c.max_n); break;
                case Command::squeezing: o = detail::squeezing_output(p, c.cavity_analogue_minus); break;
                case Command::spectrum: o = detail::spectrum_output(p, c.offset); break;
                case Command::local_squeezing:
                    if (!c.half_width) throw usage_error("local-squeezing needs --half-width");
                    o = detail::local_squeezing_output(p, *c.half_width);
                    break;
                case Command::pump: o = detail::pump_output(p); break;
                default: break;
            }
        }
        detail::emit(c, detail::render(c, o, header), out);
        return kExitOk;
    } catch (const regime_error& e) {
        err << "regime error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const invalid_parameter& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitUsage;
    } catch (const indeterminate_error& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitVerifyFailed;
    }
}

/// Parses argv into a RunConfig. Flags override values from --config.
/// Returns the exit status instead when parsing ends the program (help, errors).
inline std::variant<RunConfig, int> parse_args(int argc, const char* const* argv, std::ostream& out,
                                               std::ostream& err) {
    CLI::App app{"Steady-state statistics and squeezing of two-mode cavity subharmonic light", "subharmonic"};
    app.set_config("--config", "", "Flat key = value file mirroring the long flags");
    RunConfig c;

    std::string command;
    std::string quantity;
    app.add_option("command", command, "moments | photon-dist | squeezing | spectrum | local-squeezing | pump | verify | sweep")
        ->required();
    app.add_option("quantity", quantity, "Sweep quantity: local-squeezing | spectrum | squeezing | moments");

    double kappa = 0, epsilon = 0, mu = 0, g = 0, half_width = 0, start = 0, stop = 0;
    int points = 0;
    unsigned max_n = 0;
    std::string scale, format = "json", output;
    auto* o_kappa = app.add_option("--kappa", kappa, "Cavity damping rate");
    auto* o_eps = app.add_option("--epsilon", epsilon, "Effective pump amplitude");
    auto* o_mu = app.add_option("--mu", mu, "Pump drive amplitude");
    auto* o_g = app.add_option("--g", g, "Parametric coupling");
    auto* o_hw = app.add_option("--half-width", half_width, "Frequency window half-width");
    app.add_option("--offset", c.offset, "Spectrum frequency offset omega - omega0");
    auto* o_maxn = app.add_option("--max-n", max_n, "Photon-number cutoff for photon-dist (default adaptive)");
    auto* o_start = app.add_option("--start", start, "Sweep grid start");
    auto* o_stop = app.add_option("--stop", stop, "Sweep grid stop");
    auto* o_points = app.add_option("--points", points, "Sweep grid points (>= 2)");
    auto* o_scale = app.add_option("--scale", scale, "Sweep grid scale")->check(CLI::IsMember({"linear", "log"}));
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    auto* o_out = app.add_option("--output", output, "Output file (relative paths honor $SUBHARMONIC_OUTPUT_DIR)");
    app.add_option("--seed", c.seed, "Seed for the Q-function sampler");
    app.add_option("--samples", c.samples, "Sample count for the Q-function sampler");
    app.add_flag("--skip-fock", c.skip_fock, "verify: skip the Fock-space oracle");
    app.add_flag("--cavity-analogue-minus", c.cavity_analogue_minus,
                 "squeezing: use 2 + 4 kappa eps/(kappa - 2 eps) for the output minus variance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    const auto it = command_names().find(command);
    if (it == command_names().end()) {
        err << "usage error: unknown command '" << command << "'\n";
        return kExitUsage;
    }
    c.command = it->second;
    if (!quantity.empty()) {
        const auto q = command_names().find(quantity);
        if (c.command != Command::sweep || q == command_names().end()) {
            err << "usage error: unexpected argument '" << quantity << "'\n";
            return kExitUsage;
        }
        c.sweep_quantity = q->second;
    }
    if (*o_kappa) c.kappa = kappa;
    if (*o_eps) c.epsilon = epsilon;
    if (*o_mu) c.mu = mu;
    if (*o_g) c.g = g;
    if (*o_hw) c.half_width = half_width;
    if (*o_maxn) c.max_n = max_n;
    if (*o_start) c.grid.start = start;
    if (*o_stop) c.grid.stop = stop;
    if (*o_points) c.grid.points = points;
    if (*o_scale) c.grid.scale = scale == "log" ? GridScale::log : GridScale::linear;
    if (*o_out) c.output = output;
    c.format = format == "csv" ? Format::csv : Format::json;
    return c;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    auto parsed = parse_args(argc, argv, out, err);
    if (const int* code = std::get_if<int>(&parsed)) return *code;
    return run(std::get<RunConfig>(parsed), out, err);
}

}  // namespace subharmonic::cli

#endif  // SUBHARMONIC_CLI_HPP
