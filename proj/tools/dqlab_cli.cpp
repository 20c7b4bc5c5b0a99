// dqlab command line front end. Talks to the library only through dqlab.h.

#include "dqlab/dqlab.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvariant = 2;

struct ConfigDeleter {
    void operator()(dqlab_config* c) const { dqlab_config_free(c); }
};
struct RunDeleter {
    void operator()(dqlab_run* r) const { dqlab_run_free(r); }
};
using ConfigPtr = std::unique_ptr<dqlab_config, ConfigDeleter>;
using RunPtr = std::unique_ptr<dqlab_run, RunDeleter>;

int report(dqlab_status status) {
    std::cerr << "dqlab: " << dqlab_status_name(status) << ": " << dqlab_last_error() << "\n";
    return kExitError;
}

// Calls a buffer-filling API twice: once for the size, once for the text.
template <class F>
std::string fetch(F&& fill) {
    std::size_t needed = 0;
    if (fill(nullptr, 0, &needed) != DQLAB_OK) return {};
    std::string text(needed, '\0');
    fill(text.data(), text.size(), &needed);
    text.resize(needed > 0 ? needed - 1 : 0);
    return text;
}

ConfigPtr load(const std::string& path, dqlab_status& status) {
    dqlab_config* raw = nullptr;
    status = dqlab_config_load(path.c_str(), &raw);
    return ConfigPtr(raw);
}

int cmd_simulate(const std::string& config_path, const std::string& out, bool check) {
    dqlab_status st;
    ConfigPtr config = load(config_path, st);
    if (st != DQLAB_OK) return report(st);
    dqlab_run* raw = nullptr;
    if ((st = dqlab_simulate(config.get(), &raw)) != DQLAB_OK) return report(st);
    RunPtr run(raw);
    if ((st = dqlab_run_write_csv(run.get(), out.c_str())) != DQLAB_OK) return report(st);

    const bool passed = dqlab_run_checks_passed(run.get()) != 0;
    std::cout << "wrote " << dqlab_run_sample_count(run.get()) << " samples to " << out << "\n";
    if (!passed) {
        std::cerr << "failed checks:\n"
                  << fetch([&](char* b, std::size_t c, std::size_t* n) { return dqlab_run_failures(run.get(), b, c, n); });
    }
    return check && !passed ? kExitInvariant : kExitOk;
}

int cmd_certify(const std::string& config_path) {
    dqlab_status st;
    ConfigPtr config = load(config_path, st);
    if (st != DQLAB_OK) return report(st);
    dqlab_certificate cert{};
    if ((st = dqlab_certify(config.get(), &cert)) != DQLAB_OK) return report(st);
    std::cout << fetch([&](char* b, std::size_t c, std::size_t* n) { return dqlab_certificate_format(&cert, b, c, n); });
    return kExitOk;
}

int cmd_fit(const std::string& csv, const std::string& column, double t_min, double t_max) {
    dqlab_slope_fit fit{};
    const dqlab_status st = dqlab_fit_csv(csv.c_str(), column.c_str(), t_min, t_max, &fit);
    if (st != DQLAB_OK) return report(st);
    std::cout << fetch([&](char* b, std::size_t c, std::size_t* n) { return dqlab_slope_fit_format(&fit, b, c, n); });
    return kExitOk;
}

int cmd_oracle(double p, double v0, double v1, double t_end, double dt, const std::string& out) {
    const dqlab_status st = dqlab_oracle_write(p, v0, v1, dt, t_end, out.c_str());
    if (st != DQLAB_OK) return report(st);
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& amplitudes, const std::string& out_dir,
              int workers, bool check) {
    dqlab_status st;
    ConfigPtr config = load(config_path, st);
    if (st != DQLAB_OK) return report(st);
    std::size_t failed = 0;
    st = dqlab_sweep(config.get(), amplitudes.data(), amplitudes.size(), out_dir.c_str(), workers, &failed);
    if (st != DQLAB_OK) return report(st);
    std::cout << "wrote " << amplitudes.size() << " runs and summary.csv to " << out_dir << "\n";
    if (failed > 0) std::cerr << failed << " run(s) failed a check or raised an error\n";
    return check && failed > 0 ? kExitInvariant : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped wave equation decay experiments"};
    app.set_version_flag("--version", std::string(dqlab_version()));
    app.require_subcommand(1);

    std::string config, out, csv, column, out_dir;
    bool check = false;
    double t_min = 0.0, t_max = 0.0, p = 0.0, v0 = 0.0, v1 = 0.0, t_end = 0.0, dt = 0.05;
    std::vector<double> amplitudes;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto* sim = app.add_subcommand("simulate", "Integrate a configured problem and write its CSV");
    sim->add_option("--config", config, "Run configuration")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "Output CSV")->required();
    sim->add_flag("--check", check, "Exit with status 2 if any invariant check fails");

    auto* cert = app.add_subcommand("certify", "Print the slow-set certificate of the configured data");
    cert->add_option("--config", config, "Run configuration")->required()->check(CLI::ExistingFile);

    auto* fit = app.add_subcommand("fit", "Fit a log-log decay exponent to a CSV column");
    fit->add_option("--csv", csv, "Input CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--column", column, "Column name")->required();
    fit->add_option("--t-min", t_min, "Window start")->required();
    fit->add_option("--t-max", t_max, "Window end")->required();

    auto* oracle = app.add_subcommand("oracle", "Integrate the scalar ODE v'' + v' + |v|^p v = 0");
    oracle->add_option("--p", p, "Exponent p > 0")->required();
    oracle->add_option("--v0", v0, "Initial value")->required();
    oracle->add_option("--v1", v1, "Initial velocity")->capture_default_str();
    oracle->add_option("--t-end", t_end, "Final time")->required();
    oracle->add_option("--dt", dt, "Time step")->capture_default_str();
    oracle->add_option("--out", out, "Output CSV")->required();

    auto* sw = app.add_subcommand("sweep", "Simulate over a grid of initial-data amplitudes");
    sw->add_option("--config", config, "Run configuration")->required()->check(CLI::ExistingFile);
    sw->add_option("--amplitudes", amplitudes, "Comma-separated amplitudes")->required()->delimiter(',');
    sw->add_option("--out-dir", out_dir, "Output directory")->required();
    sw->add_option("--workers", workers, "Parallel runs")->check(CLI::PositiveNumber)->capture_default_str();
    sw->add_flag("--check", check, "Exit with status 2 if any run fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    if (*sim) return cmd_simulate(config, out, check);
    if (*cert) return cmd_certify(config);
    if (*fit) return cmd_fit(csv, column, t_min, t_max);
    if (*oracle) return cmd_oracle(p, v0, v1, t_end, dt, out);
    if (*sw) return cmd_sweep(config, amplitudes, out_dir, workers, check);
    return kExitError;
}
