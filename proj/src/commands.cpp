#include "dqlab/commands.hpp"

#include "dqlab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace dqlab {

namespace {

constexpr int kRSamples = 1000;
constexpr double kAutoRhoFactor = 1.01;
constexpr double kUEnergySlack = 4.0;

std::string bool_text(bool b) { return b ? "true" : "false"; }

void prefix_lines(std::ostream& out, const std::string& block) {
    std::istringstream in(block);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out << "# " << line << "\n";
    }
}

std::vector<double> parse_row(const std::string& line, std::size_t width, std::size_t line_no) {
    std::vector<double> row;
    row.reserve(width);
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find(',', start);
        if (end == std::string::npos) end = line.size();
        std::string cell = line.substr(start, end - start);
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        char* stop = nullptr;
        const double v = std::strtod(cell.c_str(), &stop);
        if (cell.empty() || stop != cell.c_str() + cell.size()) {
            throw IoError("csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
        }
        row.push_back(v);
        start = end + 1;
    }
    if (row.size() != width) {
        throw IoError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " fields, got " +
                      std::to_string(row.size()));
    }
    return row;
}

}  // namespace

Resolved resolve(const RunConfig& config) {
    Resolved r{config, make_problem(config), std::nullopt};
    RunConfig& c = r.config;
    const Basis& basis = r.problem.basis;
    const Nonlinearity& nl = r.problem.nonlinearity;
    const std::vector<double>& u0 = r.problem.initial.a;
    const std::vector<double>& u1 = r.problem.initial.b;

    if (!c.delta) c.delta = max_admissible_delta(basis);
    if (!c.alpha) c.alpha = c.p;
    const bool nonzero = norm(u0) > 0.0;
    if (!c.rho && nonzero) c.rho = kAutoRhoFactor * compute_sigma0(basis, nl, u0, u1);
    if (!c.R) {
        if (nl.kind() != NonlinearityKind::LocalPower) {
            c.R = 1.0;
        } else if (c.rho) {
            c.R = estimate_R(basis, nl, *c.rho, *c.alpha, kRSamples, c.seed);
        }
    }
    if (nonzero && c.rho && c.R) {
        r.certificate = compute_certificate(basis, nl, u0, u1, *c.rho, *c.R, *c.alpha, *c.delta);
    }
    return r;
}

RunResult simulate_run(const RunConfig& config) {
    RunResult out{resolve(config)};
    RunConfig& c = out.resolved.config;
    const Problem& problem = out.resolved.problem;

    out.trajectory = simulate(problem, c.integrator, 0.0, *c.delta);
    out.eps_selection = select_epsilon(out.trajectory, c.p);
    if (!c.eps && out.eps_selection.valid) c.eps = out.eps_selection.eps;
    // An unresolved eps leaves E_hat_eps = E_big, and the sandwich check below
    // records the failed selection.
    apply_epsilon(out.trajectory, c.eps.value_or(0.0));

    const SlowCertificate* cert = out.resolved.certificate ? &*out.resolved.certificate : nullptr;
    out.verdict = classify(out.trajectory, c.p, cert);
    out.upper = verify_upper(out.trajectory, c.p);
    out.range = verify_range_decay(out.trajectory, c.p, problem.basis.nu());

    auto& checks = out.checks;
    checks.push_back(check_nonincreasing(out.trajectory, "F0"));
    checks.push_back(check_nonincreasing(out.trajectory, "E_tilde"));
    checks.push_back(check_basic_bound(out.trajectory));
    checks.push_back(check_basic_sandwich(out.trajectory));
    InvariantReport eps = check_eps_sandwich(out.trajectory);
    if (!c.eps) {
        eps.ok = false;
        eps.detail = "no admissible eps in the scan grid";
    }
    checks.push_back(eps);
    checks.push_back(check_dirichlet_quotient(out.trajectory));
    if (cert != nullptr && cert->member) {
        checks.push_back(check_quotient_sandwich(out.trajectory));
        checks.push_back(check_u_energy(out.trajectory, kUEnergySlack));
        for (InvariantReport& rep : check_slow_trajectory(out.trajectory, *cert)) checks.push_back(std::move(rep));
    }
    return out;
}

std::string run_metadata(const RunResult& r) {
    std::ostringstream out;
    out << render_config(r.resolved.config);
    out << "eps_selection.valid=" << bool_text(r.eps_selection.valid) << "\n";
    out << "eps_selection.beta=" << format_number(r.eps_selection.beta) << "\n";
    if (r.resolved.certificate) out << to_key_values(*r.resolved.certificate, "cert.");
    out << to_key_values(r.verdict, "verdict.");
    out << to_key_values(r.upper, "upper.");
    out << to_key_values(r.range, "range.");
    for (const InvariantReport& rep : r.checks) out << to_key_values(rep, "check." + rep.name);
    out << "checks_passed=" << bool_text(r.checks_passed()) << "\n";
    return out.str();
}

void write_run_csv(std::ostream& out, const RunResult& r) {
    prefix_lines(out, run_metadata(r));
    const auto cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
    out << "\n";
    for (const EnergySample& s : r.trajectory.samples) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << format_number(s.*(cols[i].member));
        out << "\n";
    }
}

void write_run_csv(const std::string& path, const RunResult& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_run_csv(out, r);
    if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgument("csv has no column '" + name + "'");
    const auto idx = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t k = 1;
            while (k < line.size() && line[k] == ' ') ++k;
            table.metadata.push_back(line.substr(k));
            continue;
        }
        if (table.header.empty()) {
            std::istringstream cells(line);
            std::string cell;
            while (std::getline(cells, cell, ',')) table.header.push_back(cell);
            continue;
        }
        table.rows.push_back(parse_row(line, table.header.size(), line_no));
    }
    if (table.header.empty()) throw IoError("csv has no header line");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_csv(in);
}

SlopeFit fit_csv(const std::string& path, const std::string& column, double t_min, double t_max) {
    const CsvTable table = read_csv_file(path);
    return fit_slope(table.column("t"), table.column(column), t_min, t_max);
}

void write_oracle_csv(std::ostream& out, double p, double v0, double v1, double dt, double t_end,
                      const OracleSeries& s) {
    out << "# p=" << format_number(p) << "\n";
    out << "# v0=" << format_number(v0) << "\n";
    out << "# v1=" << format_number(v1) << "\n";
    out << "# dt=" << format_number(dt) << "\n";
    out << "# t_end=" << format_number(t_end) << "\n";
    out << "t,v,v_dot,v_pred\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        out << format_number(s.t[i]) << "," << format_number(s.v[i]) << "," << format_number(s.v_dot[i]) << ","
            << format_number(s.v_pred[i]) << "\n";
    }
}

std::vector<SweepRow> sweep(const RunConfig& config, const std::vector<double>& amplitudes,
                            const std::string& out_dir, int workers) {
    if (amplitudes.empty()) throw InvalidArgument("sweep: no amplitudes");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());

    std::vector<SweepRow> rows(amplitudes.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < amplitudes.size(); i = next++) {
            SweepRow& row = rows[i];
            row.index = static_cast<int>(i);
            row.amplitude = amplitudes[i];
            RunConfig c = config;
            c.u0_spec = "scaled:" + format_number(amplitudes[i]) + ":" + config.u0_spec;
            char name[32];
            std::snprintf(name, sizeof name, "run_%03zu.csv", i);
            try {
                const RunResult r = simulate_run(c);
                row.certified = r.resolved.certificate.has_value();
                row.member = row.certified && r.resolved.certificate->member;
                row.verdict = r.verdict;
                row.checks_ok = r.checks_passed();
                write_run_csv((std::filesystem::path(out_dir) / name).string(), r);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    const int n = std::clamp(workers, 1, static_cast<int>(amplitudes.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < n; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    const std::string summary = (std::filesystem::path(out_dir) / "summary.csv").string();
    std::ofstream out(summary, std::ios::binary);
    if (!out) throw IoError("cannot open '" + summary + "' for writing");
    out << "index,amplitude,member,classification,fitted_norm_exponent,r_squared,M1,M2,lower_envelope_ok,checks_ok\n";
    for (const SweepRow& row : rows) {
        out << row.index << "," << format_number(row.amplitude) << ",";
        if (!row.error.empty()) {
            out << "nan,error,nan,nan,nan,nan,nan,false\n";
            continue;
        }
        out << (row.certified ? bool_text(row.member) : "nan") << "," << to_string(row.verdict.classification) << ","
            << format_number(row.verdict.fitted_norm_exponent) << "," << format_number(row.verdict.r_squared) << ","
            << format_number(row.verdict.upper_bound_M1) << "," << format_number(row.verdict.upper_bound_M2) << ","
            << (row.verdict.envelope_checked ? bool_text(row.verdict.lower_envelope_ok) : "nan") << ","
            << bool_text(row.checks_ok) << "\n";
    }
    if (!out.flush()) throw IoError("write to '" + summary + "' failed");
    return rows;
}

}  // namespace dqlab
