#pragma once

// Experiment orchestration shared by the C API and the command line tool.

#include "dqlab/analysis.hpp"
#include "dqlab/config.hpp"
#include "dqlab/energies.hpp"
#include "dqlab/slowset.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dqlab {

/// A config with every resolvable "auto" replaced by its value. rho stays
/// auto for u0 = 0 (nothing to certify); R then stays auto for LocalPower.
struct Resolved {
    RunConfig config;
    Problem problem;
    std::optional<SlowCertificate> certificate;
};

/// Resolution order: delta, alpha = p, rho = 1.01 sigma0, R.
Resolved resolve(const RunConfig& config);

struct RunResult {
    explicit RunResult(Resolved r) : resolved(std::move(r)) {}

    Resolved resolved;
    Trajectory trajectory;
    EpsilonSelection eps_selection;
    DecayVerdict verdict;
    UpperReport upper;
    RangeDecayReport range;
    std::vector<InvariantReport> checks;

    bool checks_passed() const { return all_ok(checks) && range.identity.ok; }
};

RunResult simulate_run(const RunConfig& config);

/// "# key=value" lines: resolved config, eps selection, certificate, verdict,
/// upper bounds and every check.
std::string run_metadata(const RunResult& result);
void write_run_csv(std::ostream& out, const RunResult& result);
void write_run_csv(const std::string& path, const RunResult& result);

struct CsvTable {
    std::vector<std::string> metadata;  // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Throws InvalidArgument for a missing column.
    std::vector<double> column(const std::string& name) const;
};

/// Parses '#' metadata, one header line and numeric rows ("nan" allowed).
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

SlopeFit fit_csv(const std::string& path, const std::string& column, double t_min, double t_max);

void write_oracle_csv(std::ostream& out, double p, double v0, double v1, double dt, double t_end,
                      const OracleSeries& series);

struct SweepRow {
    int index = 0;
    double amplitude = 0.0;
    bool certified = false;  // a certificate exists (u0 != 0)
    bool member = false;
    DecayVerdict verdict;
    bool checks_ok = false;
    std::string error;  // non-empty when the run threw
};

/// Runs the config with u0 scaled by each amplitude, writes run_NNN.csv and
/// summary.csv into out_dir. Rows come back in amplitude order regardless of
/// `workers`.
std::vector<SweepRow> sweep(const RunConfig& config, const std::vector<double>& amplitudes,
                            const std::string& out_dir, int workers = 1);

}  // namespace dqlab
