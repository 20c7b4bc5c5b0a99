#include "dqlab/config.hpp"

#include "dqlab/error.hpp"
#include "dqlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace dqlab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> to_int(std::string_view s) {
    s = trim(s);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

struct Entry {
    std::string value;
    int line = 0;
};

double real_value(const Entry& e, const std::string& key) {
    const auto v = to_double(e.value);
    if (!v || !std::isfinite(*v)) throw ConfigError(key + ": '" + e.value + "' is not a finite real number", e.line);
    return *v;
}

std::optional<double> auto_real(const Entry& e, const std::string& key) {
    if (trim(e.value) == "auto") return std::nullopt;
    return real_value(e, key);
}

int int_value(const Entry& e, const std::string& key) {
    const auto v = to_int<int>(e.value);
    if (!v) throw ConfigError(key + ": '" + e.value + "' is not an integer", e.line);
    return *v;
}

// A term whose body (after any scaled:<f>: prefixes) is itself a sum takes
// the rest of the list.
bool opens_sum(std::string_view term) {
    term = trim(term);
    while (term.starts_with("scaled:")) {
        const auto colon = term.find(':', 7);
        if (colon == std::string_view::npos) return false;
        term = term.substr(colon + 1);
    }
    return term.starts_with("sum:");
}

std::vector<std::string_view> split_top_level(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::string_view rest = s.substr(start);
        const auto comma = rest.find(',');
        if (opens_sum(rest) || comma == std::string_view::npos) {
            parts.push_back(trim(rest));
            return parts;
        }
        parts.push_back(trim(rest.substr(0, comma)));
        start += comma + 1;
    }
}

double datum_number(std::string_view s, std::string_view spec) {
    const auto v = to_double(s);
    if (!v || !std::isfinite(*v)) {
        throw ConfigError("datum '" + std::string(spec) + "': '" + std::string(s) + "' is not a finite number", 0);
    }
    return *v;
}

// basis == nullptr: syntax check only.
void add_datum(std::string_view spec, const Basis* basis, double scale, std::vector<double>* out) {
    spec = trim(spec);
    auto bad = [&](const std::string& why) { return ConfigError("datum '" + std::string(spec) + "': " + why, 0); };

    if (spec == "zero") return;
    if (spec.starts_with("scaled:")) {
        const std::string_view rest = spec.substr(7);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw bad("expected scaled:<factor>:<datum>");
        const double f = datum_number(rest.substr(0, colon), spec);
        add_datum(rest.substr(colon + 1), basis, scale * f, out);
        return;
    }
    if (spec.starts_with("sum:")) {
        const auto parts = split_top_level(spec.substr(4));
        if (parts.empty() || (parts.size() == 1 && parts[0].empty())) throw bad("empty sum");
        for (std::string_view part : parts) {
            if (part.empty()) throw bad("empty term in sum");
            add_datum(part, basis, scale, out);
        }
        return;
    }
    if (spec.starts_with("const:")) {
        const double v = scale * datum_number(spec.substr(6), spec);
        if (basis == nullptr) return;
        switch (basis->kind()) {
        case BasisKind::Neumann1D:
        case BasisKind::Scalar:
            (*out)[0] += v;
            break;
        case BasisKind::DirichletShifted1D:
            // <1, sqrt2 sin(m pi x)> = sqrt2 (1 - (-1)^m) / (m pi), m = k + 1.
            for (std::size_t k = 0; k < out->size(); ++k) {
                const int m = static_cast<int>(k) + 1;
                if (m % 2 == 1) (*out)[k] += v * std::numbers::sqrt2 * 2.0 / (m * std::numbers::pi);
            }
            break;
        case BasisKind::CustomSpectrum:
            throw bad("const: needs a spatial basis");
        }
        return;
    }
    if (spec.starts_with("kernel:")) {
        const double v = scale * datum_number(spec.substr(7), spec);
        if (basis == nullptr) return;
        if (basis->kernel_indices().empty()) throw bad("operator has a trivial kernel");
        (*out)[static_cast<std::size_t>(basis->kernel_indices().front())] += v;
        return;
    }
    if (spec.starts_with("mode:")) {
        const std::string_view rest = spec.substr(5);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw bad("expected mode:<k>:<amp>");
        const auto k = to_int<int>(rest.substr(0, colon));
        if (!k || *k < 0) throw bad("mode index must be a nonnegative integer");
        const double amp = scale * datum_number(rest.substr(colon + 1), spec);
        if (basis == nullptr) return;
        if (*k >= basis->n_modes()) {
            throw bad("mode index " + std::to_string(*k) + " >= n_modes = " + std::to_string(basis->n_modes()));
        }
        (*out)[static_cast<std::size_t>(*k)] += amp;
        return;
    }
    throw bad("unknown descriptor (expected zero, const:, kernel:, mode:, scaled: or sum:)");
}

ProblemKind problem_kind(const Entry& e) {
    const std::string_view v = trim(e.value);
    if (v == "neumann1d") return ProblemKind::Neumann1D;
    if (v == "dirichlet1d") return ProblemKind::Dirichlet1D;
    if (v == "nonlocal_norm") return ProblemKind::NonlocalNorm;
    if (v == "nonlocal_rank1") return ProblemKind::NonlocalRank1;
    if (v == "scalar_ode") return ProblemKind::ScalarOde;
    throw ConfigError("problem: unknown value '" + e.value +
                          "' (expected neumann1d, dirichlet1d, nonlocal_norm, nonlocal_rank1 or scalar_ode)",
                      e.line);
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : "auto"; }

}  // namespace

std::string_view to_string(ProblemKind kind) {
    switch (kind) {
    case ProblemKind::Neumann1D: return "neumann1d";
    case ProblemKind::Dirichlet1D: return "dirichlet1d";
    case ProblemKind::NonlocalNorm: return "nonlocal_norm";
    case ProblemKind::NonlocalRank1: return "nonlocal_rank1";
    case ProblemKind::ScalarOde: return "scalar_ode";
    }
    return "unknown";
}

void check_datum_syntax(std::string_view spec) { add_datum(spec, nullptr, 1.0, nullptr); }

std::vector<double> parse_datum(std::string_view spec, const Basis& basis) {
    std::vector<double> out(static_cast<std::size_t>(basis.n_modes()), 0.0);
    add_datum(spec, &basis, 1.0, &out);
    return out;
}

RunConfig parse_config(std::string_view text) {
    static const char* const known[] = {"problem", "p",        "n_modes", "n_grid", "dt",    "t_end",
                                        "sampling", "sample_count", "scheme", "u0_spec", "u1_spec",
                                        "phi_spec", "eps",      "delta",   "R",      "alpha", "rho",
                                        "seed",     "out_path"};
    std::map<std::string, Entry> entries;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("empty key", line_no);
        bool is_known = false;
        for (const char* k : known) is_known = is_known || key == k;
        if (!is_known) throw ConfigError("unknown key '" + key + "'", line_no);
        if (value.empty()) throw ConfigError(key + ": empty value", line_no);
        if (entries.count(key) != 0) {
            throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(entries[key].line) + ")",
                              line_no);
        }
        entries[key] = Entry{value, line_no};
    }

    for (const char* required : {"problem", "p", "u0_spec"}) {
        if (entries.count(required) == 0) throw ConfigError(std::string("missing required key '") + required + "'", 0);
    }

    RunConfig c;
    c.problem = problem_kind(entries["problem"]);

    const Entry& pe = entries["p"];
    c.p = real_value(pe, "p");
    if (!(c.p > 0.0)) throw ConfigError("p: must satisfy p > 0 (got " + pe.value + ")", pe.line);

    const bool scalar = c.problem == ProblemKind::ScalarOde;
    c.n_modes = scalar ? 1 : 16;
    if (auto it = entries.find("n_modes"); it != entries.end()) {
        c.n_modes = int_value(it->second, "n_modes");
        if (c.n_modes < 1) throw ConfigError("n_modes: must be >= 1", it->second.line);
        if (scalar && c.n_modes != 1) throw ConfigError("n_modes: scalar_ode has exactly one mode", it->second.line);
    }
    c.n_grid = scalar ? 1 : 4 * c.n_modes;
    if (auto it = entries.find("n_grid"); it != entries.end()) {
        c.n_grid = int_value(it->second, "n_grid");
        if (!scalar && c.n_grid < 2 * c.n_modes) {
            throw ConfigError("n_grid: must be >= 2*n_modes = " + std::to_string(2 * c.n_modes), it->second.line);
        }
        if (scalar && c.n_grid != 1) throw ConfigError("n_grid: scalar_ode uses a single point", it->second.line);
    }

    if (auto it = entries.find("dt"); it != entries.end()) {
        c.integrator.dt = real_value(it->second, "dt");
        if (!(c.integrator.dt > 0.0)) throw ConfigError("dt: must be > 0", it->second.line);
    }
    if (auto it = entries.find("t_end"); it != entries.end()) {
        c.integrator.t_end = real_value(it->second, "t_end");
        if (!(c.integrator.t_end >= c.integrator.dt)) throw ConfigError("t_end: must satisfy t_end >= dt", it->second.line);
    }
    if (auto it = entries.find("sampling"); it != entries.end()) {
        const std::string_view v = trim(it->second.value);
        if (v == "log" || v == "logarithmic") c.integrator.sampling = Sampling::Logarithmic;
        else if (v == "linear") c.integrator.sampling = Sampling::Linear;
        else throw ConfigError("sampling: expected log or linear", it->second.line);
    }
    if (auto it = entries.find("sample_count"); it != entries.end()) {
        c.integrator.sample_count = int_value(it->second, "sample_count");
        if (c.integrator.sample_count < 2) throw ConfigError("sample_count: must be >= 2", it->second.line);
    }
    if (auto it = entries.find("scheme"); it != entries.end()) {
        const std::string_view v = trim(it->second.value);
        if (v == "strang") c.integrator.scheme = Scheme::StrangExactLinear;
        else if (v == "rk4") c.integrator.scheme = Scheme::RK4Reference;
        else throw ConfigError("scheme: expected strang or rk4", it->second.line);
    }

    auto datum = [&](const char* key, std::string& dst) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        dst = it->second.value;
        try {
            check_datum_syntax(dst);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(key) + ": " + e.what(), it->second.line);
        }
    };
    datum("u0_spec", c.u0_spec);
    datum("u1_spec", c.u1_spec);
    if (auto it = entries.find("phi_spec"); it != entries.end()) {
        if (c.problem != ProblemKind::NonlocalRank1) {
            throw ConfigError("phi_spec: only used by nonlocal_rank1", it->second.line);
        }
        if (trim(it->second.value) != "auto") datum("phi_spec", c.phi_spec);
    }

    auto positive_auto = [&](const char* key, std::optional<double>& dst, bool allow_zero) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        dst = auto_real(it->second, key);
        if (dst && !(*dst > 0.0 || (allow_zero && *dst == 0.0))) {
            throw ConfigError(std::string(key) + ": must be " + (allow_zero ? ">= 0" : "> 0"), it->second.line);
        }
    };
    positive_auto("eps", c.eps, true);
    positive_auto("delta", c.delta, false);
    positive_auto("R", c.R, false);
    positive_auto("alpha", c.alpha, false);
    positive_auto("rho", c.rho, false);

    if (auto it = entries.find("seed"); it != entries.end()) {
        const auto v = to_int<std::uint64_t>(it->second.value);
        if (!v) throw ConfigError("seed: expected a nonnegative integer", it->second.line);
        c.seed = *v;
    }
    if (auto it = entries.find("out_path"); it != entries.end()) c.out_path = it->second.value;

    // Checks that need the basis: mode indices, admissible delta, phi.
    const Basis basis = make_basis(c);
    for (const char* key : {"u0_spec", "u1_spec", "phi_spec"}) {
        auto it = entries.find(key);
        if (it == entries.end() || (std::string_view(key) == "phi_spec" && c.phi_spec == "auto")) continue;
        try {
            (void)parse_datum(it->second.value, basis);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(key) + ": " + e.what(), it->second.line);
        }
    }
    if (c.delta) {
        const double nu = basis.nu();
        const double max_delta = std::isinf(nu) ? 0.5 : nu / (2.0 * nu + 1.0);
        if (*c.delta > max_delta * (1.0 + 1e-15)) {
            throw ConfigError("delta: must satisfy delta <= nu/(2nu+1) = " + format_number(max_delta),
                              entries["delta"].line);
        }
    }
    try {
        (void)make_nonlinearity(c, basis);
    } catch (const InvalidArgument& e) {
        const int line = entries.count("phi_spec") ? entries["phi_spec"].line : 0;
        throw ConfigError(e.what(), line);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string render_config(const RunConfig& c) {
    std::ostringstream out;
    out << "problem=" << to_string(c.problem) << "\n";
    out << "p=" << format_number(c.p) << "\n";
    out << "n_modes=" << c.n_modes << "\n";
    out << "n_grid=" << c.n_grid << "\n";
    out << "dt=" << format_number(c.integrator.dt) << "\n";
    out << "t_end=" << format_number(c.integrator.t_end) << "\n";
    out << "sampling=" << to_string(c.integrator.sampling) << "\n";
    out << "sample_count=" << c.integrator.sample_count << "\n";
    out << "scheme=" << to_string(c.integrator.scheme) << "\n";
    out << "u0_spec=" << c.u0_spec << "\n";
    out << "u1_spec=" << c.u1_spec << "\n";
    if (c.problem == ProblemKind::NonlocalRank1) out << "phi_spec=" << c.phi_spec << "\n";
    out << "eps=" << opt(c.eps) << "\n";
    out << "delta=" << opt(c.delta) << "\n";
    out << "R=" << opt(c.R) << "\n";
    out << "alpha=" << opt(c.alpha) << "\n";
    out << "rho=" << opt(c.rho) << "\n";
    out << "seed=" << c.seed << "\n";
    if (!c.out_path.empty()) out << "out_path=" << c.out_path << "\n";
    return out.str();
}

Basis make_basis(const RunConfig& c) {
    switch (c.problem) {
    case ProblemKind::Neumann1D:
    case ProblemKind::NonlocalNorm:
    case ProblemKind::NonlocalRank1:
        return build_basis(BasisKind::Neumann1D, c.n_modes, c.n_grid);
    case ProblemKind::Dirichlet1D:
        return build_basis(BasisKind::DirichletShifted1D, c.n_modes, c.n_grid);
    case ProblemKind::ScalarOde:
        return build_basis(BasisKind::Scalar, 1, 1);
    }
    throw InvalidArgument("unknown problem kind");
}

Nonlinearity make_nonlinearity(const RunConfig& c, const Basis& basis) {
    switch (c.problem) {
    case ProblemKind::Neumann1D:
    case ProblemKind::Dirichlet1D:
    case ProblemKind::ScalarOde:
        return Nonlinearity::local_power(c.p);
    case ProblemKind::NonlocalNorm:
        return Nonlinearity::norm_power(c.p);
    case ProblemKind::NonlocalRank1: {
        std::vector<double> phi =
            c.phi_spec == "auto" ? default_rank_one_profile(basis) : parse_datum(c.phi_spec, basis);
        return Nonlinearity::rank_one(c.p, std::move(phi), basis);
    }
    }
    throw InvalidArgument("unknown problem kind");
}

Problem make_problem(const RunConfig& c) {
    Basis basis = make_basis(c);
    Nonlinearity nl = make_nonlinearity(c, basis);
    State initial = make_state(basis, parse_datum(c.u0_spec, basis), parse_datum(c.u1_spec, basis));
    return Problem{std::move(basis), std::move(nl), std::move(initial)};
}

}  // namespace dqlab
