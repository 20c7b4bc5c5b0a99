#include "dqlab/dqlab.h"

#include "dqlab/commands.hpp"
#include "dqlab/error.hpp"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

struct dqlab_config {
    dqlab::RunConfig value;
};

struct dqlab_run {
    dqlab::RunResult value;
};

namespace {

thread_local std::string g_last_error;

dqlab_status fail(dqlab_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Maps the library's exception hierarchy onto status codes. Most specific
// classes first.
template <class F>
dqlab_status guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return DQLAB_OK;
    } catch (const dqlab::ConfigError& e) {
        return fail(DQLAB_ERR_CONFIG, e.what());
    } catch (const dqlab::IoError& e) {
        return fail(DQLAB_ERR_IO, e.what());
    } catch (const dqlab::DomainError& e) {
        return fail(DQLAB_ERR_DOMAIN, e.what());
    } catch (const dqlab::IntegrationDiverged& e) {
        return fail(DQLAB_ERR_DIVERGED, e.what());
    } catch (const dqlab::FitError& e) {
        return fail(DQLAB_ERR_FIT, e.what());
    } catch (const dqlab::InvalidArgument& e) {
        return fail(DQLAB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DQLAB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(DQLAB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DQLAB_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* ptr, const char* what) {
    if (ptr == nullptr) throw dqlab::InvalidArgument(std::string(what) + " must not be NULL");
}

void copy_out(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf == nullptr || cap == 0) return;
    const std::size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
}

dqlab_certificate to_c(const dqlab::SlowCertificate& c) {
    return dqlab_certificate{c.p,      c.nu,     c.delta,        c.rho,          c.R,
                             c.alpha,  c.sigma0, c.sigma1,       c.cond1_margin, c.cond2_margin,
                             c.cond3_margin,     c.member ? 1 : 0, c.envelope_y0, c.envelope_rate};
}

dqlab::SlowCertificate from_c(const dqlab_certificate& c) {
    dqlab::SlowCertificate s;
    s.p = c.p;
    s.nu = c.nu;
    s.delta = c.delta;
    s.rho = c.rho;
    s.R = c.R;
    s.alpha = c.alpha;
    s.sigma0 = c.sigma0;
    s.sigma1 = c.sigma1;
    s.cond1_margin = c.cond1_margin;
    s.cond2_margin = c.cond2_margin;
    s.cond3_margin = c.cond3_margin;
    s.member = c.member != 0;
    s.envelope_y0 = c.envelope_y0;
    s.envelope_rate = c.envelope_rate;
    return s;
}

dqlab_slope_fit to_c(const dqlab::SlopeFit& f) {
    return dqlab_slope_fit{f.exponent, f.intercept, f.r_squared, f.t_min, f.t_max, f.n_points};
}

}  // namespace

extern "C" {

const char* dqlab_version(void) { return "0.1.0"; }

const char* dqlab_last_error(void) { return g_last_error.c_str(); }

const char* dqlab_status_name(dqlab_status status) {
    switch (status) {
    case DQLAB_OK: return "ok";
    case DQLAB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DQLAB_ERR_CONFIG: return "config error";
    case DQLAB_ERR_IO: return "i/o error";
    case DQLAB_ERR_DOMAIN: return "domain error";
    case DQLAB_ERR_DIVERGED: return "integration diverged";
    case DQLAB_ERR_FIT: return "fit error";
    case DQLAB_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

dqlab_status dqlab_config_parse(const char* text, dqlab_config** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new dqlab_config{dqlab::parse_config(text)};
    });
}

dqlab_status dqlab_config_load(const char* path, dqlab_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new dqlab_config{dqlab::load_config(path)};
    });
}

void dqlab_config_free(dqlab_config* config) { delete config; }

dqlab_status dqlab_config_render(const dqlab_config* config, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(config, "config");
        copy_out(dqlab::render_config(config->value), buf, cap, needed);
    });
}

dqlab_status dqlab_simulate(const dqlab_config* config, dqlab_run** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        *out = new dqlab_run{dqlab::simulate_run(config->value)};
    });
}

void dqlab_run_free(dqlab_run* run) { delete run; }

size_t dqlab_run_sample_count(const dqlab_run* run) {
    return run == nullptr ? 0 : run->value.trajectory.samples.size();
}

dqlab_status dqlab_run_column(const dqlab_run* run, const char* name, double* out, size_t cap) {
    return guarded([&] {
        require(run, "run");
        require(name, "name");
        const auto& xs = run->value.trajectory.samples;
        const std::size_t n = std::min(cap, xs.size());
        if (n > 0) require(out, "out");
        for (std::size_t i = 0; i < n; ++i) out[i] = dqlab::column_value(xs[i], name);
        // An unknown name must fail even for an empty copy.
        if (n == 0) dqlab::column_value(dqlab::EnergySample{}, name);
    });
}

int dqlab_run_checks_passed(const dqlab_run* run) { return run != nullptr && run->value.checks_passed() ? 1 : 0; }

dqlab_status dqlab_run_failures(const dqlab_run* run, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(run, "run");
        std::string text;
        for (const auto& rep : run->value.checks) {
            if (!rep.ok) text += rep.name + (rep.detail.empty() ? "" : ": " + rep.detail) + "\n";
        }
        const auto& id = run->value.range.identity;
        if (!id.ok) text += id.name + (id.detail.empty() ? "" : ": " + id.detail) + "\n";
        copy_out(text, buf, cap, needed);
    });
}

dqlab_status dqlab_run_metadata(const dqlab_run* run, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(run, "run");
        copy_out(dqlab::run_metadata(run->value), buf, cap, needed);
    });
}

dqlab_status dqlab_run_write_csv(const dqlab_run* run, const char* path) {
    return guarded([&] {
        require(run, "run");
        require(path, "path");
        dqlab::write_run_csv(std::string(path), run->value);
    });
}

dqlab_status dqlab_certify(const dqlab_config* config, dqlab_certificate* out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        const dqlab::Resolved r = dqlab::resolve(config->value);
        if (!r.certificate) throw dqlab::DomainError("certify: u0 must be nonzero");
        *out = to_c(*r.certificate);
    });
}

dqlab_status dqlab_certificate_format(const dqlab_certificate* cert, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(cert, "cert");
        copy_out(dqlab::to_key_values(from_c(*cert), ""), buf, cap, needed);
    });
}

dqlab_status dqlab_fit_csv(const char* path, const char* column, double t_min, double t_max, dqlab_slope_fit* out) {
    return guarded([&] {
        require(path, "path");
        require(column, "column");
        require(out, "out");
        *out = to_c(dqlab::fit_csv(path, column, t_min, t_max));
    });
}

dqlab_status dqlab_fit_series(const double* t, const double* values, size_t n, double t_min, double t_max,
                              dqlab_slope_fit* out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) {
            require(t, "t");
            require(values, "values");
        }
        *out = to_c(dqlab::fit_slope(std::span<const double>(t, n), std::span<const double>(values, n), t_min, t_max));
    });
}

dqlab_status dqlab_slope_fit_format(const dqlab_slope_fit* fit, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(fit, "fit");
        const dqlab::SlopeFit f{fit->exponent, fit->intercept, fit->r_squared, fit->t_min, fit->t_max, fit->n_points};
        copy_out(dqlab::to_key_values(f, ""), buf, cap, needed);
    });
}

dqlab_status dqlab_oracle_write(double p, double v0, double v1, double dt, double t_end, const char* path) {
    return guarded([&] {
        require(path, "path");
        const double step = dt > 0.0 ? dt : 0.05;
        const dqlab::OracleSeries s = dqlab::ode_oracle(p, v0, v1, step, t_end);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw dqlab::IoError(std::string("cannot open '") + path + "' for writing");
        dqlab::write_oracle_csv(out, p, v0, v1, step, t_end, s);
        if (!out.flush()) throw dqlab::IoError(std::string("write to '") + path + "' failed");
    });
}

dqlab_status dqlab_sweep(const dqlab_config* config, const double* amplitudes, size_t n, const char* out_dir,
                         int workers, size_t* failed_runs) {
    return guarded([&] {
        require(config, "config");
        require(out_dir, "out_dir");
        if (n > 0) require(amplitudes, "amplitudes");
        const auto rows = dqlab::sweep(config->value, std::vector<double>(amplitudes, amplitudes + n), out_dir, workers);
        std::size_t failed = 0;
        for (const auto& row : rows) failed += (!row.error.empty() || !row.checks_ok) ? 1 : 0;
        if (failed_runs != nullptr) *failed_runs = failed;
    });
}

}  // extern "C"
