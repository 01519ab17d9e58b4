#include "steinlab/steinlab.h"

#include "error.hpp"
#include "rate_fit.hpp"
#include "sweep.hpp"
#include "univariate.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

using steinlab::Error;
using steinlab::ErrorCode;

namespace {

thread_local std::string g_last_error;

int code_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return SL_ERR_INVALID_ARGUMENT;
        case ErrorCode::capacity: return SL_ERR_CAPACITY;
        case ErrorCode::numeric: return SL_ERR_NUMERIC;
        case ErrorCode::reducible: return SL_ERR_NUMERIC;
        case ErrorCode::config: return SL_ERR_CONFIG;
        case ErrorCode::io: return SL_ERR_IO;
    }
    return SL_ERR_UNKNOWN;
}

template <class F>
int guarded(F&& f) {
    try {
        f();
        return SL_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return code_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SL_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unrecognized failure";
        return SL_ERR_UNKNOWN;
    }
}

int null_argument(const char* what) {
    g_last_error = std::string(what) + " is null";
    return SL_ERR_INVALID_ARGUMENT;
}

void store(double* slot, double v) {
    if (slot) *slot = v;
}

}  // namespace

struct sl_config {
    std::string section;
    std::map<std::string, std::string> kv;
};

struct sl_run_result {
    steinlab::SweepResult res;
};

extern "C" {

const char* sl_version(void) { return "1.0.0"; }

const char* sl_last_error(void) { return g_last_error.c_str(); }

sl_config* sl_config_create(const char* section) {
    if (!section) {
        null_argument("section");
        return nullptr;
    }
    sl_config* cfg = nullptr;
    guarded([&] {
        steinlab::default_config(section);  // rejects unknown sections
        cfg = new sl_config{section, {}};
    });
    return cfg;
}

void sl_config_destroy(sl_config* cfg) { delete cfg; }

int sl_config_load_file(sl_config* cfg, const char* path) {
    if (!cfg) return null_argument("cfg");
    if (!path) return null_argument("path");
    return guarded([&] {
        auto kv = steinlab::parse_config_file(path);
        steinlab::make_config(cfg->section, kv);  // validate before merging
        for (auto& [k, v] : kv) cfg->kv[k] = v;
    });
}

int sl_config_set(sl_config* cfg, const char* key, const char* value) {
    if (!cfg) return null_argument("cfg");
    if (!key) return null_argument("key");
    if (!value) return null_argument("value");
    return guarded([&] {
        steinlab::make_config(cfg->section, {{key, value}});
        cfg->kv[key] = value;
    });
}

int sl_run(const sl_config* cfg, sl_run_result** out) {
    if (!cfg) return null_argument("cfg");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        steinlab::SweepResult res = steinlab::run_sweep(steinlab::make_config(cfg->section, cfg->kv));
        *out = new sl_run_result{std::move(res)};
    });
}

void sl_result_destroy(sl_run_result* res) { delete res; }

int sl_result_exit_code(const sl_run_result* res) { return res ? res->res.exit_code : 2; }

const char* sl_result_csv_path(const sl_run_result* res) {
    return res ? res->res.csv_path.c_str() : nullptr;
}

size_t sl_result_rows(const sl_run_result* res) { return res ? res->res.table.rows.size() : 0; }

size_t sl_result_cols(const sl_run_result* res) { return res ? res->res.table.columns.size() : 0; }

const char* sl_result_col_name(const sl_run_result* res, size_t col) {
    if (!res || col >= res->res.table.columns.size()) return nullptr;
    return res->res.table.columns[col].c_str();
}

double sl_result_cell(const sl_run_result* res, size_t row, size_t col) {
    if (!res || row >= res->res.table.rows.size() || col >= res->res.table.rows[row].size())
        return std::numeric_limits<double>::quiet_NaN();
    return res->res.table.rows[row][col];
}

size_t sl_result_messages(const sl_run_result* res) {
    return res ? res->res.messages.size() : 0;
}

const char* sl_result_message(const sl_run_result* res, size_t i) {
    if (!res || i >= res->res.messages.size()) return nullptr;
    return res->res.messages[i].c_str();
}

int sl_uni_identity(double lambda, int k, int n_max, double* d_tv, double* p_k, double* sup_dg,
                    double* rel_err) {
    return guarded([&] {
        const auto rep =
            steinlab::uni::check_distance_identity(steinlab::uni::make_problem(lambda, k, n_max));
        store(d_tv, rep.d_tv);
        store(p_k, rep.p_k);
        store(sup_dg, rep.sup);
        store(rel_err, rep.rel_err);
    });
}

int sl_uni_sup_delta_g(double lambda, int k, int n_max, double* out) {
    if (!out) return null_argument("out");
    return guarded([&] {
        const auto pr = steinlab::uni::make_problem(lambda, k, n_max);
        const auto pmf = steinlab::uni::poisson_pmf(lambda, pr.space);
        *out = steinlab::uni::sup_delta_g(lambda, pr.k, pmf);
    });
}

int sl_fit_rate(const double* lambda, const double* y, size_t n, double* c, double* p, int* q,
                double* rms) {
    if (!lambda) return null_argument("lambda");
    if (!y) return null_argument("y");
    return guarded([&] {
        const steinlab::RateFit fit = steinlab::fit_rate(std::vector<double>(lambda, lambda + n),
                                                         std::vector<double>(y, y + n));
        store(c, fit.c);
        store(p, fit.p);
        if (q) *q = fit.q;
        store(rms, fit.rms);
    });
}

}  // extern "C"
