#include "sweep.hpp"

#include "error.hpp"
#include "multivariate.hpp"
#include "point_process.hpp"
#include "rate_fit.hpp"
#include "univariate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <thread>

namespace fs = std::filesystem;

namespace steinlab {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end || !std::isfinite(v))
        fail(ErrorCode::config, "bad numeric value '" + text + "' for " + key);
    return v;
}

long long parse_int(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end) fail(ErrorCode::config, "bad integer '" + text + "' for " + key);
    return v;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& text, Parse parse) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        const std::string item = trim(text.substr(pos, comma - pos));
        if (item.empty()) fail(ErrorCode::config, "empty list entry for " + key);
        out.push_back(parse(key, item));
        pos = comma + 1;
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    fail(ErrorCode::config, "bad boolean '" + text + "' for " + key);
}

void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) fail(ErrorCode::config, "lambda_grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) fail(ErrorCode::config, "lambda_grid entries must be positive");
        if (i && !(grid[i] > grid[i - 1]))
            fail(ErrorCode::config, "lambda_grid must be strictly increasing");
    }
}

std::size_t resolve_max_states(std::size_t configured) {
    if (configured) return configured;
    if (const char* env = std::getenv("STEIN_LAB_MAX_STATES")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end || v == 0)
            fail(ErrorCode::config, "STEIN_LAB_MAX_STATES must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    return kDefaultMaxStates;
}

// Rows are independent, so batches of them run through std::async; results are
// gathered in grid order and any worker exception resurfaces here.
template <class Row, class MakeRow>
std::vector<Row> collect(const std::vector<double>& grid, MakeRow make_row) {
    const unsigned workers = std::max(1u, std::min(2u, std::thread::hardware_concurrency()));
    std::vector<Row> rows(grid.size());
    for (std::size_t base = 0; base < grid.size(); base += workers) {
        const std::size_t stop = std::min(grid.size(), base + std::size_t{workers});
        std::vector<std::future<Row>> batch;
        for (std::size_t i = base; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, make_row, grid[i]));
        for (std::size_t i = base; i < stop; ++i) rows[i] = batch[i - base].get();
    }
    return rows;
}

std::string row_tag(const std::string& section, double lambda) {
    return section + " lambda=" + format_g12(lambda);
}

void add_fit(Table& table, const std::string& label, const std::vector<double>& lambda,
             const std::vector<double>& y) {
    try {
        const RateFit f = fit_rate(lambda, y);
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "fit %s: y ~ c (log lambda)^q / lambda^p with c=%.4g p=%.4f q=%d (rms %.3g, other q %.3g)",
                      label.c_str(), f.c, f.p, f.q, f.rms, f.rms_alt);
        table.footers.push_back(buf);
    } catch (const Error& e) {
        table.footers.push_back("fit " + label + ": skipped (" + e.what() + ")");
    }
}

void add_spread(Table& table, const std::string& label, const std::vector<double>& values) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double v : values) {
        if (!std::isfinite(v) || v <= 0.0) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    char buf[200];
    if (!(hi > 0.0) || !std::isfinite(lo)) {
        table.footers.push_back("spread " + label + ": undefined");
        return;
    }
    std::snprintf(buf, sizeof buf, "spread %s: max/min - 1 = %.1f%% (min %.6g, max %.6g)",
                  label.c_str(), 100.0 * (hi / lo - 1.0), lo, hi);
    table.footers.push_back(buf);
}

// c (log lambda)^q / lambda^p pinned to the first usable data point, as a
// visual guide next to the measured series.
std::vector<double> reference_curve(const std::vector<double>& lambda,
                                    const std::vector<double>& y, double p, int q) {
    std::vector<double> out(lambda.size(), std::numeric_limits<double>::quiet_NaN());
    double c = 0.0;
    bool have_c = false;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const double shape =
            (q ? std::log(lambda[i]) : 1.0) / std::pow(lambda[i], p);
        if (!have_c && y[i] > 0.0 && std::isfinite(y[i]) && shape > 0.0) {
            c = y[i] / shape;
            have_c = true;
        }
        if (have_c && shape > 0.0) out[i] = c * shape;
    }
    return out;
}

void finish(SweepResult& res, const SweepConfig& cfg, std::vector<std::string> failures,
            double max_leak, double max_tail) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "max truncation leak %.3g, max tail mass %.3g", max_leak,
                  max_tail);
    res.table.footers.push_back(buf);
    if (failures.empty()) {
        res.table.footers.push_back("row checks: all passed");
    } else {
        for (const auto& f : failures) res.table.footers.push_back("FAILED " + f);
        res.exit_code = 1;
    }
    res.messages = std::move(failures);
    res.csv_path = (fs::path(cfg.out_dir) / (cfg.section + "_sweep.csv")).string();
    write_csv(res.table, res.csv_path);
}

void add_plot(SweepResult& res, const SweepConfig& cfg, const std::string& name,
              const std::string& title, const std::string& ylabel,
              const std::vector<Series>& series) {
    if (cfg.no_plots) return;
    const std::string path = (fs::path(cfg.out_dir) / name).string();
    write_loglog_svg(path, title, "lambda", ylabel, series);
    res.plot_paths.push_back(path);
}

SweepResult run_uni(const SweepConfig& cfg, std::size_t max_states) {
    SweepResult res;
    res.table.columns = {"lambda",           "k",    "n_max", "p_k",          "d_tv",
                         "sup_dg",           "identity_rel_err", "leak",  "tail",
                         "dtv_lambda32",     "p_sqrt_lambda",    "sup_lambda"};
    const int k = cfg.k;
    const int n_max = cfg.n_max.empty() ? 0 : cfg.n_max.front();
    const auto rows = collect<uni::RateRow>(cfg.lambda_grid, [k, n_max, max_states](double l) {
        return uni::rate_row(uni::make_problem(l, k, n_max, max_states));
    });

    std::vector<std::string> failures;
    std::vector<double> lam, dtv, sup, dtv32, psq;
    double max_leak = 0.0, max_tail = 0.0;
    for (const auto& r : rows) {
        res.table.rows.push_back({r.lambda, double(r.k), double(r.n_max), r.p_k, r.d_tv, r.sup_dg,
                                  r.rel_err, r.leak, r.tail, r.dtv_l32, r.p_sqrtl, r.sup_l});
        lam.push_back(r.lambda);
        dtv.push_back(r.d_tv);
        sup.push_back(r.sup_dg);
        dtv32.push_back(r.dtv_l32);
        psq.push_back(r.p_sqrtl);
        max_leak = std::max(max_leak, r.leak);
        max_tail = std::max(max_tail, r.tail);
        if (!(r.rel_err <= 1e-8))
            failures.push_back(row_tag("uni", r.lambda) + ": identity_rel_err " +
                               format_g12(r.rel_err) + " exceeds 1e-8");
    }
    res.table.footers.push_back("section uni, seed " + std::to_string(cfg.seed));
    add_fit(res.table, "d_tv (expect p near 3/2, q=0)", lam, dtv);
    add_fit(res.table, "sup_dg (expect p near 1, q=0)", lam, sup);
    add_spread(res.table, "d_tv * lambda^(3/2)", dtv32);
    add_spread(res.table, "p_k * sqrt(lambda)", psq);
    finish(res, cfg, std::move(failures), max_leak, max_tail);

    add_plot(res, cfg, "uni_distance_rate.svg", "distance at the perturbed state", "d_tv",
             {{"d_tv", lam, dtv}, {"c / lambda^(3/2)", lam, reference_curve(lam, dtv, 1.5, 0)}});
    add_plot(res, cfg, "uni_smoothness_rate.svg", "solution-difference sup", "sup |g(k+1)-g(k)|",
             {{"sup_dg", lam, sup}, {"c / lambda", lam, reference_curve(lam, sup, 1.0, 0)}});
    return res;
}

SweepResult run_multi(const SweepConfig& cfg, std::size_t max_states) {
    if (cfg.d < 2) fail(ErrorCode::config, "multi needs d >= 2");
    Eigen::VectorXd mu;
    if (cfg.mu.empty()) {
        mu = Eigen::VectorXd::Constant(cfg.d, 1.0 / cfg.d);
    } else {
        if (cfg.mu.size() != static_cast<std::size_t>(cfg.d))
            fail(ErrorCode::config, "mu needs exactly d entries");
        mu = Eigen::Map<const Eigen::VectorXd>(cfg.mu.data(), cfg.d);
    }
    std::vector<int> n_max = cfg.n_max;
    if (n_max.size() == 1) n_max.assign(static_cast<std::size_t>(cfg.d), n_max.front());
    if (!n_max.empty() && n_max.size() != static_cast<std::size_t>(cfg.d))
        fail(ErrorCode::config, "n_max needs 1 or d entries");

    SweepResult res;
    res.table.columns = {"lambda", "states",  "p",       "d_tv", "sup_dg12", "identity_rel_err",
                         "lower",  "upper",   "applicable", "ratio", "sym_err",  "mean_err",
                         "leak",   "tail"};
    const auto rows = collect<multi::RateRow>(cfg.lambda_grid, [mu, n_max, max_states](double l) {
        return multi::rate_row(multi::make_problem(l, mu, n_max, max_states));
    });

    std::vector<std::string> failures;
    std::vector<double> lam, dtv_over_p, supv, lower, upper, ratio;
    double max_leak = 0.0, max_tail = 0.0;
    for (const auto& r : rows) {
        res.table.rows.push_back({r.lambda, double(r.states), r.p, r.d_tv, r.sup, r.rel_err,
                                  r.lower, r.upper, r.applicable ? 1.0 : 0.0, r.ratio, r.sym_err,
                                  r.mean_err, r.leak, r.tail});
        lam.push_back(r.lambda);
        dtv_over_p.push_back(r.d_tv / r.p);
        supv.push_back(r.sup);
        lower.push_back(r.lower);
        upper.push_back(r.upper);
        ratio.push_back(r.ratio);
        max_leak = std::max(max_leak, r.leak);
        max_tail = std::max(max_tail, r.tail);
        const std::string tag = row_tag("multi", r.lambda);
        if (!(r.rel_err <= 1e-8))
            failures.push_back(tag + ": identity_rel_err " + format_g12(r.rel_err) +
                               " exceeds 1e-8");
        if (!(r.sym_err <= 1e-10))
            failures.push_back(tag + ": sym_err " + format_g12(r.sym_err) + " exceeds 1e-10");
        if (!(r.mean_err <= 1e-8))
            failures.push_back(tag + ": mean_err " + format_g12(r.mean_err) + " exceeds 1e-8");
        if (r.applicable && !(r.sup >= r.lower * (1.0 - 1e-12)))
            failures.push_back(tag + ": sup_dg12 " + format_g12(r.sup) + " below the guarantee " +
                               format_g12(r.lower));
        if (!(r.sup <= r.upper * (1.0 + 1e-12)))
            failures.push_back(tag + ": sup_dg12 " + format_g12(r.sup) + " above the bound " +
                               format_g12(r.upper));
    }
    res.table.footers.push_back("section multi, seed " + std::to_string(cfg.seed));
    add_fit(res.table, "d_tv/p (expect p near 1, q=1)", lam, dtv_over_p);
    add_spread(res.table, "d_tv * lambda / (p log lambda)", ratio);
    finish(res, cfg, std::move(failures), max_leak, max_tail);

    add_plot(res, cfg, "multi_distance_rate.svg", "distance-to-mass ratio", "d_tv / p",
             {{"d_tv / p", lam, dtv_over_p},
              {"c log(lambda)/lambda", lam, reference_curve(lam, dtv_over_p, 1.0, 1)}});
    add_plot(res, cfg, "multi_smoothness_rate.svg", "second difference at the corner",
             "sup |D12 g|",
             {{"sup_dg12", lam, supv}, {"guarantee", lam, lower}, {"bound", lam, upper}});
    return res;
}

SweepResult run_pp(const SweepConfig& cfg, std::size_t max_states) {
    SweepResult res;
    res.table.columns = {"lambda",     "states",        "p",
                         "v00",        "v01",           "v10",
                         "v11",        "v_star",        "bound",
                         "stein_rel_err", "count_tv",   "count_sup",
                         "count_rel_err", "count_ratio", "v_ratio",
                         "proxy_over_count", "d2",      "d2_gap",
                         "d2_lo",      "d2_hi",         "sym_err",
                         "leak",       "tail"};
    const int s_size = cfg.s_size, n_total = cfg.n_total_max, n_ab = cfg.n_ab_max;
    const auto rows =
        collect<pp::RateRow>(cfg.lambda_grid, [s_size, n_total, n_ab, max_states](double l) {
            return pp::rate_row(pp::make_problem(l, s_size, n_total, n_ab, max_states), true);
        });

    std::vector<std::string> failures;
    std::vector<double> lam, v00, v01, v10, v11, vstar, bound, ctv_over_p, v_ratio, c_ratio;
    double max_leak = 0.0, max_tail = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        res.table.rows.push_back({r.lambda,   double(r.states), r.p,          r.v00,
                                  r.v01,      r.v10,            r.v11,        r.v_star,
                                  r.bound,    r.stein_rel_err,  r.count_tv,   r.count_sup,
                                  r.count_rel_err, r.count_ratio, r.v_ratio,  r.proxy_over_count,
                                  r.d2,       r.d2_gap,         r.d2_lo,      r.d2_hi,
                                  r.sym_err,  r.leak,           r.tail});
        lam.push_back(r.lambda);
        v00.push_back(r.v00);
        v01.push_back(r.v01);
        v10.push_back(r.v10);
        v11.push_back(r.v11);
        vstar.push_back(r.v_star);
        bound.push_back(r.bound);
        ctv_over_p.push_back(r.count_tv / r.p);
        v_ratio.push_back(r.v_ratio);
        c_ratio.push_back(r.count_ratio);
        max_leak = std::max(max_leak, r.leak);
        max_tail = std::max(max_tail, r.tail);
        const std::string tag = row_tag("pp", r.lambda);
        if (!r.bound_ok)
            failures.push_back(tag + ": v_star " + format_g12(r.v_star) + " above the bound " +
                               format_g12(r.bound));
        if (!(r.stein_rel_err <= 1e-8))
            failures.push_back(tag + ": stein_rel_err " + format_g12(r.stein_rel_err) +
                               " exceeds 1e-8");
        if (!(r.count_rel_err <= 1e-6))
            failures.push_back(tag + ": count_rel_err " + format_g12(r.count_rel_err) +
                               " exceeds 1e-6");
        if (!(r.sym_err <= 1e-10))
            failures.push_back(tag + ": sym_err " + format_g12(r.sym_err) + " exceeds 1e-10");
        if (i && !(r.proxy_over_count > rows[i - 1].proxy_over_count))
            failures.push_back(tag + ": proxy_over_count " + format_g12(r.proxy_over_count) +
                               " not increasing");
        if (std::isfinite(r.d2) &&
            !(r.d2 >= r.d2_lo * (1.0 - 1e-9) && r.d2 <= r.d2_hi * (1.0 + 1e-12)))
            failures.push_back(tag + ": d2 " + format_g12(r.d2) + " outside [" +
                               format_g12(r.d2_lo) + ", " + format_g12(r.d2_hi) + "]");
    }
    res.table.footers.push_back("section pp, seed " + std::to_string(cfg.seed));
    add_fit(res.table, "v_star (expect p near 1, q=1)", lam, vstar);
    add_fit(res.table, "count_tv/p (expect p near 1, q=0)", lam, ctv_over_p);
    add_spread(res.table, "v_star * lambda / log lambda", v_ratio);
    add_spread(res.table, "count_tv * lambda / p", c_ratio);
    finish(res, cfg, std::move(failures), max_leak, max_tail);

    add_plot(res, cfg, "pp_smoothness_rate.svg", "pair difference per test function",
             "|D_ab g_h|",
             {{"v00", lam, v00},
              {"v01", lam, v01},
              {"v10", lam, v10},
              {"v11", lam, v11},
              {"bound", lam, bound}});
    add_plot(res, cfg, "pp_count_rate.svg", "scaled rates", "ratio",
             {{"count_tv * lambda / p", lam, c_ratio},
              {"v_star * lambda / log(lambda)", lam, v_ratio}});
    return res;
}

}  // namespace

SweepConfig default_config(const std::string& section) {
    SweepConfig cfg;
    cfg.section = section;
    if (section == "uni")
        cfg.lambda_grid = {25, 50, 100, 200, 400};
    else if (section == "multi")
        cfg.lambda_grid = {8, 16, 32, 64};
    else if (section == "pp")
        cfg.lambda_grid = {16, 32, 64, 128};
    else
        fail(ErrorCode::config, "unknown section '" + section + "' (expected uni, multi or pp)");
    return cfg;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::config, "config line without '=': " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

SweepConfig make_config(const std::string& section,
                        const std::map<std::string, std::string>& kv) {
    SweepConfig cfg = default_config(section);
    for (const auto& [key, value] : kv) {
        if (key == "lambda_grid")
            cfg.lambda_grid = parse_list<double>(key, value, parse_double);
        else if (key == "d")
            cfg.d = static_cast<int>(parse_int(key, value));
        else if (key == "mu")
            cfg.mu = parse_list<double>(key, value, parse_double);
        else if (key == "k")
            cfg.k = static_cast<int>(parse_int(key, value));
        else if (key == "s_size")
            cfg.s_size = static_cast<int>(parse_int(key, value));
        else if (key == "n_ab_max")
            cfg.n_ab_max = static_cast<int>(parse_int(key, value));
        else if (key == "n_total_max")
            cfg.n_total_max = static_cast<int>(parse_int(key, value));
        else if (key == "n_max")
            cfg.n_max = parse_list<int>(key, value, [](const std::string& k, const std::string& v) {
                return static_cast<int>(parse_int(k, v));
            });
        else if (key == "seed")
            cfg.seed = static_cast<unsigned long long>(parse_int(key, value));
        else if (key == "out_dir")
            cfg.out_dir = value;
        else if (key == "no_plots")
            cfg.no_plots = parse_bool(key, value);
        else if (key == "max_states") {
            const long long v = parse_int(key, value);
            if (v <= 0) fail(ErrorCode::config, "max_states must be positive");
            cfg.max_states = static_cast<std::size_t>(v);
        } else
            fail(ErrorCode::config, "unknown config key '" + key + "'");
    }
    validate_grid(cfg.lambda_grid);
    return cfg;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    validate_grid(cfg.lambda_grid);
    const std::size_t max_states = resolve_max_states(cfg.max_states);
    std::error_code ec;
    fs::create_directories(fs::path(cfg.out_dir), ec);
    if (ec) fail(ErrorCode::io, "cannot create " + cfg.out_dir + ": " + ec.message());
    if (cfg.section == "uni") return run_uni(cfg, max_states);
    if (cfg.section == "multi") return run_multi(cfg, max_states);
    if (cfg.section == "pp") return run_pp(cfg, max_states);
    fail(ErrorCode::config, "unknown section '" + cfg.section + "'");
}

}  // namespace steinlab
