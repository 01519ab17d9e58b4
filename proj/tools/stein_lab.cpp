#include <steinlab/steinlab.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>

namespace {

struct Options {
    std::string config_path;
    std::string lambda_grid;
    std::string out_dir;
    std::string seed;
    bool no_plots = false;
};

struct ConfigDeleter {
    void operator()(sl_config* cfg) const { sl_config_destroy(cfg); }
};

int fail_with_last_error() {
    std::fprintf(stderr, "error: %s\n", sl_last_error());
    return 2;
}

int run_section(const char* section, const Options& opt) {
    std::unique_ptr<sl_config, ConfigDeleter> cfg(sl_config_create(section));
    if (!cfg) return fail_with_last_error();
    if (!opt.config_path.empty() &&
        sl_config_load_file(cfg.get(), opt.config_path.c_str()) != SL_OK)
        return fail_with_last_error();
    // command-line flags override the config file
    if (!opt.lambda_grid.empty() &&
        sl_config_set(cfg.get(), "lambda_grid", opt.lambda_grid.c_str()) != SL_OK)
        return fail_with_last_error();
    if (!opt.out_dir.empty() && sl_config_set(cfg.get(), "out_dir", opt.out_dir.c_str()) != SL_OK)
        return fail_with_last_error();
    if (!opt.seed.empty() && sl_config_set(cfg.get(), "seed", opt.seed.c_str()) != SL_OK)
        return fail_with_last_error();
    if (opt.no_plots && sl_config_set(cfg.get(), "no_plots", "1") != SL_OK)
        return fail_with_last_error();

    sl_run_result* res = nullptr;
    if (sl_run(cfg.get(), &res) != SL_OK) return fail_with_last_error();
    std::printf("%s: %zu rows -> %s\n", section, sl_result_rows(res), sl_result_csv_path(res));
    const size_t messages = sl_result_messages(res);
    for (size_t i = 0; i < messages; ++i)
        std::fprintf(stderr, "FAILED %s\n", sl_result_message(res, i));
    if (messages == 0) std::printf("all row checks passed\n");
    const int exit_code = sl_result_exit_code(res);
    sl_result_destroy(res);
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perturbed immigration-death laboratory (library "
                 + std::string(sl_version()) + ")"};
    app.require_subcommand(1);

    Options opt;
    const char* sections[] = {"uni", "multi", "pp"};
    const char* about[] = {
        "birth-death chain on the integers, one perturbed state",
        "product chain with a coupled coordinate pair",
        "configuration chain over a carrier with two marked points",
    };
    for (int i = 0; i < 3; ++i) {
        CLI::App* sub = app.add_subcommand(sections[i], about[i]);
        sub->add_option("--config", opt.config_path, "key=value config file");
        sub->add_option("--lambda-grid", opt.lambda_grid,
                        "comma-separated lambda values, strictly increasing");
        sub->add_option("--out", opt.out_dir, "output directory (default .)");
        sub->add_option("--seed", opt.seed, "seed recorded with the run");
        sub->add_flag("--no-plots", opt.no_plots, "skip the svg plots");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    for (const char* section : sections)
        if (app.got_subcommand(section)) return run_section(section, opt);
    return 2;
}
