#pragma once

#include "report.hpp"

#include <map>
#include <string>
#include <vector>

namespace steinlab {

// One study section: "uni" (birth-death chain on the integers), "multi"
// (product chain with a coupled pair of coordinates), "pp" (configuration
// chain over a carrier with two marked points).
struct SweepConfig {
    std::string section;
    std::vector<double> lambda_grid;
    int d = 2;                   // multi: number of coordinates
    std::vector<double> mu;      // multi: weights (default equal)
    int k = 0;                   // uni: perturbed state (0 = automatic)
    int s_size = 1;              // pp: carrier bulk size
    int n_ab_max = 6;            // pp: cap on each marked point
    int n_total_max = 0;         // pp: total cap (0 = automatic)
    std::vector<int> n_max;      // per-coordinate truncation (empty = automatic)
    unsigned long long seed = 12345;
    std::string out_dir = ".";
    bool no_plots = false;
    std::size_t max_states = 0;  // 0 = library default / STEIN_LAB_MAX_STATES
};

SweepConfig default_config(const std::string& section);

// Flat key=value files, '#' comments. Unknown keys are config errors.
std::map<std::string, std::string> parse_config_file(const std::string& path);
SweepConfig make_config(const std::string& section,
                        const std::map<std::string, std::string>& kv);

struct SweepResult {
    int exit_code = 0;
    std::string csv_path;
    std::vector<std::string> plot_paths;
    Table table;
    std::vector<std::string> messages;  // assertion failures and notes
};

SweepResult run_sweep(const SweepConfig& cfg);

}  // namespace steinlab
