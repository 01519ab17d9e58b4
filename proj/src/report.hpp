#pragma once

#include <string>
#include <vector>

namespace steinlab {

// Shortest %.12g rendering; used everywhere numbers reach a file so reruns
// are byte-identical.
std::string format_g12(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> footers;  // emitted as '# ...' comment lines
};

void write_csv(const Table& table, const std::string& path);

struct Series {
    std::string name;
    std::vector<double> x, y;
};

// Log-log scatter/line plot; points with nonpositive coordinates are skipped.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series);

}  // namespace steinlab
