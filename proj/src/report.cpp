#include "report.hpp"

#include "error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace steinlab {

std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(const Table& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            fail(ErrorCode::invalid_argument, "row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_g12(row[i]);
        out << '\n';
    }
    for (const auto& line : table.footers) out << "# " << line << '\n';
    out.flush();
    if (!out) fail(ErrorCode::io, "write to " + path + " failed");
}

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
    double lx0 = 0.0, lx1 = 0.0, ly0 = 0.0, ly1 = 0.0;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            const double lx = std::log10(s.x[i]), ly = std::log10(s.y[i]);
            if (!any) {
                lx0 = lx1 = lx;
                ly0 = ly1 = ly;
                any = true;
            } else {
                lx0 = std::min(lx0, lx);
                lx1 = std::max(lx1, lx);
                ly0 = std::min(ly0, ly);
                ly1 = std::max(ly1, ly);
            }
        }
    }
    if (!any) {
        lx0 = ly0 = 0.0;
        lx1 = ly1 = 1.0;
    }
    if (lx1 - lx0 < 1e-9) lx0 -= 0.5, lx1 += 0.5;
    if (ly1 - ly0 < 1e-9) ly0 -= 0.5, ly1 += 0.5;
    const double padx = 0.05 * (lx1 - lx0), pady = 0.08 * (ly1 - ly0);
    lx0 -= padx;
    lx1 += padx;
    ly0 -= pady;
    ly1 += pady;

    const double w = 640, h = 440, ml = 80, mr = 20, mt = 40, mb = 55;
    const auto px = [&](double lx) { return ml + (lx - lx0) / (lx1 - lx0) * (w - ml - mr); };
    const auto py = [&](double ly) { return h - mb - (ly - ly0) / (ly1 - ly0) * (h - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << w / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
           "text-anchor=\"middle\">"
        << title << "</text>\n";

    // decade grid lines and tick labels
    for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
        const double x = px(e);
        svg << "<line x1=\"" << fmt6(x) << "\" y1=\"" << mt << "\" x2=\"" << fmt6(x) << "\" y2=\""
            << h - mb << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << fmt6(x) << "\" y=\"" << h - mb + 18
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e" << e
            << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
        const double y = py(e);
        svg << "<line x1=\"" << ml << "\" y1=\"" << fmt6(y) << "\" x2=\"" << w - mr << "\" y2=\""
            << fmt6(y) << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << ml - 6 << "\" y=\"" << fmt6(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" << e
            << "</text>\n";
    }
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\""
        << h - mt - mb << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << xlabel
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 "
        << (mt + h - mb) / 2 << ")\">" << ylabel << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            pts << fmt6(px(std::log10(s.x[i]))) << ',' << fmt6(py(std::log10(s.y[i]))) << ' ';
        }
        svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            svg << "<circle cx=\"" << fmt6(px(std::log10(s.x[i]))) << "\" cy=\""
                << fmt6(py(std::log10(s.y[i]))) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = mt + 16 + 16 * static_cast<double>(si);
        svg << "<rect x=\"" << w - mr - 150 << "\" y=\"" << ly - 9
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << w - mr - 135 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
    out << svg.str();
    out.flush();
    if (!out) fail(ErrorCode::io, "write to " + path + " failed");
}

}  // namespace steinlab
