#include "qbd/svg.hpp"

#include "qbd/error.hpp"

#include <algorithm>
#include <cstdio>

namespace qbd {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

struct Frame {
    double left, top, width, height;
    double t0, t1;

    double x(double t) const { return left + (t1 > t0 ? (t - t0) / (t1 - t0) : 0.0) * width; }
    double y(double v) const { return top + (1.0 - std::clamp(v, 0.0, 1.0)) * height; }
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_plot(const RunOutput& run, const PlotStyle& style) {
    if (run.rows.empty()) fail(ErrorCode::EmptyInput, "render_plot: run has no rows");
    if (style.width < 200 || style.height < 150) fail(ErrorCode::InvalidArgument, "render_plot: viewport too small");

    const Frame f{70.0, 40.0, style.width - 100.0, style.height - 100.0, run.rows.front().t, run.rows.back().t};

    const std::size_t n = run.rows.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + style.max_points - 1) / std::max<std::size_t>(1, style.max_points));
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; k += stride) idx.push_back(k);
    if (idx.back() != n - 1) idx.push_back(n - 1);

    auto polyline = [&](double RunRow::*field, const char* colour, const char* dash, double width) {
        std::string pts;
        for (std::size_t k : idx) {
            if (!pts.empty()) pts += ' ';
            pts += num(f.x(run.rows[k].t)) + "," + num(f.y(run.rows[k].*field));
        }
        std::string s = "  <polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"" + num(width) + "\"";
        if (*dash) s += " stroke-dasharray=\"" + std::string(dash) + "\"";
        return s + " points=\"" + pts + "\"/>\n";
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
           "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
           std::to_string(style.height) + "\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" +
           std::to_string(style.height) + "\" fill=\"white\"/>\n";
    if (!style.title.empty())
        svg += "  <text x=\"" + num(f.left + f.width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               escape(style.title) + "</text>\n";

    // axes and ticks
    svg += "  <g stroke=\"black\" stroke-width=\"1\">\n";
    svg += "    <line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top + f.height) + "\" x2=\"" + num(f.left + f.width) +
           "\" y2=\"" + num(f.top + f.height) + "\"/>\n";
    svg += "    <line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) + "\" y2=\"" +
           num(f.top + f.height) + "\"/>\n";
    svg += "  </g>\n";
    svg += "  <g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        svg += "    <line x1=\"" + num(f.left - 5) + "\" y1=\"" + num(f.y(v)) + "\" x2=\"" + num(f.left) + "\" y2=\"" +
               num(f.y(v)) + "\" stroke=\"black\"/>\n";
        svg += "    <text x=\"" + num(f.left - 8) + "\" y=\"" + num(f.y(v) + 4) + "\" text-anchor=\"end\">" + num(v).substr(0, 3) +
               "</text>\n";
    }
    for (int i = 0; i <= 8; ++i) {
        const double t = f.t0 + (f.t1 - f.t0) * i / 8.0;
        char label[32];
        std::snprintf(label, sizeof label, "%g", t);
        svg += "    <line x1=\"" + num(f.x(t)) + "\" y1=\"" + num(f.top + f.height) + "\" x2=\"" + num(f.x(t)) + "\" y2=\"" +
               num(f.top + f.height + 5) + "\" stroke=\"black\"/>\n";
        svg += "    <text x=\"" + num(f.x(t)) + "\" y=\"" + num(f.top + f.height + 20) + "\" text-anchor=\"middle\">" +
               label + "</text>\n";
    }
    svg += "    <text x=\"" + num(f.left + f.width / 2) + "\" y=\"" + num(f.top + f.height + 42) +
           "\" text-anchor=\"middle\">t</text>\n";
    svg += "  </g>\n";

    svg += polyline(&RunRow::prob_ideal, "black", "8,5", 1.5);
    svg += polyline(&RunRow::prob_s2_plus, "blue", "", 1.5);
    svg += polyline(&RunRow::fidelity, "red", "2,3", 2.0);

    // legend
    const double lx = f.left + f.width - 190, ly = f.top + 10;
    svg += "  <g font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "    <rect x=\"" + num(lx - 8) + "\" y=\"" + num(ly - 6) + "\" width=\"190\" height=\"64\" fill=\"white\" stroke=\"gray\"/>\n";
    const char* names[] = {"fidelity", "P(S2 = +1)", "P(S2 = +1), ideal"};
    const char* colours[] = {"red", "blue", "black"};
    const char* dashes[] = {"2,3", "", "8,5"};
    for (int i = 0; i < 3; ++i) {
        const double y = ly + 8 + 18 * i;
        svg += "    <line x1=\"" + num(lx) + "\" y1=\"" + num(y) + "\" x2=\"" + num(lx + 30) + "\" y2=\"" + num(y) +
               "\" stroke=\"" + colours[i] + "\" stroke-width=\"2\"" +
               (*dashes[i] ? std::string(" stroke-dasharray=\"") + dashes[i] + "\"" : std::string()) + "/>\n";
        svg += "    <text x=\"" + num(lx + 38) + "\" y=\"" + num(y + 4) + "\">" + escape(names[i]) + "</text>\n";
    }
    svg += "  </g>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace qbd
