#include "memdiscern/error.hpp"
#include "memdiscern/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace memdiscern {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::pair<double, double> range_of(const std::vector<double>& v) {
    if (v.empty()) {
        return {0.0, 1.0};
    }
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double a = *lo, b = *hi;
    if (!(b > a)) {
        const double pad = a == 0.0 ? 1.0 : 0.5 * std::abs(a);
        a -= pad;
        b += pad;
    }
    return {a, b};
}

}  // namespace

PlotFormat plot_format_from_string(const std::string& s) {
    if (s == "none") {
        return PlotFormat::None;
    }
    if (s == "svg") {
        return PlotFormat::SvgPolyline;
    }
    if (s == "csv") {
        return PlotFormat::CsvCurves;
    }
    fail(ErrorKind::Usage, "plot format '" + s + "' is not one of none, svg, csv");
}

Curve vi_curve(const Trace& trace, const std::string& name) {
    return Curve{name, "v_V", "i_A", trace.v, trace.i};
}

Curve it_curve(const Trace& trace, const std::string& name) {
    return Curve{name, "t_s", "i_A", trace.t, trace.i};
}

std::string render_csv(const Curve& c) {
    std::string out = c.x_label + "," + c.y_label + "\n";
    for (std::size_t k = 0; k < c.x.size() && k < c.y.size(); ++k) {
        out += format_double(c.x[k]);
        out += ',';
        out += format_double(c.y[k]);
        out += '\n';
    }
    return out;
}

std::string render_svg(const Curve& c) {
    const auto [x0, x1] = range_of(c.x);
    const auto [y0, y1] = range_of(c.y);
    const double pw = kWidth - 2.0 * kMargin;
    const double ph = kHeight - 2.0 * kMargin;
    auto px = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kHeight - kMargin - (y - y0) / (y1 - y0) * ph; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    s += "<title>" + escape_xml(c.name) + "</title>\n";
    // Axes along the plot frame, plus zero lines when they fall inside.
    s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    s += "<line x1=\"" + fixed(kMargin) + "\" y1=\"" + fixed(kHeight - kMargin) + "\" x2=\"" +
         fixed(kWidth - kMargin) + "\" y2=\"" + fixed(kHeight - kMargin) + "\"/>\n";
    s += "<line x1=\"" + fixed(kMargin) + "\" y1=\"" + fixed(kMargin) + "\" x2=\"" + fixed(kMargin) +
         "\" y2=\"" + fixed(kHeight - kMargin) + "\"/>\n";
    s += "</g>\n";
    s += "<g stroke=\"#999\" stroke-width=\"0.5\" stroke-dasharray=\"4 3\">\n";
    if (x0 < 0.0 && x1 > 0.0) {
        s += "<line x1=\"" + fixed(px(0.0)) + "\" y1=\"" + fixed(kMargin) + "\" x2=\"" + fixed(px(0.0)) +
             "\" y2=\"" + fixed(kHeight - kMargin) + "\"/>\n";
    }
    if (y0 < 0.0 && y1 > 0.0) {
        s += "<line x1=\"" + fixed(kMargin) + "\" y1=\"" + fixed(py(0.0)) + "\" x2=\"" +
             fixed(kWidth - kMargin) + "\" y2=\"" + fixed(py(0.0)) + "\"/>\n";
    }
    s += "</g>\n";
    s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<text x=\"" + fixed(kMargin) + "\" y=\"" + fixed(kHeight - kMargin + 16) + "\">" + label(x0) +
         "</text>\n";
    s += "<text x=\"" + fixed(kWidth - kMargin) + "\" y=\"" + fixed(kHeight - kMargin + 16) +
         "\" text-anchor=\"end\">" + label(x1) + "</text>\n";
    s += "<text x=\"" + fixed(kMargin - 4) + "\" y=\"" + fixed(kHeight - kMargin) +
         "\" text-anchor=\"end\">" + label(y0) + "</text>\n";
    s += "<text x=\"" + fixed(kMargin - 4) + "\" y=\"" + fixed(kMargin + 4) + "\" text-anchor=\"end\">" +
         label(y1) + "</text>\n";
    s += "<text x=\"" + fixed(kWidth / 2) + "\" y=\"" + fixed(kHeight - 16) + "\" text-anchor=\"middle\">" +
         escape_xml(c.x_label) + "</text>\n";
    s += "<text x=\"16\" y=\"" + fixed(kHeight / 2) + "\" transform=\"rotate(-90 16 " + fixed(kHeight / 2) +
         ")\" text-anchor=\"middle\">" + escape_xml(c.y_label) + "</text>\n";
    s += "</g>\n";
    s += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < c.x.size() && k < c.y.size(); ++k) {
        if (k > 0) {
            s += ' ';
        }
        s += fixed(px(c.x[k])) + "," + fixed(py(c.y[k]));
    }
    s += "\"/>\n</svg>\n";
    return s;
}

std::vector<std::filesystem::path> emit_report(const Json& report, const std::vector<Curve>& curves,
                                               const std::filesystem::path& path,
                                               PlotFormat plot_format) {
    std::vector<std::filesystem::path> written;
    write_file_atomic(path, report.dump(2) + "\n");
    written.push_back(path);
    if (plot_format == PlotFormat::None) {
        return written;
    }
    const std::string ext = plot_format == PlotFormat::SvgPolyline ? ".svg" : ".csv";
    for (const auto& curve : curves) {
        std::filesystem::path p = path;
        p.replace_filename(path.stem().string() + "." + curve.name + ext);
        write_file_atomic(p, plot_format == PlotFormat::SvgPolyline ? render_svg(curve) : render_csv(curve));
        written.push_back(p);
    }
    return written;
}

}  // namespace memdiscern
