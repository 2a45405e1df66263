#pragma once

#include "memdiscern/serialization.hpp"
#include "memdiscern/trace.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace memdiscern {

inline constexpr std::string_view kTraceHeader = "t_s,v_V,i_A";
inline constexpr std::string_view kTraceHeaderDwell = "t_s,v_V,i_A,level_index,dwell_index";

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// Reads the CSV contract; picks up `<stem>.meta.json` next to the file when present.
// Errors: Io (unreadable), Format (header, field count, unparsable number),
// Data (non-monotone time or non-finite value, with the 1-based file row).
Trace ingest_trace(const std::filesystem::path& path);
Trace parse_trace_csv(std::string_view text, const std::string& origin = "<memory>");

std::string trace_to_csv(const Trace& trace);
// Writes the CSV and its sidecar metadata, each atomically.
void write_trace(const Trace& trace, const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// Write to a temporary file in the same directory, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

enum class PlotFormat { None, SvgPolyline, CsvCurves };

PlotFormat plot_format_from_string(const std::string& s);  // none | svg | csv

// One plotted series. x/y labels double as CSV column headers.
struct Curve {
    std::string name;  // file-name suffix, e.g. "vi" or "iso_dwell_6"
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
};

Curve vi_curve(const Trace& trace, const std::string& name);
Curve it_curve(const Trace& trace, const std::string& name);

// Writes `report` as pretty JSON to `path`; with a plot format, each curve
// goes to `<stem>.<curve.name>.svg|csv` next to it. Returns every file written.
std::vector<std::filesystem::path> emit_report(const Json& report, const std::vector<Curve>& curves,
                                               const std::filesystem::path& path,
                                               PlotFormat plot_format);

std::string render_svg(const Curve& curve);
std::string render_csv(const Curve& curve);

}  // namespace memdiscern
