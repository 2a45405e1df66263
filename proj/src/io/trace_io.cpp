#include "memdiscern/error.hpp"
#include "memdiscern/io.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>

namespace memdiscern {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

// from_chars accepts "inf"/"nan", so non-finite values are caught later as data errors.
double parse_number(std::string_view field, std::size_t row, const std::string& origin) {
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec == std::errc::result_out_of_range) {
        return field.starts_with('-') ? -HUGE_VAL : HUGE_VAL;
    }
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::Format, origin + ": row " + std::to_string(row) + ": cannot parse number '" +
                                    std::string(field) + "'");
    }
    return v;
}

int parse_int(std::string_view field, std::size_t row, const std::string& origin) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::Format, origin + ": row " + std::to_string(row) + ": cannot parse integer '" +
                                    std::string(field) + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) {
        fail(ErrorKind::Io, "cannot format number");
    }
    return std::string(buf.data(), ptr);
}

Trace parse_trace_csv(std::string_view text, const std::string& origin) {
    Trace trace;
    bool dwell = false;
    bool header_seen = false;
    std::size_t row = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++row;
        if (!header_seen) {
            if (row == 1 && line.starts_with("\xEF\xBB\xBF")) {
                line.remove_prefix(3);
            }
            if (line == kTraceHeader) {
                dwell = false;
            } else if (line == kTraceHeaderDwell) {
                dwell = true;
            } else {
                fail(ErrorKind::Format, origin + ": header '" + std::string(line) + "' is not '" +
                                            std::string(kTraceHeader) + "' or '" +
                                            std::string(kTraceHeaderDwell) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) {
            if (pos > text.size()) {
                break;
            }
            continue;
        }
        const auto fields = split_commas(line);
        const std::size_t expected = dwell ? 5 : 3;
        if (fields.size() != expected) {
            fail(ErrorKind::Format, origin + ": row " + std::to_string(row) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(expected));
        }
        const double t = parse_number(fields[0], row, origin);
        const double v = parse_number(fields[1], row, origin);
        const double i = parse_number(fields[2], row, origin);
        if (!std::isfinite(t) || !std::isfinite(v) || !std::isfinite(i)) {
            fail(ErrorKind::Data, origin + ": row " + std::to_string(row) + " has a non-finite value");
        }
        if (!trace.empty() && !(t > trace.t.back())) {
            fail(ErrorKind::Data, origin + ": row " + std::to_string(row) +
                                      ": time is not strictly increasing");
        }
        trace.push_back(t, v, i);
        if (dwell) {
            trace.level_index.push_back(parse_int(fields[3], row, origin));
            trace.dwell_index.push_back(parse_int(fields[4], row, origin));
        }
    }
    if (!header_seen) {
        fail(ErrorKind::Format, origin + ": empty file, expected header '" + std::string(kTraceHeader) + "'");
    }
    validate(trace);
    return trace;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Trace ingest_trace(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) {
        fail(ErrorKind::Io, "trace file '" + path.string() + "' does not exist");
    }
    Trace trace = parse_trace_csv(read_file(path), path.string());
    const auto meta = sidecar_path(path);
    if (std::filesystem::is_regular_file(meta)) {
        Json j;
        try {
            j = Json::parse(read_file(meta));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::Format, meta.string() + ": " + e.what());
        }
        trace.meta = trace_meta_from_json(j);
    } else {
        trace.meta.device_id = path.stem().string();
    }
    return trace;
}

std::string trace_to_csv(const Trace& trace) {
    validate(trace);
    const bool dwell = trace.has_dwell_annotations();
    std::string out(dwell ? kTraceHeaderDwell : kTraceHeader);
    out += '\n';
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out += format_double(trace.t[k]);
        out += ',';
        out += format_double(trace.v[k]);
        out += ',';
        out += format_double(trace.i[k]);
        if (dwell) {
            out += ',';
            out += std::to_string(trace.level_index[k]);
            out += ',';
            out += std::to_string(trace.dwell_index[k]);
        }
        out += '\n';
    }
    return out;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
    write_file_atomic(path, trace_to_csv(trace));
    write_file_atomic(sidecar_path(path), to_json(trace.meta).dump(2) + "\n");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    const auto parent = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) +
           "_" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp, ec);
            fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot move output into place at '" + path.string() + "'");
    }
}

}  // namespace memdiscern
