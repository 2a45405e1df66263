#include "test_util.hpp"

#include "memdiscern/analysis.hpp"
#include "memdiscern/io.hpp"
#include "memdiscern/simulator.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>

using namespace memdiscern;
namespace fs = std::filesystem;

TEST(TraceCsv, MinimalFile) {
    const auto tr = parse_trace_csv("t_s,v_V,i_A\n0,0.1,1e-9\n0.1,0.1,9e-10\n0.2,0.1,8.5e-10\n");
    ASSERT_EQ(tr.size(), 3u);
    EXPECT_DOUBLE_EQ(tr.t[1], 0.1);
    EXPECT_DOUBLE_EQ(tr.i[2], 8.5e-10);
    EXPECT_FALSE(tr.has_dwell_annotations());
}

TEST(TraceCsv, DwellColumns) {
    const auto tr = parse_trace_csv("t_s,v_V,i_A,level_index,dwell_index\n0,0,0,0,1\n1,0,0,0,2\n");
    ASSERT_TRUE(tr.has_dwell_annotations());
    EXPECT_EQ(tr.dwell_index[1], 2);
}

TEST(TraceCsv, BadHeaderNamesContract) {
    std::string msg;
    EXPECT_EQ(testutil::error_kind_of([&] { parse_trace_csv("time,volts,amps\n0,0,0\n"); }, &msg), ErrorKind::Format);
    EXPECT_NE(msg.find("t_s,v_V,i_A"), std::string::npos) << msg;
}

TEST(TraceCsv, RowErrorsCarryRowNumber) {
    std::string msg;
    EXPECT_EQ(testutil::error_kind_of([&] { parse_trace_csv("t_s,v_V,i_A\n0,0,0\n0.2,0,0\n0.1,0,0\n"); }, &msg),
              ErrorKind::Data);
    EXPECT_NE(msg.find("row 4"), std::string::npos) << msg;

    EXPECT_EQ(testutil::error_kind_of([&] { parse_trace_csv("t_s,v_V,i_A\n0,0,0\n0.1,nan,0\n"); }, &msg),
              ErrorKind::Data);
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;

    EXPECT_ERROR_KIND(parse_trace_csv("t_s,v_V,i_A\n0,0\n"), ErrorKind::Format);
    EXPECT_ERROR_KIND(parse_trace_csv("t_s,v_V,i_A\n0,zero,0\n"), ErrorKind::Format);
}

TEST(TraceCsv, RoundTripIsBitIdentical) {
    testutil::ScratchDir dir;
    CircuitTopology topo = CircuitTopology::memristor_only({});
    topo.c_parallel = 1e-6;
    topo.r_series = 1000.0;
    Trace tr = simulate(topo, build_schedule(WaveformSpec::stepped_triangle(-1.0, 1.0, 0.25, 5, 1e-3)), 7);
    add_current_noise(tr, 0.01, 1e-12, 9);
    tr.meta.device_id = "dev-7";
    tr.meta.electrode_width_mm = 0.25;

    const fs::path path = dir / "dev7.csv";
    write_trace(tr, path);
    ASSERT_TRUE(fs::exists(sidecar_path(path)));
    EXPECT_EQ(sidecar_path(path).filename(), "dev7.meta.json");

    const Trace back = ingest_trace(path);
    ASSERT_EQ(back.size(), tr.size());
    EXPECT_EQ(std::memcmp(back.t.data(), tr.t.data(), tr.size() * sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(back.v.data(), tr.v.data(), tr.size() * sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(back.i.data(), tr.i.data(), tr.size() * sizeof(double)), 0);
    EXPECT_EQ(back.level_index, tr.level_index);
    EXPECT_EQ(back.dwell_index, tr.dwell_index);
    EXPECT_EQ(back.meta.device_id, "dev-7");
    EXPECT_EQ(back.meta.electrode_width_mm, 0.25);
    EXPECT_EQ(back.meta.source, TraceSource::Simulated);
    ASSERT_TRUE(back.meta.topology);
    EXPECT_DOUBLE_EQ(back.meta.topology->r_series, 1000.0);
}

TEST(TraceCsv, MissingSidecarUsesStem) {
    testutil::ScratchDir dir;
    write_file_atomic(dir / "plain.csv", "t_s,v_V,i_A\n0,0,0\n1,0,0\n");
    EXPECT_EQ(ingest_trace(dir / "plain.csv").meta.device_id, "plain");
    EXPECT_ERROR_KIND(ingest_trace(dir / "absent.csv"), ErrorKind::Io);
}

TEST(FormatDouble, Shortest) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1e-9), "1e-09");
    for (double x : {1.0 / 3.0, 2.718281828459045e-7, -123456.789, 5e-324}) {
        EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
    }
}

TEST(Json, WaveformRoundTrip) {
    auto spec = WaveformSpec::stepped_triangle(-0.5, 1.5, 0.25, 7, 2e-3, 0.3);
    spec.polarity_first = Polarity::NegativeFirst;
    const auto back = waveform_spec_from_json(to_json(spec));
    EXPECT_EQ(back.kind, spec.kind);
    EXPECT_EQ(back.v_step, spec.v_step);
    EXPECT_EQ(back.dwell_steps, 7);
    EXPECT_EQ(back.polarity_first, Polarity::NegativeFirst);
    EXPECT_EQ(to_json(back), to_json(spec));
}

TEST(Json, StrictReaders) {
    EXPECT_ERROR_KIND(waveform_spec_from_json(Json::parse(R"({"kind":"Sine","amplitude":1,"period":1,"dt":0.01,"colour":1})")),
                      ErrorKind::Format);
    EXPECT_ERROR_KIND(waveform_spec_from_json(Json::parse(R"({"amplitude":1})")), ErrorKind::Format);
    EXPECT_ERROR_KIND(waveform_spec_from_json(Json::parse(R"({"kind":"Square","dt":0.1})")), ErrorKind::Format);
    EXPECT_ERROR_KIND(waveform_spec_from_json(Json::parse(R"({"kind":"Sine","amplitude":"big","period":1,"dt":0.1})")),
                      ErrorKind::Format);
    EXPECT_ERROR_KIND(topology_from_json(Json::parse(R"({"c_parallel":1e-6,"r_leak":-1})")), ErrorKind::Validation);
}

TEST(Json, TopologyAndSpikeRoundTrip) {
    MemristorParams m;
    m.window_kind = WindowKind::BoundaryBiolekStyle;
    m.k = 3e3;
    CircuitTopology t = CircuitTopology::memristor_only(m);
    t.c_parallel = 4e-9;
    t.r_leak = 1e7;
    const auto back = topology_from_json(to_json(t));
    ASSERT_TRUE(back.memristor);
    EXPECT_EQ(back.memristor->window_kind, WindowKind::BoundaryBiolekStyle);
    EXPECT_EQ(back.r_leak, 1e7);
    EXPECT_EQ(to_json(back), to_json(t));

    const auto s = SpikeModel::power_law(1e-9, 0.5, 1e-11, 0.1);
    EXPECT_EQ(to_json(spike_model_from_json(to_json(s))), to_json(s));
}

TEST(Json, FingerprintHasAllFields) {
    FingerprintReport r;
    r.asymmetry = std::numeric_limits<double>::infinity();
    r.crossing_offsets = {1e-9, -1e-9};
    const Json j = to_json(r);
    for (const char* key : {"crossing_offsets", "pinched", "lobe_area_pos", "lobe_area_neg", "asymmetry", "curve_class"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_TRUE(j["asymmetry"].is_null());
    EXPECT_EQ(j["crossing_offsets"].size(), 2u);
    EXPECT_EQ(j["curve_class"], "Unclassified");
}

TEST(Json, FitResultRoundTrip) {
    FitResult f;
    f.model_kind = ModelKind::RcCircuit;
    f.params = {{"r_leak", 1e4}, {"c_parallel", 1e-6}};
    f.free_params = {"c_parallel"};
    f.ssr = 1.5e-20;
    f.n_points = 42;
    f.converged = true;
    f.iterations = 9;
    const auto back = fit_result_from_json(to_json(f));
    EXPECT_EQ(to_json(back), to_json(f));
}

TEST(Report, CsvCurvesWriteOneFilePerCurve) {
    testutil::ScratchDir dir;
    const auto trace = simulate(CircuitTopology::resistor(100.0), build_schedule(WaveformSpec::sine(1.0, 1.0, 0.1)), 1);
    const std::vector<Curve> curves{vi_curve(trace, "vi"), vi_curve(trace, "iso_dwell_1"),
                                    vi_curve(trace, "iso_dwell_6"), vi_curve(trace, "iso_dwell_12")};
    const auto written = emit_report(Json{{"ok", true}}, curves, dir / "report.json", PlotFormat::CsvCurves);
    EXPECT_EQ(written.size(), 5u);
    int csv = 0;
    for (const auto& e : fs::directory_iterator(dir.path())) {
        csv += e.path().extension() == ".csv";
    }
    EXPECT_EQ(csv, 4);
    EXPECT_TRUE(fs::exists(dir / "report.iso_dwell_6.csv"));
    const std::string text = read_file(dir / "report.vi.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "v_V,i_A");
}

TEST(Report, NoPlotWritesOnlyJson) {
    testutil::ScratchDir dir;
    const auto trace = simulate(CircuitTopology::resistor(100.0), build_schedule(WaveformSpec::sine(1.0, 1.0, 0.1)), 1);
    const auto written = emit_report(Json{{"ok", true}}, {vi_curve(trace, "vi")}, dir / "r.json", PlotFormat::None);
    EXPECT_EQ(written.size(), 1u);
    EXPECT_EQ(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator{}), 1);
    EXPECT_EQ(Json::parse(read_file(dir / "r.json"))["ok"], true);
}

TEST(Report, SvgHasPolyline) {
    const auto trace = simulate(CircuitTopology::resistor(100.0), build_schedule(WaveformSpec::sine(1.0, 1.0, 0.1)), 1);
    const std::string svg = render_svg(vi_curve(trace, "vi"));
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("v_V"), std::string::npos);
}

TEST(Report, PlotFormatNames) {
    EXPECT_EQ(plot_format_from_string("svg"), PlotFormat::SvgPolyline);
    EXPECT_EQ(plot_format_from_string("csv"), PlotFormat::CsvCurves);
    EXPECT_EQ(plot_format_from_string("none"), PlotFormat::None);
    EXPECT_ERROR_KIND(plot_format_from_string("png"), ErrorKind::Usage);
}

TEST(Files, AtomicWriteLeavesNoTemporaries) {
    testutil::ScratchDir dir;
    write_file_atomic(dir / "a.txt", "one");
    write_file_atomic(dir / "a.txt", "two");
    EXPECT_EQ(read_file(dir / "a.txt"), "two");
    EXPECT_EQ(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator{}), 1);
    // A regular file where a directory is expected.
    EXPECT_ERROR_KIND(write_file_atomic(dir / "a.txt" / "b.txt", "x"), ErrorKind::Io);
}
