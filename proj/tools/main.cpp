#include "ecg/detect.hpp"
#include "ecg/errors.hpp"
#include "ecg/eval.hpp"
#include "ecg/plot.hpp"
#include "ecg/signal_io.hpp"
#include "ecg/synth.hpp"
#include "ecg/wavelet.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

ecg::WaveletKernel make_kernel(const std::string& pattern_path, int order, int grid_n) {
    const ecg::Pattern pattern = pattern_path.empty() ? ecg::default_qrs_pattern(grid_n)
                                                      : ecg::load_pattern_csv(pattern_path);
    return ecg::fit_adaptive_wavelet(pattern, order, grid_n);
}

ecg::DetectionConfig make_detect_config(const std::string& config_path) {
    return config_path.empty() ? ecg::DetectionConfig{} : ecg::DetectionConfig::load(config_path);
}

// Returns true when the record produced at least one beat.
bool run_one_record(const std::string& in_path, const std::string& out_path, int column,
                    const ecg::WaveletKernel& kernel, const ecg::DetectionConfig& cfg) {
    ecg::SampledSignal sig = ecg::load_record(in_path, column);
    if (sig.lead.empty()) sig.lead = fs::path(in_path).stem().string();
    ecg::AnnotationSet ann = ecg::delineate(sig, kernel, cfg);
    ann.record_id = fs::path(in_path).stem().string();
    ecg::write_annotations(ann, out_path);
    std::printf("%s: %zu beats -> %s\n", in_path.c_str(), ann.beats.size(), out_path.c_str());
    return !ann.beats.empty();
}

int cmd_detect(const std::string& input, const std::string& out, int column,
               const std::string& config_path, const std::string& pattern_path, int order,
               int grid_n) {
    const ecg::WaveletKernel kernel = make_kernel(pattern_path, order, grid_n);
    const ecg::DetectionConfig cfg = make_detect_config(config_path);

    bool any_empty = false;
    if (fs::is_directory(input)) {
        std::vector<fs::path> records;
        for (const auto& entry : fs::directory_iterator(input))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                records.push_back(entry.path());
        std::sort(records.begin(), records.end());
        if (records.empty()) throw ecg::IoError("no .csv records in directory: " + input);
        fs::create_directories(out);
        for (const fs::path& rec : records) {
            const fs::path dst = fs::path(out) / (rec.stem().string() + ".json");
            if (!run_one_record(rec.string(), dst.string(), column, kernel, cfg))
                any_empty = true;
        }
    } else {
        if (!run_one_record(input, out, column, kernel, cfg)) any_empty = true;
    }
    return any_empty ? 3 : 0;
}

int cmd_eval(const std::string& detected_path, const std::string& reference_path, double tol_ms,
             bool as_json) {
    const ecg::AnnotationSet det = ecg::load_annotations(detected_path);
    const ecg::AnnotationSet ref = ecg::load_annotations(reference_path);
    const ecg::Matching m = ecg::match_annotations(det, ref, tol_ms);
    const ecg::EvalReport rep = ecg::score(m);
    std::fputs((as_json ? rep.to_json_text() : rep.to_table_text()).c_str(), stdout);
    return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out,
              const std::string& truth_path) {
    const ecg::SynthConfig cfg =
        config_path.empty() ? ecg::SynthConfig{} : ecg::SynthConfig::load(config_path);
    auto [sig, truth] = ecg::synth_ecg(cfg);
    ecg::write_record(sig, out);
    std::printf("wrote %d samples at %g Hz -> %s\n", sig.size(), sig.fs, out.c_str());
    if (!truth_path.empty()) {
        ecg::write_annotations(truth, truth_path);
        std::printf("wrote %zu truth beats -> %s\n", truth.beats.size(), truth_path.c_str());
    }
    return 0;
}

int cmd_wavelet_dump(const std::string& out, const std::string& pattern_path, int order,
                     int grid_n) {
    const ecg::WaveletKernel kernel = make_kernel(pattern_path, order, grid_n);
    ecg::write_kernel_csv(kernel, out);
    std::printf("wrote %d-point kernel -> %s\n", kernel.grid_n, out.c_str());
    return 0;
}

int cmd_plot(const std::string& record_path, const std::string& ann_path, const std::string& out,
             int column) {
    const ecg::SampledSignal sig = ecg::load_record(record_path, column);
    const ecg::AnnotationSet ann = ecg::load_annotations(ann_path);
    ecg::write_annotated_svg(sig, ann, out);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ECG delineation toolkit: R-peak detection via a pattern-adaptive "
                 "wavelet, P/Q/S/T location, synthesis and scoring"};
    app.require_subcommand(1);

    // detect
    std::string det_input, det_out, det_config, det_pattern;
    int det_column = 0, det_order = 4, det_grid = 256;
    CLI::App* detect = app.add_subcommand("detect", "Delineate a record (or a directory of records)");
    detect->add_option("input", det_input, "record .csv, or a directory of records")->required();
    detect->add_option("-o,--out", det_out, "annotation .json output (directory in batch mode)")
        ->required();
    detect->add_option("-c,--column", det_column, "sample column for multi-column records");
    detect->add_option("--config", det_config, "detection parameters JSON");
    detect->add_option("--pattern", det_pattern, "QRS pattern .csv to fit the wavelet to");
    detect->add_option("--order", det_order, "piecewise-polynomial order of the fitted wavelet");
    detect->add_option("--grid", det_grid, "wavelet design grid size");

    // eval
    std::string ev_det, ev_ref;
    double ev_tol = 75.0;
    bool ev_json = false;
    CLI::App* eval = app.add_subcommand("eval", "Score detected annotations against a reference");
    eval->add_option("-d,--detected", ev_det, "detected annotation .json")->required();
    eval->add_option("-r,--reference", ev_ref, "reference annotation .json")->required();
    eval->add_option("-t,--tol-ms", ev_tol, "match tolerance in ms");
    eval->add_flag("--json", ev_json, "emit the report as JSON");

    // synth
    std::string sy_config, sy_out, sy_truth;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic record");
    synth->add_option("--config", sy_config, "generator config JSON (defaults when omitted)");
    synth->add_option("-o,--out", sy_out, "record .csv output")->required();
    synth->add_option("--truth", sy_truth, "also write the ground-truth annotation .json");

    // wavelet dump
    CLI::App* wavelet = app.add_subcommand("wavelet", "Wavelet utilities");
    wavelet->require_subcommand(1);
    std::string wv_out, wv_pattern;
    int wv_order = 4, wv_grid = 256;
    CLI::App* dump = wavelet->add_subcommand("dump", "Fit the wavelet and write it as .csv");
    dump->add_option("-o,--out", wv_out, "kernel .csv output")->required();
    dump->add_option("--pattern", wv_pattern, "QRS pattern .csv to fit to");
    dump->add_option("--order", wv_order, "piecewise-polynomial order");
    dump->add_option("--grid", wv_grid, "design grid size");

    // plot
    std::string pl_record, pl_ann, pl_out;
    int pl_column = 0;
    CLI::App* plot = app.add_subcommand("plot", "Render a record with its annotations as SVG");
    plot->add_option("record", pl_record, "record .csv")->required();
    plot->add_option("-a,--ann", pl_ann, "annotation .json")->required();
    plot->add_option("-o,--out", pl_out, "SVG output path")->required();
    plot->add_option("-c,--column", pl_column, "sample column for multi-column records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*detect)
            return cmd_detect(det_input, det_out, det_column, det_config, det_pattern, det_order,
                              det_grid);
        if (*eval) return cmd_eval(ev_det, ev_ref, ev_tol, ev_json);
        if (*synth) return cmd_synth(sy_config, sy_out, sy_truth);
        if (*wavelet && *dump) return cmd_wavelet_dump(wv_out, wv_pattern, wv_order, wv_grid);
        if (*plot) return cmd_plot(pl_record, pl_ann, pl_out, pl_column);
    } catch (const ecg::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ecg::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ecg::Error& e) { // parameter, validation and fit problems
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
