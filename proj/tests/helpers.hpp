#ifndef ECG_TESTS_HELPERS_HPP
#define ECG_TESTS_HELPERS_HPP

#include "ecg/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace helpers {

// Self-cleaning scratch directory for file-based tests.
struct TmpDir {
    std::filesystem::path path;

    TmpDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path = base / ("ecgtest-" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Brute-force sliding median with replicate padding: sort each window and
// take the middle element. `win` must be odd.
inline std::vector<double> naive_median(const std::vector<double>& x, int win) {
    const int n = static_cast<int>(x.size());
    const int half = win / 2;
    std::vector<double> out(n);
    std::vector<double> window(win);
    for (int i = 0; i < n; ++i) {
        for (int k = -half; k <= half; ++k)
            window[k + half] = x[std::clamp(i + k, 0, n - 1)];
        std::sort(window.begin(), window.end());
        out[i] = window[half];
    }
    return out;
}

// The window-size rule used throughout: round to samples, then force odd.
inline int odd_window(double width_ms, double fs) {
    int w = static_cast<int>(std::lround(width_ms * fs / 1000.0));
    if (w % 2 == 0) ++w;
    return w;
}

inline std::vector<double> random_samples(std::size_t n, std::uint64_t seed,
                                          double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> out(n);
    for (double& v : out) v = d(rng);
    return out;
}

inline double rms(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / x.size());
}

inline ecg::SampledSignal make_signal(std::vector<double> samples, double fs,
                                      std::string lead = "test") {
    ecg::SampledSignal s;
    s.samples = std::move(samples);
    s.fs = fs;
    s.lead = std::move(lead);
    return s;
}

// One wave lobe: amp * exp(-(t-center)^2 / (2 sigma^2)) accumulated in place.
inline void add_lobe(std::vector<double>& y, double fs, double center_s, double amp,
                     double sigma_s) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = i / fs - center_s;
        y[i] += amp * std::exp(-0.5 * (d / sigma_s) * (d / sigma_s));
    }
}

} // namespace helpers

#endif // ECG_TESTS_HELPERS_HPP
