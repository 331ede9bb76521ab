#include "ecg/preprocess.hpp"
#include "ecg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ecg {

namespace {

int odd_window_samples(double width_ms, double fs) {
    int len = static_cast<int>(std::lround(width_ms * fs / 1000.0));
    if (len % 2 == 0) ++len; // also lifts 0 to 1
    return len;
}

// Replicate-padded sample access.
inline double at_clamped(const std::vector<double>& v, int i) {
    const int n = static_cast<int>(v.size());
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;
    return v[i];
}

// Symmetric (mirror) index for the SWT boundary extension.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n - 2;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - m;
}

} // namespace

SampledSignal median_filter(const SampledSignal& x, double width_ms) {
    if (!(width_ms > 0.0)) throw ParameterError("median filter width must be positive");
    if (!(x.fs > 0.0)) throw ParameterError("median filter needs a positive sampling rate");
    const int n = x.size();
    const int win = odd_window_samples(width_ms, x.fs);
    if (win > n)
        throw ParameterError("median window of " + std::to_string(win) +
                             " samples exceeds signal length " + std::to_string(n));
    const int half = win / 2;

    SampledSignal out;
    out.fs = x.fs;
    out.lead = x.lead;
    out.samples.resize(n);

    // Sorted sliding window; insertion/removal by binary search keeps the
    // filter fast enough for the 600 ms windows at 1 kHz.
    std::vector<double> window;
    window.reserve(win);
    for (int j = -half; j <= half; ++j) {
        double v = at_clamped(x.samples, j);
        window.insert(std::upper_bound(window.begin(), window.end(), v), v);
    }
    out.samples[0] = window[half];
    for (int i = 1; i < n; ++i) {
        double leaving = at_clamped(x.samples, i - 1 - half);
        window.erase(std::lower_bound(window.begin(), window.end(), leaving));
        double entering = at_clamped(x.samples, i + half);
        window.insert(std::upper_bound(window.begin(), window.end(), entering), entering);
        out.samples[i] = window[half];
    }
    return out;
}

SampledSignal remove_baseline(const SampledSignal& x) {
    if (!(x.fs > 0.0)) throw ParameterError("remove_baseline needs a positive sampling rate");
    if (x.duration_s() <= 0.6)
        throw ParameterError("remove_baseline needs more than 600 ms of signal");
    // 200 ms pass strips QRS and P, 600 ms pass strips T; what remains is
    // the baseline estimate.
    SampledSignal baseline = median_filter(median_filter(x, 200.0), 600.0);
    SampledSignal out = x;
    for (int i = 0; i < out.size(); ++i) out.samples[i] -= baseline.samples[i];
    return out;
}

int default_swt_levels(double fs) {
    return fs <= 500.0 ? 3 : 4;
}

SampledSignal swt_denoise(const SampledSignal& x, int levels) {
    if (levels < 1) throw ParameterError("swt_denoise needs at least one level");
    const int n = x.size();
    if (n < (1 << levels))
        throw ParameterError("signal shorter than 2^levels samples");

    const int pad = 1 << levels;
    const int m = n + 2 * pad;
    std::vector<double> approx(m);
    for (int i = 0; i < m; ++i) approx[i] = x.samples[reflect_index(i - pad, n)];

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // A trous Haar decomposition, circular on the extended signal.
    std::vector<std::vector<double>> details(levels);
    for (int lvl = 0; lvl < levels; ++lvl) {
        const int step = 1 << lvl;
        std::vector<double> next(m);
        std::vector<double>& det = details[lvl];
        det.resize(m);
        for (int i = 0; i < m; ++i) {
            const double a = approx[i];
            const double b = approx[(i + step) % m];
            next[i] = (a + b) * inv_sqrt2;
            det[i] = (a - b) * inv_sqrt2;
        }
        approx.swap(next);
    }

    // Universal threshold from the first-level detail MAD.
    std::vector<double> abs_d1(details[0].size());
    for (std::size_t i = 0; i < abs_d1.size(); ++i) abs_d1[i] = std::fabs(details[0][i]);
    std::nth_element(abs_d1.begin(), abs_d1.begin() + abs_d1.size() / 2, abs_d1.end());
    const double sigma = abs_d1[abs_d1.size() / 2] / 0.6745;
    const double tau = sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));

    for (auto& det : details)
        for (double& d : det) {
            const double mag = std::fabs(d) - tau;
            d = mag > 0.0 ? (d < 0.0 ? -mag : mag) : 0.0;
        }

    // Inverse transform: average the two shift branches per level.
    for (int lvl = levels - 1; lvl >= 0; --lvl) {
        const int step = 1 << lvl;
        const std::vector<double>& det = details[lvl];
        std::vector<double> prev(m);
        for (int i = 0; i < m; ++i) {
            const int back = (i - step + m) % m;
            const double from_here = (approx[i] + det[i]) * inv_sqrt2;
            const double from_back = (approx[back] - det[back]) * inv_sqrt2;
            prev[i] = 0.5 * (from_here + from_back);
        }
        approx.swap(prev);
    }

    SampledSignal out;
    out.fs = x.fs;
    out.lead = x.lead;
    out.samples.assign(approx.begin() + pad, approx.begin() + pad + n);
    return out;
}

SampledSignal suppress_t(const SampledSignal& x) {
    SampledSignal med = median_filter(x, 600.0);
    SampledSignal out = x;
    for (int i = 0; i < out.size(); ++i) out.samples[i] -= med.samples[i];
    return out;
}

SampledSignal square(const SampledSignal& x) {
    SampledSignal out = x;
    for (double& v : out.samples) v = v * v;
    return out;
}

} // namespace ecg
