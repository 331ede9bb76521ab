#ifndef ECG_DETECT_HPP
#define ECG_DETECT_HPP

#include "ecg/signal_io.hpp"
#include "ecg/wavelet.hpp"

#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace ecg {

// Every constant the detector uses. Widths are milliseconds, the rest
// are fractions; all of it is sampling-rate independent.
struct DetectionConfig {
    double threshold_fraction = 0.30;       // of max |level-1 coefficient|
    double refractory_ms = 120.0;           // minimum R-to-R spacing
    double base_scale_ms = 100.0;           // dilated kernel support, level 1
    double cross_scale_tol_ms = 40.0;       // level-2 confirmation window
    double searchback_rr_multiple = 1.66;   // gap that triggers search-back
    double searchback_threshold_factor = 0.5;
    double qs_window_fraction = 0.15;       // of RR, either side of R
    double pt_window_fraction = 0.40;       // of RR, beyond Q and S
    double isoelectric_band_fraction = 0.05; // of |x[r]|

    void validate() const; // throws ParameterError

    // JSON object with any subset of the field names above.
    static DetectionConfig from_json_text(const std::string& text);
    static DetectionConfig load(const std::string& path);
};

// Adjacent supra-threshold coefficient extrema of opposite sign; the
// zero crossing between them marks a QRS candidate.
struct MaxMinPair {
    int max_idx = 0;
    int min_idx = 0;
    double max_val = 0.0;
    double min_val = 0.0;
};

// One pair per supra-threshold extremum: the partner is the dominant
// opposite-sign extremum within half a dilated support, so the weaker
// lobe of an asymmetric response need not clear the threshold itself.
// Duplicate discoveries collapse; pairs come back in index order.
std::vector<MaxMinPair> find_threshold_pairs(const CwtCoefficients& w, double threshold);

// R detection on the squared, T-suppressed, denoised, baseline-corrected
// stage signal: two-level CWT, threshold at 30% of the level-1 maximum,
// zero crossings of surviving pairs, 120 ms refractory, level-2
// confirmation, and RR-gap search-back at a reduced threshold.
// Returns strictly increasing indices; empty for a zero-energy signal.
std::vector<int> detect_r_peaks(const SampledSignal& x_stage, const WaveletKernel& k,
                                const DetectionConfig& cfg);

// Q and S on the clean (denoised, baseline-corrected) signal: first
// opposite-polarity extremum within 15% of RR on either side of R, past
// the iso-electric band crossing. Absent when no extremum qualifies.
std::pair<std::optional<int>, std::optional<int>>
locate_qs(const SampledSignal& x_clean, int r, int rr, const DetectionConfig& cfg);

// P and T within 40% of RR beyond Q and S. P is the first local maximum
// left of Q; T is the larger in magnitude of the most prominent positive
// peak and negative trough right of S, with its winning polarity.
std::tuple<std::optional<int>, std::optional<int>, Polarity>
locate_pt(const SampledSignal& x_clean, std::optional<int> q, std::optional<int> s,
          int rr, const DetectionConfig& cfg);

// Full pipeline: baseline removal, denoising, then R detection on the
// T-suppressed squared branch and P/Q/S/T localization on the clean one.
AnnotationSet delineate(const SampledSignal& x, const WaveletKernel& k,
                        const DetectionConfig& cfg);

} // namespace ecg

#endif // ECG_DETECT_HPP
