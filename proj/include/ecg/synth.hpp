#ifndef ECG_SYNTH_HPP
#define ECG_SYNTH_HPP

#include "ecg/signal_io.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace ecg {

// One Gaussian lobe of the beat template.
struct WaveParams {
    double amp_mv = 0.0;
    double width_ms = 1.0;  // Gaussian sigma
    double offset_ms = 0.0; // center relative to R
};

// Generator settings. Defaults give a plain positive-T beat at 60 bpm.
struct SynthConfig {
    double fs = 360.0;
    double duration_s = 10.0;
    double hr_bpm = 60.0;
    double rr_jitter_fraction = 0.0; // uniform in +-fraction of nominal RR
    WaveParams p{0.15, 40.0, -160.0};
    WaveParams q{-0.10, 15.0, -25.0};
    WaveParams r{1.00, 20.0, 0.0};
    WaveParams s{-0.20, 15.0, 25.0};
    WaveParams t{0.30, 70.0, 250.0};
    double noise_sigma_mv = 0.0;
    double baseline_amp_mv = 0.0;
    double baseline_freq_hz = 0.3;
    Polarity t_polarity = Polarity::positive; // sign applied to |t.amp_mv|
    std::uint64_t seed = 1;
    std::string record_id = "synth";

    void validate() const; // throws ParameterError

    static SynthConfig from_json_text(const std::string& text);
    static SynthConfig load(const std::string& path);
};

// Sum of five Gaussian lobes per beat at jittered beat times, plus a
// sinusoidal baseline and white Gaussian noise. The annotation set holds
// each lobe's center index as ground truth. Deterministic per seed.
std::pair<SampledSignal, AnnotationSet> synth_ecg(const SynthConfig& cfg);

} // namespace ecg

#endif // ECG_SYNTH_HPP
