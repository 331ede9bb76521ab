#ifndef ECG_PREPROCESS_HPP
#define ECG_PREPROCESS_HPP

#include "ecg/signal_io.hpp"

namespace ecg {

// Centered sliding median. The window is round(width_ms*fs/1000) samples,
// incremented to the next odd count so the median is always a data value.
// Edges are handled by replicate padding. Throws ParameterError when the
// window does not fit the signal.
SampledSignal median_filter(const SampledSignal& x, double width_ms);

// Two-stage median cascade (200 ms then 600 ms) estimates the baseline,
// which is subtracted from the input.
SampledSignal remove_baseline(const SampledSignal& x);

// Undecimated Haar (DB1) wavelet shrinkage. Detail coefficients are
// soft-thresholded with the universal threshold sigma*sqrt(2*ln N),
// sigma = median(|level-1 detail|)/0.6745. Boundaries use symmetric
// extension; the result is truncated back to the input length.
SampledSignal swt_denoise(const SampledSignal& x, int levels);

// Default decomposition depth: 3 levels up to 500 Hz, 4 above.
int default_swt_levels(double fs);

// x minus its 600 ms median, applied before squaring so tall T waves
// cannot masquerade as QRS energy in the detection branch.
SampledSignal suppress_t(const SampledSignal& x);

// Elementwise square; makes the detection stage polarity blind.
SampledSignal square(const SampledSignal& x);

} // namespace ecg

#endif // ECG_PREPROCESS_HPP
