#ifndef ECG_WAVELET_HPP
#define ECG_WAVELET_HPP

#include "ecg/signal_io.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ecg {

// Target shape for the wavelet fit, sampled uniformly on [0,1].
struct Pattern {
    std::vector<double> values;
};

// Admissible wavelet discretized on a uniform grid over [0,1]:
// zero mean, unit energy, zero endpoints.
struct WaveletKernel {
    std::vector<double> values;
    int grid_n = 0;

    // Linear interpolation of the grid; zero outside [0,1].
    double sample(double u) const;
};

struct ValidRange {
    int first = 0;
    int last = -1; // inclusive; last < first means empty
};

// W(a,b) at one dilation, aligned so coeffs[b] is the response of the
// kernel centered at sample b. Indices outside valid_range are affected
// by the zero padding at the record borders.
struct CwtCoefficients {
    double scale = 0.0; // dilation in samples
    std::vector<double> coeffs;
    ValidRange valid_range;
};

// Deterministic biphasic stand-in for a database-derived QRS template:
// positive Gaussian lobe at 0.45 (sigma 0.08 of support) plus a negative
// lobe at 0.60 (sigma 0.10, amplitude -0.55 of the positive one).
Pattern default_qrs_pattern(int grid_n);

// Best admissible approximation of the pattern: least squares over C1
// piecewise polynomials (4 equal subintervals, degree <= order) under
// zero-mean and zero-endpoint constraints, normalized to unit energy.
// Throws FitError when the projection degenerates (constant patterns).
WaveletKernel fit_adaptive_wavelet(const Pattern& p, int order = 4, int grid_n = 256);

// The unnormalized constrained least-squares projection itself, on the
// same grid. Exposed so the optimality of the fit can be probed.
std::vector<double> fit_pattern_projection(const Pattern& p, int order = 4, int grid_n = 256);

// Direct-convolution CWT at one dilation (in samples, >= 1). Borders are
// zero padded and excluded from valid_range.
CwtCoefficients cwt(const SampledSignal& x, const WaveletKernel& k, double scale);

// The two dilations the detector uses: base_scale and 2*base_scale.
std::pair<CwtCoefficients, CwtCoefficients>
cwt_two_levels(const SampledSignal& x, const WaveletKernel& k, double base_scale);

// Pattern/kernel CSV helpers. Kernel files are two columns
// "position,value"; pattern files may also be a single value per row.
Pattern load_pattern_csv(const std::string& path);
void write_kernel_csv(const WaveletKernel& k, const std::string& path);

} // namespace ecg

#endif // ECG_WAVELET_HPP
