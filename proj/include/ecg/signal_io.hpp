#ifndef ECG_SIGNAL_IO_HPP
#define ECG_SIGNAL_IO_HPP

#include <optional>
#include <string>
#include <vector>

namespace ecg {

// One uniformly sampled voltage channel, in millivolts.
struct SampledSignal {
    std::vector<double> samples;
    double fs = 0.0; // Hz
    std::string lead;

    int size() const { return static_cast<int>(samples.size()); }
    double duration_s() const { return fs > 0 ? samples.size() / fs : 0.0; }
};

enum class Polarity { positive, negative };

// Fiducial indices of one beat, 0-based sample offsets. R is mandatory,
// the others may be absent when the locator found no qualifying extremum.
struct BeatAnnotation {
    std::optional<int> p;
    std::optional<int> q;
    int r = 0;
    std::optional<int> s;
    std::optional<int> t;
    Polarity t_polarity = Polarity::positive;
};

// Minimum physiological R-to-R spacing enforced on every annotation set.
inline constexpr double kRefractoryMs = 120.0;

struct AnnotationSet {
    std::string record_id;
    double fs = 0.0;
    std::vector<BeatAnnotation> beats;

    // Throws ValidationError if per-beat ordering, strict R monotonicity
    // or the 120 ms refractory spacing is violated.
    void validate() const;
};

// Checks SampledSignal invariants (fs > 0, finite samples, length >= 1).
void validate_signal(const SampledSignal& x);

// Record CSV: line 1 "fs=<Hz>,lead=<name>", then one row per sample.
// Multi-channel rows are comma separated; `column` selects the channel.
SampledSignal load_record(const std::string& path, int column = 0);
void write_record(const SampledSignal& x, const std::string& path);

// Annotation JSON with explicit nulls for absent fiducials.
AnnotationSet load_annotations(const std::string& path);
void write_annotations(const AnnotationSet& ann, const std::string& path);

const char* to_string(Polarity p);
Polarity polarity_from_string(const std::string& s);

} // namespace ecg

#endif // ECG_SIGNAL_IO_HPP
