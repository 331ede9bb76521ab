#ifndef ECG_PLOT_HPP
#define ECG_PLOT_HPP

#include "ecg/signal_io.hpp"

#include <string>

namespace ecg {

// Static SVG: signal polyline with labeled P/Q/R/S/T markers.
void write_annotated_svg(const SampledSignal& x, const AnnotationSet& ann,
                         const std::string& path);

} // namespace ecg

#endif // ECG_PLOT_HPP
