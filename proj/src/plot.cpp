#include "ecg/plot.hpp"
#include "ecg/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

namespace ecg {

namespace {

constexpr double kWidth = 1200.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 44.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

void write_annotated_svg(const SampledSignal& x, const AnnotationSet& ann,
                         const std::string& path) {
    validate_signal(x);
    ann.validate();

    const int n = x.size();
    double lo = x.samples[0], hi = x.samples[0];
    for (double v : x.samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) hi = lo + 1.0; // flat trace: give the axis some height

    const double sx = (kWidth - 2.0 * kMargin) / std::max(1, n - 1);
    const double sy = (kHeight - 2.0 * kMargin) / (hi - lo);
    auto px = [&](int i) { return kMargin + sx * i; };
    auto py = [&](double v) { return kHeight - kMargin - sy * (v - lo); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write plot: " + path);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"#1f3b73\" stroke-width=\"1\" points=\"";
    for (int i = 0; i < n; ++i) {
        if (i) out << ' ';
        out << num(px(i)) << ',' << num(py(x.samples[i]));
    }
    out << "\"/>\n";

    struct Mark {
        const char* label;
        const char* color;
        std::optional<int> idx;
    };
    for (const BeatAnnotation& b : ann.beats) {
        const Mark marks[] = {{"P", "#2e8b57", b.p},
                              {"Q", "#b8860b", b.q},
                              {"R", "#c0392b", b.r},
                              {"S", "#8e44ad", b.s},
                              {"T", "#16748c", b.t}};
        for (const Mark& m : marks) {
            if (!m.idx || *m.idx < 0 || *m.idx >= n) continue;
            const double cx = px(*m.idx);
            const double cy = py(x.samples[*m.idx]);
            out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy)
                << "\" r=\"3\" fill=\"" << m.color << "\"/>\n";
            out << "<text x=\"" << num(cx) << "\" y=\"" << num(cy - 6.0)
                << "\" font-size=\"10\" text-anchor=\"middle\" fill=\"" << m.color << "\">"
                << m.label << "</text>\n";
        }
    }

    out << "<text x=\"" << num(kMargin) << "\" y=\"" << num(kMargin * 0.6)
        << "\" font-size=\"12\" fill=\"#333\">" << ann.record_id << " (fs=" << x.fs
        << " Hz)</text>\n";
    out << "</svg>\n";
    if (!out) throw IoError("failed while writing plot: " + path);
}

} // namespace ecg
