#include "ecg/signal_io.hpp"
#include "ecg/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ecg {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing junk");
        if (!std::isfinite(v))
            throw FormatError(path + ":" + std::to_string(line_no) + ": non-finite sample value '" + s + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": expected a number, got '" + s + "'");
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

const char* to_string(Polarity p) {
    return p == Polarity::positive ? "positive" : "negative";
}

Polarity polarity_from_string(const std::string& s) {
    if (s == "positive") return Polarity::positive;
    if (s == "negative") return Polarity::negative;
    throw FormatError("t_polarity must be \"positive\" or \"negative\", got \"" + s + "\"");
}

void validate_signal(const SampledSignal& x) {
    if (!(x.fs > 0.0)) throw ValidationError("signal sampling rate must be positive");
    if (x.samples.empty()) throw ValidationError("signal must contain at least one sample");
    for (double v : x.samples)
        if (!std::isfinite(v)) throw ValidationError("signal contains a non-finite sample");
}

void AnnotationSet::validate() const {
    if (!(fs > 0.0)) throw ValidationError("annotation sampling rate must be positive");
    const double refractory_samples = kRefractoryMs * fs / 1000.0;
    int prev_r = -1;
    for (std::size_t i = 0; i < beats.size(); ++i) {
        const BeatAnnotation& b = beats[i];
        if (b.r < 0) throw ValidationError("beat " + std::to_string(i) + ": negative r index");
        if (prev_r >= 0) {
            if (b.r <= prev_r)
                throw ValidationError("beat " + std::to_string(i) + ": r indices must be strictly increasing");
            if (static_cast<double>(b.r - prev_r) < refractory_samples)
                throw ValidationError("beat " + std::to_string(i) + ": r spacing below the 120 ms refractory interval");
        }
        prev_r = b.r;
        // p < q < r < s < t wherever present
        int last = -1;
        const std::optional<int> seq[] = {b.p, b.q, std::optional<int>(b.r), b.s, b.t};
        for (const auto& f : seq) {
            if (!f) continue;
            if (*f < 0) throw ValidationError("beat " + std::to_string(i) + ": negative fiducial index");
            if (last >= 0 && *f <= last)
                throw ValidationError("beat " + std::to_string(i) + ": fiducials must satisfy p < q < r < s < t");
            last = *f;
        }
    }
}

SampledSignal load_record(const std::string& path, int column) {
    if (column < 0) throw ParameterError("column index must be non-negative");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open record file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ":1: empty file, expected header");
    line = strip_cr(line);

    // Header: fs=<Hz>,lead=<name>
    SampledSignal sig;
    const std::string fs_key = "fs=";
    const std::string lead_key = "lead=";
    if (line.rfind(fs_key, 0) != 0)
        throw FormatError(path + ":1: header must start with 'fs=', got '" + line + "'");
    std::size_t comma = line.find(',');
    std::string fs_str = line.substr(fs_key.size(), comma == std::string::npos ? std::string::npos
                                                                               : comma - fs_key.size());
    sig.fs = parse_double(fs_str, path, 1);
    if (!(sig.fs > 0.0)) throw FormatError(path + ":1: sampling rate must be positive, got " + fs_str);
    if (comma != std::string::npos) {
        std::string rest = line.substr(comma + 1);
        if (rest.rfind(lead_key, 0) != 0)
            throw FormatError(path + ":1: expected 'lead=<name>' after the sampling rate");
        sig.lead = rest.substr(lead_key.size());
    }

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (column >= static_cast<int>(fields.size()))
            throw FormatError(path + ":" + std::to_string(line_no) + ": row has " +
                              std::to_string(fields.size()) + " column(s), need index " +
                              std::to_string(column));
        sig.samples.push_back(parse_double(fields[column], path, line_no));
    }
    if (sig.samples.empty()) throw FormatError(path + ": record has no samples");
    return sig;
}

void write_record(const SampledSignal& x, const std::string& path) {
    validate_signal(x);
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out) throw IoError("cannot open record file for writing: " + path);
    std::string lead = x.lead;
    std::replace(lead.begin(), lead.end(), ',', '_');
    out << "fs=" << fmt_double(x.fs) << ",lead=" << lead << "\n";
    for (double v : x.samples) out << fmt_double(v) << "\n";
    if (!out) throw IoError("failed writing record file: " + path);
}

AnnotationSet load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": invalid JSON: " + e.what());
    }
    AnnotationSet ann;
    try {
        ann.record_id = j.at("record_id").get<std::string>();
        ann.fs = j.at("fs").get<double>();
        for (const auto& jb : j.at("beats")) {
            BeatAnnotation b;
            auto opt_index = [&](const char* key) -> std::optional<int> {
                if (!jb.contains(key) || jb.at(key).is_null()) return std::nullopt;
                return jb.at(key).get<int>();
            };
            b.p = opt_index("p");
            b.q = opt_index("q");
            b.r = jb.at("r").get<int>();
            b.s = opt_index("s");
            b.t = opt_index("t");
            b.t_polarity = polarity_from_string(jb.at("t_polarity").get<std::string>());
            ann.beats.push_back(b);
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": annotation schema violation: " + e.what());
    }
    ann.validate();
    return ann;
}

void write_annotations(const AnnotationSet& ann, const std::string& path) {
    ann.validate();
    nlohmann::json j;
    j["record_id"] = ann.record_id;
    j["fs"] = ann.fs;
    j["beats"] = nlohmann::json::array();
    for (const BeatAnnotation& b : ann.beats) {
        nlohmann::json jb;
        auto put = [&](const char* key, const std::optional<int>& v) {
            if (v) jb[key] = *v; else jb[key] = nullptr;
        };
        put("p", b.p);
        put("q", b.q);
        jb["r"] = b.r;
        put("s", b.s);
        put("t", b.t);
        jb["t_polarity"] = to_string(b.t_polarity);
        j["beats"].push_back(jb);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open annotation file for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing annotation file: " + path);
}

} // namespace ecg
