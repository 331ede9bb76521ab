#include "ecg/synth.hpp"
#include "ecg/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <vector>

namespace ecg {

namespace {

constexpr double kFirstBeatS = 0.4;  // lead-in before the first beat
constexpr double kBeatTailS = 0.45;  // room kept after the last beat

void add_gaussian(std::vector<double>& y, double fs, double center_s, double amp,
                  double sigma_s) {
    const int n = static_cast<int>(y.size());
    const int lo = std::max(0, static_cast<int>(std::floor((center_s - 6.0 * sigma_s) * fs)));
    const int hi = std::min(n - 1, static_cast<int>(std::ceil((center_s + 6.0 * sigma_s) * fs)));
    for (int i = lo; i <= hi; ++i) {
        const double d = i / fs - center_s;
        y[i] += amp * std::exp(-0.5 * (d / sigma_s) * (d / sigma_s));
    }
}

void parse_wave(const nlohmann::json& j, const char* key, WaveParams& w) {
    if (!j.contains(key)) return;
    const nlohmann::json& o = j.at(key);
    if (!o.is_object()) throw FormatError(std::string("wave '") + key + "' must be an object");
    auto get = [&](const char* field, double& out) {
        if (!o.contains(field)) return;
        if (!o.at(field).is_number())
            throw FormatError(std::string("wave '") + key + "." + field + "' must be a number");
        out = o.at(field).get<double>();
    };
    get("amp_mv", w.amp_mv);
    get("width_ms", w.width_ms);
    get("offset_ms", w.offset_ms);
}

} // namespace

void SynthConfig::validate() const {
    if (!(fs > 0.0)) throw ParameterError("fs must be positive");
    if (!(duration_s > 0.0)) throw ParameterError("duration_s must be positive");
    if (!(hr_bpm >= 20.0 && hr_bpm <= 240.0))
        throw ParameterError("hr_bpm must lie in [20,240]");
    if (!(rr_jitter_fraction >= 0.0 && rr_jitter_fraction <= 0.5))
        throw ParameterError("rr_jitter_fraction must lie in [0,0.5]");
    const WaveParams* waves[] = {&p, &q, &r, &s, &t};
    for (const WaveParams* w : waves)
        if (!(w->width_ms > 0.0)) throw ParameterError("wave width_ms must be positive");
    for (int i = 0; i + 1 < 5; ++i)
        if (!(waves[i]->offset_ms < waves[i + 1]->offset_ms))
            throw ParameterError("wave offsets must be strictly increasing (p<q<r<s<t)");
    if (!(noise_sigma_mv >= 0.0)) throw ParameterError("noise_sigma_mv must be non-negative");
    if (!(baseline_amp_mv >= 0.0)) throw ParameterError("baseline_amp_mv must be non-negative");
    if (!(baseline_freq_hz > 0.0)) throw ParameterError("baseline_freq_hz must be positive");
    if (record_id.empty()) throw ParameterError("record_id must be non-empty");
}

SynthConfig SynthConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid generator config JSON: ") + e.what());
    }
    SynthConfig cfg;
    auto get_num = [&](const char* key, double& out) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number())
            throw FormatError(std::string("generator field '") + key + "' must be a number");
        out = j.at(key).get<double>();
    };
    get_num("fs", cfg.fs);
    get_num("duration_s", cfg.duration_s);
    get_num("hr_bpm", cfg.hr_bpm);
    get_num("rr_jitter_fraction", cfg.rr_jitter_fraction);
    get_num("noise_sigma_mv", cfg.noise_sigma_mv);
    get_num("baseline_amp_mv", cfg.baseline_amp_mv);
    get_num("baseline_freq_hz", cfg.baseline_freq_hz);
    if (j.contains("waves")) {
        const nlohmann::json& w = j.at("waves");
        if (!w.is_object()) throw FormatError("'waves' must be an object");
        parse_wave(w, "p", cfg.p);
        parse_wave(w, "q", cfg.q);
        parse_wave(w, "r", cfg.r);
        parse_wave(w, "s", cfg.s);
        parse_wave(w, "t", cfg.t);
    }
    if (j.contains("t_polarity")) {
        if (!j.at("t_polarity").is_string())
            throw FormatError("'t_polarity' must be a string");
        cfg.t_polarity = polarity_from_string(j.at("t_polarity").get<std::string>());
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned())
            throw FormatError("'seed' must be a non-negative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("record_id")) {
        if (!j.at("record_id").is_string())
            throw FormatError("'record_id' must be a string");
        cfg.record_id = j.at("record_id").get<std::string>();
    }
    cfg.validate();
    return cfg;
}

SynthConfig SynthConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open generator config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::pair<SampledSignal, AnnotationSet> synth_ecg(const SynthConfig& cfg) {
    cfg.validate();

    const int n = static_cast<int>(std::lround(cfg.duration_s * cfg.fs));
    if (n <= 0) throw ParameterError("duration too short for one sample");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);

    // Beat schedule first so the jitter stream is independent of the
    // noise settings.
    const double rr_nominal = 60.0 / cfg.hr_bpm;
    std::vector<double> beat_times;
    double tk = kFirstBeatS;
    while (tk <= cfg.duration_s - kBeatTailS) {
        beat_times.push_back(tk);
        double rr = rr_nominal;
        if (cfg.rr_jitter_fraction > 0.0)
            rr *= 1.0 + cfg.rr_jitter_fraction * jitter(rng);
        tk += rr;
    }

    SampledSignal sig;
    sig.fs = cfg.fs;
    sig.lead = cfg.record_id;
    sig.samples.assign(n, 0.0);

    const double t_amp = cfg.t_polarity == Polarity::negative ? -std::fabs(cfg.t.amp_mv)
                                                              : std::fabs(cfg.t.amp_mv);
    struct Lobe {
        const WaveParams* w;
        double amp;
    };
    const Lobe lobes[] = {{&cfg.p, cfg.p.amp_mv},
                          {&cfg.q, cfg.q.amp_mv},
                          {&cfg.r, cfg.r.amp_mv},
                          {&cfg.s, cfg.s.amp_mv},
                          {&cfg.t, t_amp}};

    AnnotationSet truth;
    truth.record_id = cfg.record_id;
    truth.fs = cfg.fs;

    for (double tb : beat_times) {
        double centers[5];
        int idxs[5];
        bool in_range = true;
        for (int k = 0; k < 5; ++k) {
            centers[k] = tb + lobes[k].w->offset_ms / 1000.0;
            idxs[k] = static_cast<int>(std::lround(centers[k] * cfg.fs));
            if (idxs[k] < 0 || idxs[k] >= n) in_range = false;
        }
        if (!in_range) continue; // beat template does not fit the record

        BeatAnnotation beat;
        for (int k = 0; k < 5; ++k)
            add_gaussian(sig.samples, cfg.fs, centers[k], lobes[k].amp,
                         lobes[k].w->width_ms / 1000.0);
        beat.p = idxs[0];
        beat.q = idxs[1];
        beat.r = idxs[2];
        beat.s = idxs[3];
        beat.t = idxs[4];
        beat.t_polarity = cfg.t_polarity;
        truth.beats.push_back(beat);
    }

    if (cfg.baseline_amp_mv > 0.0) {
        const double w = 2.0 * M_PI * cfg.baseline_freq_hz;
        for (int i = 0; i < n; ++i)
            sig.samples[i] += cfg.baseline_amp_mv * std::sin(w * i / cfg.fs);
    }
    if (cfg.noise_sigma_mv > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma_mv);
        for (int i = 0; i < n; ++i) sig.samples[i] += noise(rng);
    }

    truth.validate();
    return {std::move(sig), std::move(truth)};
}

} // namespace ecg
