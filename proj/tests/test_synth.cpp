#include "ecg/errors.hpp"
#include "ecg/signal_io.hpp"
#include "ecg/synth.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

using namespace ecg;

namespace {

SynthConfig clean_config() {
    SynthConfig c;
    c.fs = 360.0;
    c.duration_s = 10.0;
    c.hr_bpm = 60.0;
    c.seed = 11;
    return c; // defaults: no jitter, no noise, no baseline
}

} // namespace

TEST_CASE("same seed reproduces the record bit for bit") {
    SynthConfig c = clean_config();
    c.rr_jitter_fraction = 0.15;
    c.noise_sigma_mv = 0.05;

    const auto [x1, t1] = synth_ecg(c);
    const auto [x2, t2] = synth_ecg(c);
    REQUIRE(x1.samples.size() == x2.samples.size());
    for (std::size_t i = 0; i < x1.samples.size(); ++i) CHECK(x1.samples[i] == x2.samples[i]);
    REQUIRE(t1.beats.size() == t2.beats.size());
    for (std::size_t i = 0; i < t1.beats.size(); ++i) {
        CHECK(t1.beats[i].r == t2.beats[i].r);
        CHECK(t1.beats[i].p == t2.beats[i].p);
        CHECK(t1.beats[i].t == t2.beats[i].t);
    }

    c.seed = 12;
    const auto [x3, t3] = synth_ecg(c);
    CHECK(x3.samples != x1.samples);
}

TEST_CASE("beat schedule covers the record at the nominal rate") {
    const auto [x, truth] = synth_ecg(clean_config());
    CHECK(x.fs == 360.0);
    CHECK(x.lead == "synth");
    CHECK(truth.record_id == "synth");
    REQUIRE(truth.beats.size() == 10); // 0.4 s, 1.4 s, ... 9.4 s

    for (std::size_t k = 0; k < truth.beats.size(); ++k) {
        const double tb = 0.4 + static_cast<double>(k) * 1.0;
        CHECK(truth.beats[k].r == std::lround(tb * 360.0));
        REQUIRE(truth.beats[k].p.has_value());
        REQUIRE(truth.beats[k].t.has_value());
        CHECK(*truth.beats[k].p == std::lround((tb - 0.160) * 360.0));
        CHECK(*truth.beats[k].t == std::lround((tb + 0.250) * 360.0));
    }

    SynthConfig fast = clean_config();
    fast.hr_bpm = 120.0;
    const auto [xf, tf] = synth_ecg(fast);
    CHECK(tf.beats.size() == 19); // 0.4 s through 9.4 s in 0.5 s steps
}

TEST_CASE("the clean record is the documented sum of Gaussian lobes") {
    const SynthConfig c = clean_config();
    const auto [x, truth] = synth_ecg(c);
    const WaveParams* waves[] = {&c.p, &c.q, &c.r, &c.s, &c.t};

    for (int i = 0; i < x.size(); ++i) {
        double expected = 0.0;
        for (std::size_t k = 0; k < truth.beats.size(); ++k) {
            const double tb = 0.4 + static_cast<double>(k) * 1.0;
            for (const WaveParams* w : waves) {
                const double d = i / c.fs - (tb + w->offset_ms / 1000.0);
                const double sg = w->width_ms / 1000.0;
                expected += w->amp_mv * std::exp(-0.5 * (d / sg) * (d / sg));
            }
        }
        // lobes are cut past six sigma, hence the loose bound
        CHECK(std::fabs(x.samples[i] - expected) <= 1e-6);
    }
}

TEST_CASE("negative T polarity flips the lobe and the truth label") {
    SynthConfig c = clean_config();
    c.t_polarity = Polarity::negative;
    const auto [x, truth] = synth_ecg(c);
    REQUIRE(!truth.beats.empty());
    for (const BeatAnnotation& b : truth.beats) {
        CHECK(b.t_polarity == Polarity::negative);
        REQUIRE(b.t.has_value());
        CHECK(x.samples[*b.t] < -0.25);
    }
}

TEST_CASE("noise adds on top of an identical beat schedule") {
    SynthConfig c = clean_config();
    c.rr_jitter_fraction = 0.10;
    const auto [clean, truth_clean] = synth_ecg(c);
    c.noise_sigma_mv = 0.05;
    const auto [noisy, truth_noisy] = synth_ecg(c);

    REQUIRE(truth_clean.beats.size() == truth_noisy.beats.size());
    for (std::size_t i = 0; i < truth_clean.beats.size(); ++i)
        CHECK(truth_clean.beats[i].r == truth_noisy.beats[i].r);

    const int n = clean.size();
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += noisy.samples[i] - clean.samples[i];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = noisy.samples[i] - clean.samples[i] - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / (n - 1));
    CHECK(std::fabs(mean) < 0.005);
    CHECK(sd == doctest::Approx(0.05).epsilon(0.10));
}

TEST_CASE("baseline wander is the configured sinusoid") {
    SynthConfig c = clean_config();
    const auto [flat, t1] = synth_ecg(c);
    c.baseline_amp_mv = 1.2;
    c.baseline_freq_hz = 0.4;
    const auto [wander, t2] = synth_ecg(c);

    const double w = 2.0 * M_PI * 0.4;
    for (int i = 0; i < flat.size(); ++i) {
        const double expected = 1.2 * std::sin(w * i / c.fs);
        CHECK(std::fabs(wander.samples[i] - flat.samples[i] - expected) <= 1e-9);
    }
}

TEST_CASE("generator config validation") {
    CHECK_NOTHROW(clean_config().validate());

    auto rejects = [](auto mutate) {
        SynthConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ParameterError);
    };
    rejects([](SynthConfig& c) { c.fs = 0.0; });
    rejects([](SynthConfig& c) { c.duration_s = 0.0; });
    rejects([](SynthConfig& c) { c.hr_bpm = 10.0; });
    rejects([](SynthConfig& c) { c.hr_bpm = 300.0; });
    rejects([](SynthConfig& c) { c.rr_jitter_fraction = 0.6; });
    rejects([](SynthConfig& c) { c.rr_jitter_fraction = -0.1; });
    rejects([](SynthConfig& c) { c.q.width_ms = 0.0; });
    rejects([](SynthConfig& c) { c.q.offset_ms = 10.0; }); // would put Q after R
    rejects([](SynthConfig& c) { c.noise_sigma_mv = -0.1; });
    rejects([](SynthConfig& c) { c.baseline_amp_mv = -1.0; });
    rejects([](SynthConfig& c) { c.baseline_freq_hz = 0.0; });
    rejects([](SynthConfig& c) { c.record_id.clear(); });
}

TEST_CASE("generator JSON config parsing") {
    const char* text = R"({
        "fs": 500.0,
        "duration_s": 30.0,
        "hr_bpm": 80.0,
        "rr_jitter_fraction": 0.05,
        "noise_sigma_mv": 0.02,
        "baseline_amp_mv": 0.8,
        "baseline_freq_hz": 0.25,
        "waves": {
            "r": {"amp_mv": 1.2, "width_ms": 14.0},
            "t": {"offset_ms": 200.0}
        },
        "t_polarity": "negative",
        "seed": 42,
        "record_id": "rec01"
    })";
    const SynthConfig c = SynthConfig::from_json_text(text);
    CHECK(c.fs == 500.0);
    CHECK(c.duration_s == 30.0);
    CHECK(c.hr_bpm == 80.0);
    CHECK(c.rr_jitter_fraction == 0.05);
    CHECK(c.noise_sigma_mv == 0.02);
    CHECK(c.baseline_amp_mv == 0.8);
    CHECK(c.baseline_freq_hz == 0.25);
    CHECK(c.r.amp_mv == 1.2);
    CHECK(c.r.width_ms == 14.0);
    CHECK(c.r.offset_ms == 0.0); // untouched default
    CHECK(c.t.offset_ms == 200.0);
    CHECK(c.t_polarity == Polarity::negative);
    CHECK(c.seed == 42);
    CHECK(c.record_id == "rec01");

    CHECK_THROWS_AS(SynthConfig::from_json_text("["), FormatError);
    CHECK_THROWS_AS(SynthConfig::from_json_text(R"({"hr_bpm": "fast"})"), FormatError);
    CHECK_THROWS_AS(SynthConfig::from_json_text(R"({"seed": -1})"), FormatError);
    CHECK_THROWS_AS(SynthConfig::from_json_text(R"({"t_polarity": "sideways"})"), FormatError);
    CHECK_THROWS_AS(SynthConfig::from_json_text(R"({"waves": {"r": {"amp_mv": "big"}}})"),
                    FormatError);
    CHECK_THROWS_AS(SynthConfig::from_json_text(R"({"hr_bpm": 10.0})"), ParameterError);
    CHECK_THROWS_AS(SynthConfig::load("/nonexistent/synth.json"), IoError);
}
