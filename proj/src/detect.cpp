#include "ecg/detect.hpp"
#include "ecg/errors.hpp"
#include "ecg/preprocess.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace ecg {

namespace {

// Candidate refinement snaps the pair zero crossing to the physical peak
// of the stage signal within this window.
constexpr double kRefineHalfMs = 20.0;

struct Candidate {
    int idx = 0;
    double strength = 0.0; // level-1 coefficient at the pair maximum
};

bool is_local_max(const std::vector<double>& v, int i) {
    return v[i] >= v[i - 1] && v[i] >= v[i + 1] && (v[i] > v[i - 1] || v[i] > v[i + 1]);
}

bool is_local_min(const std::vector<double>& v, int i) {
    return v[i] <= v[i - 1] && v[i] <= v[i + 1] && (v[i] < v[i - 1] || v[i] < v[i + 1]);
}

// Interpolated zero crossing of w between two opposite-sign extrema,
// rounded to the nearest sample.
int zero_crossing_between(const std::vector<double>& w, int a, int b) {
    for (int i = a; i < b; ++i) {
        if (w[i] == 0.0) return i;
        if ((w[i] > 0.0) != (w[i + 1] > 0.0)) {
            const double t = i + w[i] / (w[i] - w[i + 1]);
            return static_cast<int>(std::lround(t));
        }
    }
    return (a + b) / 2; // extrema straddle zero, so this is unreachable in practice
}

int nearest_stage_peak(const std::vector<double>& stage, int center, int half_win) {
    const int n = static_cast<int>(stage.size());
    const int lo = std::max(1, center - half_win);
    const int hi = std::min(n - 2, center + half_win);
    int best = -1;
    int best_dist = std::numeric_limits<int>::max();
    for (int i = lo; i <= hi; ++i) {
        if (!is_local_max(stage, i)) continue;
        const int d = std::abs(i - center);
        if (d < best_dist) {
            best = i;
            best_dist = d;
        }
    }
    if (best >= 0) return best;
    // monotone window: fall back to its largest sample
    int arg = lo;
    for (int i = lo + 1; i <= hi; ++i)
        if (stage[i] > stage[arg]) arg = i;
    return arg;
}

double max_abs_valid(const CwtCoefficients& w) {
    double m = 0.0;
    for (int i = w.valid_range.first; i <= w.valid_range.last; ++i)
        m = std::max(m, std::fabs(w.coeffs[i]));
    return m;
}

// Pair zero crossings at a given threshold, refined to stage peaks and
// deduplicated (stronger candidate wins a shared index).
std::vector<Candidate> level1_candidates(const CwtCoefficients& w, double threshold,
                                         const std::vector<double>& stage, int refine_half) {
    std::map<int, double> by_idx;
    for (const MaxMinPair& pr : find_threshold_pairs(w, threshold)) {
        const int a = std::min(pr.max_idx, pr.min_idx);
        const int b = std::max(pr.max_idx, pr.min_idx);
        const int zc = zero_crossing_between(w.coeffs, a, b);
        const int idx = nearest_stage_peak(stage, zc, refine_half);
        const double strength = pr.max_val; // coefficient at the pair maximum
        auto [it, inserted] = by_idx.emplace(idx, strength);
        if (!inserted) it->second = std::max(it->second, strength);
    }
    std::vector<Candidate> out;
    out.reserve(by_idx.size());
    for (const auto& [idx, strength] : by_idx) out.push_back({idx, strength});
    return out;
}

std::vector<int> level2_crossings(const CwtCoefficients& w, double threshold) {
    std::vector<int> out;
    for (const MaxMinPair& pr : find_threshold_pairs(w, threshold)) {
        const int a = std::min(pr.max_idx, pr.min_idx);
        const int b = std::max(pr.max_idx, pr.min_idx);
        out.push_back(zero_crossing_between(w.coeffs, a, b));
    }
    return out;
}

bool confirmed_at_level2(int idx, const std::vector<int>& crossings, int tol) {
    for (int z : crossings)
        if (std::abs(z - idx) <= tol) return true;
    return false;
}

// Stronger-candidate-wins pass over index-sorted candidates; ties keep
// the earlier one.
std::vector<Candidate> enforce_refractory(const std::vector<Candidate>& cands, int refractory) {
    std::vector<Candidate> kept;
    for (const Candidate& c : cands) {
        bool drop = false;
        while (!kept.empty() && c.idx - kept.back().idx < refractory) {
            if (c.strength > kept.back().strength) {
                kept.pop_back();
            } else {
                drop = true;
                break;
            }
        }
        if (!drop) kept.push_back(c);
    }
    return kept;
}

double mean_of(const std::deque<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median_gap(const std::vector<int>& r) {
    std::vector<double> gaps;
    gaps.reserve(r.size() - 1);
    for (std::size_t i = 1; i < r.size(); ++i) gaps.push_back(static_cast<double>(r[i] - r[i - 1]));
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    return gaps[gaps.size() / 2];
}

} // namespace

void DetectionConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ParameterError(std::string(name) + " must be positive");
    };
    auto fraction = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) throw ParameterError(std::string(name) + " must lie in (0,1)");
    };
    fraction(threshold_fraction, "threshold_fraction");
    positive(refractory_ms, "refractory_ms");
    positive(base_scale_ms, "base_scale_ms");
    positive(cross_scale_tol_ms, "cross_scale_tol_ms");
    positive(searchback_rr_multiple, "searchback_rr_multiple");
    fraction(searchback_threshold_factor, "searchback_threshold_factor");
    fraction(qs_window_fraction, "qs_window_fraction");
    fraction(pt_window_fraction, "pt_window_fraction");
    fraction(isoelectric_band_fraction, "isoelectric_band_fraction");
}

DetectionConfig DetectionConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid detection config JSON: ") + e.what());
    }
    DetectionConfig cfg;
    auto get = [&](const char* key, double& field) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number())
            throw FormatError(std::string("detection config field '") + key + "' must be a number");
        field = j.at(key).get<double>();
    };
    get("threshold_fraction", cfg.threshold_fraction);
    get("refractory_ms", cfg.refractory_ms);
    get("base_scale_ms", cfg.base_scale_ms);
    get("cross_scale_tol_ms", cfg.cross_scale_tol_ms);
    get("searchback_rr_multiple", cfg.searchback_rr_multiple);
    get("searchback_threshold_factor", cfg.searchback_threshold_factor);
    get("qs_window_fraction", cfg.qs_window_fraction);
    get("pt_window_fraction", cfg.pt_window_fraction);
    get("isoelectric_band_fraction", cfg.isoelectric_band_fraction);
    cfg.validate();
    return cfg;
}

DetectionConfig DetectionConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detection config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::vector<MaxMinPair> find_threshold_pairs(const CwtCoefficients& w, double threshold) {
    if (!(threshold > 0.0)) throw ParameterError("pair threshold must be positive");

    struct Extremum {
        int idx;
        double val;
    };
    std::vector<Extremum> extrema;
    const int lo = std::max(1, w.valid_range.first);
    const int hi = std::min<int>(w.valid_range.last, static_cast<int>(w.coeffs.size()) - 2);
    for (int i = lo; i <= hi; ++i) {
        if (w.coeffs[i] > 0.0 && is_local_max(w.coeffs, i))
            extrema.push_back({i, w.coeffs[i]});
        else if (w.coeffs[i] < 0.0 && is_local_min(w.coeffs, i))
            extrema.push_back({i, w.coeffs[i]});
    }

    const int half_support = std::max(1, static_cast<int>(w.scale / 2.0));
    std::set<std::pair<int, int>> seen;
    std::vector<MaxMinPair> pairs;
    for (std::size_t a = 0; a < extrema.size(); ++a) {
        if (std::fabs(extrema[a].val) < threshold) continue;
        const bool anchor_pos = extrema[a].val > 0.0;
        // dominant opposite-sign extremum within half a support
        const Extremum* partner = nullptr;
        for (std::size_t b = a; b-- > 0 && extrema[b].idx >= extrema[a].idx - half_support;)
            if ((extrema[b].val > 0.0) != anchor_pos &&
                (!partner || std::fabs(extrema[b].val) > std::fabs(partner->val)))
                partner = &extrema[b];
        for (std::size_t b = a + 1;
             b < extrema.size() && extrema[b].idx <= extrema[a].idx + half_support; ++b)
            if ((extrema[b].val > 0.0) != anchor_pos &&
                (!partner || std::fabs(extrema[b].val) > std::fabs(partner->val)))
                partner = &extrema[b];
        if (!partner) continue;

        MaxMinPair pr;
        if (anchor_pos) {
            pr.max_idx = extrema[a].idx;
            pr.max_val = extrema[a].val;
            pr.min_idx = partner->idx;
            pr.min_val = partner->val;
        } else {
            pr.min_idx = extrema[a].idx;
            pr.min_val = extrema[a].val;
            pr.max_idx = partner->idx;
            pr.max_val = partner->val;
        }
        if (seen.insert({pr.max_idx, pr.min_idx}).second) pairs.push_back(pr);
    }
    std::sort(pairs.begin(), pairs.end(), [](const MaxMinPair& a, const MaxMinPair& b) {
        return std::min(a.max_idx, a.min_idx) < std::min(b.max_idx, b.min_idx);
    });
    return pairs;
}

std::vector<int> detect_r_peaks(const SampledSignal& x_stage, const WaveletKernel& k,
                                const DetectionConfig& cfg) {
    cfg.validate();
    if (!(x_stage.fs > 0.0)) throw ParameterError("stage signal needs a positive sampling rate");
    const double fs = x_stage.fs;

    const double base_scale = cfg.base_scale_ms * fs / 1000.0;
    const auto [w1, w2] = cwt_two_levels(x_stage, k, base_scale);

    const double max1 = max_abs_valid(w1);
    if (max1 == 0.0) return {};
    const double tau1 = cfg.threshold_fraction * max1;

    const int refine_half = static_cast<int>(std::lround(kRefineHalfMs * fs / 1000.0));
    // ceil, not round: spacing must never dip below the interval in ms
    const int refractory = static_cast<int>(std::ceil(cfg.refractory_ms * fs / 1000.0));
    const int cross_tol = static_cast<int>(std::lround(cfg.cross_scale_tol_ms * fs / 1000.0));

    const std::vector<Candidate> primary =
        level1_candidates(w1, tau1, x_stage.samples, refine_half);
    const std::vector<Candidate> surviving = enforce_refractory(primary, refractory);

    // Level-2 verification
    const double max2 = max_abs_valid(w2);
    std::vector<int> l2;
    if (max2 > 0.0) l2 = level2_crossings(w2, cfg.threshold_fraction * max2);

    std::vector<Candidate> accepted;
    for (const Candidate& c : surviving)
        if (confirmed_at_level2(c.idx, l2, cross_tol)) accepted.push_back(c);

    // Search-back pool: everything visible at the reduced threshold.
    const std::vector<Candidate> pool =
        level1_candidates(w1, cfg.searchback_threshold_factor * tau1, x_stage.samples, refine_half);

    if (accepted.size() >= 2 && !pool.empty()) {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<int> idxs;
            idxs.reserve(accepted.size());
            for (const Candidate& c : accepted) idxs.push_back(c.idx);
            const double prime = median_gap(idxs);

            std::deque<double> last_rr;
            double rr_mean = prime;
            for (std::size_t i = 0; i + 1 < accepted.size() && !changed; ++i) {
                const double gap = static_cast<double>(accepted[i + 1].idx - accepted[i].idx);
                if (gap > cfg.searchback_rr_multiple * rr_mean) {
                    const Candidate* best = nullptr;
                    for (const Candidate& c : pool) {
                        if (c.idx < accepted[i].idx + refractory) continue;
                        if (c.idx > accepted[i + 1].idx - refractory) break;
                        if (!best || c.strength > best->strength) best = &c;
                    }
                    if (best) {
                        Candidate ins = *best;
                        accepted.insert(std::upper_bound(accepted.begin(), accepted.end(), ins,
                                                         [](const Candidate& a, const Candidate& b) {
                                                             return a.idx < b.idx;
                                                         }),
                                        ins);
                        changed = true;
                        break;
                    }
                }
                last_rr.push_back(gap);
                if (last_rr.size() > 8) last_rr.pop_front();
                rr_mean = mean_of(last_rr);
            }
        }
    }

    std::vector<int> r_peaks;
    r_peaks.reserve(accepted.size());
    for (const Candidate& c : accepted) r_peaks.push_back(c.idx);
    return r_peaks;
}

std::pair<std::optional<int>, std::optional<int>>
locate_qs(const SampledSignal& x_clean, int r, int rr, const DetectionConfig& cfg) {
    cfg.validate();
    const int n = x_clean.size();
    if (r < 0 || r >= n) throw ParameterError("r index out of signal bounds");
    if (rr <= 0) throw ParameterError("rr must be positive");

    const std::vector<double>& x = x_clean.samples;
    const double sgn = x[r] >= 0.0 ? 1.0 : -1.0;
    const double band = cfg.isoelectric_band_fraction * std::fabs(x[r]);
    const int win = static_cast<int>(std::lround(cfg.qs_window_fraction * rr));

    auto scan = [&](int dir) -> std::optional<int> {
        bool crossed = false;
        for (int step = 1; step <= win; ++step) {
            const int i = r + dir * step;
            if (i < 1 || i > n - 2) break;
            if (sgn * x[i] <= band) crossed = true;
            if (!crossed) continue;
            // opposite-polarity extremum: trough for positive R, peak for negative
            const bool hit = sgn > 0.0 ? is_local_min(x, i) : is_local_max(x, i);
            if (hit) return i;
        }
        return std::nullopt;
    };

    return {scan(-1), scan(+1)};
}

std::tuple<std::optional<int>, std::optional<int>, Polarity>
locate_pt(const SampledSignal& x_clean, std::optional<int> q, std::optional<int> s,
          int rr, const DetectionConfig& cfg) {
    cfg.validate();
    if (rr <= 0) throw ParameterError("rr must be positive");
    const int n = x_clean.size();
    const std::vector<double>& x = x_clean.samples;
    const int win = static_cast<int>(std::lround(cfg.pt_window_fraction * rr));

    std::optional<int> p;
    if (q) {
        for (int step = 1; step <= win; ++step) {
            const int i = *q - step;
            if (i < 1) break;
            if (is_local_max(x, i)) {
                p = i;
                break;
            }
        }
    }

    std::optional<int> t;
    Polarity pol = Polarity::positive;
    if (s) {
        std::optional<int> best_pos, best_neg;
        for (int step = 1; step <= win; ++step) {
            const int i = *s + step;
            if (i > n - 2) break;
            if (x[i] > 0.0 && is_local_max(x, i) && (!best_pos || x[i] > x[*best_pos]))
                best_pos = i;
            if (x[i] < 0.0 && is_local_min(x, i) && (!best_neg || x[i] < x[*best_neg]))
                best_neg = i;
        }
        if (best_pos && best_neg) {
            if (-x[*best_neg] > x[*best_pos]) {
                t = best_neg;
                pol = Polarity::negative;
            } else {
                t = best_pos;
            }
        } else if (best_pos) {
            t = best_pos;
        } else if (best_neg) {
            t = best_neg;
            pol = Polarity::negative;
        }
    }
    return {p, t, pol};
}

AnnotationSet delineate(const SampledSignal& x, const WaveletKernel& k,
                        const DetectionConfig& cfg) {
    cfg.validate();
    validate_signal(x);
    if (x.duration_s() <= 2.0) throw ParameterError("record must be longer than 2 s");

    const SampledSignal corrected = remove_baseline(x);
    const SampledSignal clean = swt_denoise(corrected, default_swt_levels(x.fs));
    const SampledSignal stage = square(suppress_t(clean));

    const std::vector<int> r_peaks = detect_r_peaks(stage, k, cfg);

    AnnotationSet ann;
    ann.record_id = x.lead.empty() ? "record" : x.lead;
    ann.fs = x.fs;
    for (std::size_t i = 0; i < r_peaks.size(); ++i) {
        const int r = r_peaks[i];
        int rr;
        if (i > 0)
            rr = r - r_peaks[i - 1];
        else if (r_peaks.size() > 1)
            rr = r_peaks[1] - r_peaks[0];
        else
            rr = static_cast<int>(std::lround(x.fs)); // lone beat: assume 1 s
        auto [q, s] = locate_qs(clean, r, rr, cfg);
        auto [p, t, pol] = locate_pt(clean, q, s, rr, cfg);
        BeatAnnotation beat;
        beat.p = p;
        beat.q = q;
        beat.r = r;
        beat.s = s;
        beat.t = t;
        beat.t_polarity = pol;
        ann.beats.push_back(beat);
    }
    ann.validate();
    return ann;
}

} // namespace ecg
