#include "ecg/eval.hpp"
#include "ecg/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace ecg {

namespace {

double ratio(int num, int den) { return den > 0 ? static_cast<double>(num) / den : 0.0; }

struct FidAccum {
    int tp = 0, fp = 0, fn = 0;
    double abs_err_sum = 0.0;

    void add(std::optional<int> det, std::optional<int> ref, double ms_per_sample, double tol_ms) {
        if (ref && det) {
            const double err = std::fabs(*det - *ref) * ms_per_sample;
            if (err <= tol_ms) {
                ++tp;
                abs_err_sum += err;
            } else {
                ++fn;
                ++fp;
            }
        } else if (ref) {
            ++fn;
        } else if (det) {
            ++fp;
        }
    }

    FiducialStats finish() const {
        FiducialStats st;
        st.tp = tp;
        st.fp = fp;
        st.fn = fn;
        st.se = ratio(tp, tp + fn);
        st.ppv = ratio(tp, tp + fp);
        st.mean_abs_err_ms = tp > 0 ? abs_err_sum / tp : 0.0;
        return st;
    }
};

nlohmann::json stats_json(const FiducialStats& st) {
    return {{"tp", st.tp},   {"fp", st.fp},
            {"fn", st.fn},   {"se", st.se},
            {"ppv", st.ppv}, {"mean_abs_err_ms", st.mean_abs_err_ms}};
}

} // namespace

Matching match_annotations(const AnnotationSet& detected, const AnnotationSet& reference,
                           double tol_ms) {
    if (!(tol_ms > 0.0)) throw ParameterError("tolerance must be positive");
    detected.validate();
    reference.validate();
    if (detected.fs != reference.fs)
        throw ParameterError("matching requires equal sampling rates");

    Matching m;
    m.detected = detected;
    m.reference = reference;
    m.tol_ms = tol_ms;

    const double ms_per_sample = 1000.0 / reference.fs;

    struct Edge {
        double dist_ms;
        std::size_t ref;
        std::size_t det;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < reference.beats.size(); ++i) {
        for (std::size_t j = 0; j < detected.beats.size(); ++j) {
            const double d =
                std::fabs(detected.beats[j].r - reference.beats[i].r) * ms_per_sample;
            if (d <= tol_ms) edges.push_back({d, i, j});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.dist_ms != b.dist_ms) return a.dist_ms < b.dist_ms;
        if (a.ref != b.ref) return a.ref < b.ref;
        return a.det < b.det;
    });

    std::vector<bool> ref_used(reference.beats.size(), false);
    std::vector<bool> det_used(detected.beats.size(), false);
    for (const Edge& e : edges) {
        if (ref_used[e.ref] || det_used[e.det]) continue;
        ref_used[e.ref] = true;
        det_used[e.det] = true;
        m.pairs.emplace_back(e.det, e.ref);
    }
    std::sort(m.pairs.begin(), m.pairs.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });

    for (std::size_t j = 0; j < det_used.size(); ++j)
        if (!det_used[j]) m.unmatched_detected.push_back(j);
    for (std::size_t i = 0; i < ref_used.size(); ++i)
        if (!ref_used[i]) m.unmatched_reference.push_back(i);
    return m;
}

EvalReport score(const Matching& m) {
    EvalReport rep;
    rep.tp = static_cast<int>(m.pairs.size());
    rep.fp = static_cast<int>(m.unmatched_detected.size());
    rep.fn = static_cast<int>(m.unmatched_reference.size());
    rep.se = ratio(rep.tp, rep.tp + rep.fn);
    rep.ppv = ratio(rep.tp, rep.tp + rep.fp);

    const double ms_per_sample = 1000.0 / m.reference.fs;

    FidAccum p, q, s, t;
    double r_err_sum = 0.0;
    for (const auto& [dj, ri] : m.pairs) {
        const BeatAnnotation& det = m.detected.beats[dj];
        const BeatAnnotation& ref = m.reference.beats[ri];
        r_err_sum += std::fabs(det.r - ref.r) * ms_per_sample;
        p.add(det.p, ref.p, ms_per_sample, m.tol_ms);
        q.add(det.q, ref.q, ms_per_sample, m.tol_ms);
        s.add(det.s, ref.s, ms_per_sample, m.tol_ms);
        t.add(det.t, ref.t, ms_per_sample, m.tol_ms);
    }
    rep.mean_abs_err_ms = rep.tp > 0 ? r_err_sum / rep.tp : 0.0;

    rep.p = p.finish();
    rep.q = q.finish();
    rep.s = s.finish();
    rep.t = t.finish();
    rep.r.tp = rep.tp;
    rep.r.fp = rep.fp;
    rep.r.fn = rep.fn;
    rep.r.se = rep.se;
    rep.r.ppv = rep.ppv;
    rep.r.mean_abs_err_ms = rep.mean_abs_err_ms;
    return rep;
}

std::string EvalReport::to_json_text() const {
    nlohmann::json j = {{"tp", tp},
                        {"fp", fp},
                        {"fn", fn},
                        {"se", se},
                        {"ppv", ppv},
                        {"mean_abs_err_ms", mean_abs_err_ms},
                        {"fiducials",
                         {{"p", stats_json(p)},
                          {"q", stats_json(q)},
                          {"r", stats_json(r)},
                          {"s", stats_json(s)},
                          {"t", stats_json(t)}}}};
    return j.dump(2) + "\n";
}

std::string EvalReport::to_table_text() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-5s %6s %6s %6s %8s %8s %12s\n", "wave", "tp", "fp",
                  "fn", "se", "ppv", "mae_ms");
    out += line;
    const std::pair<const char*, const FiducialStats*> rows[] = {
        {"p", &p}, {"q", &q}, {"r", &r}, {"s", &s}, {"t", &t}};
    for (const auto& [name, st] : rows) {
        std::snprintf(line, sizeof(line), "%-5s %6d %6d %6d %8.4f %8.4f %12.3f\n", name, st->tp,
                      st->fp, st->fn, st->se, st->ppv, st->mean_abs_err_ms);
        out += line;
    }
    return out;
}

} // namespace ecg
