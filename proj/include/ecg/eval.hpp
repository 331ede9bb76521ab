#ifndef ECG_EVAL_HPP
#define ECG_EVAL_HPP

#include "ecg/signal_io.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ecg {

// One-to-one beat pairing between a detected and a reference set.
struct Matching {
    AnnotationSet detected;
    AnnotationSet reference;
    double tol_ms = 75.0;
    // (detected beat index, reference beat index), sorted by reference.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> unmatched_detected;
    std::vector<std::size_t> unmatched_reference;
};

struct FiducialStats {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double se = 0.0;
    double ppv = 0.0;
    double mean_abs_err_ms = 0.0;
};

// R-based counts plus the per-fiducial breakdown over matched beats.
struct EvalReport {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double se = 0.0;
    double ppv = 0.0;
    double mean_abs_err_ms = 0.0;
    FiducialStats p, q, r, s, t;

    std::string to_json_text() const;
    std::string to_table_text() const; // fixed-order text table
};

// Greedy nearest-first matching of R indices within tol_ms, ties broken
// toward the earlier reference beat. Throws ParameterError on fs
// mismatch or non-positive tolerance.
Matching match_annotations(const AnnotationSet& detected, const AnnotationSet& reference,
                           double tol_ms = 75.0);

// Counts, Se, PPV and mean |dR| for a matching; matched beats are also
// compared per fiducial at the matching tolerance.
EvalReport score(const Matching& m);

} // namespace ecg

#endif // ECG_EVAL_HPP
