#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace morphcloud {

// Similarity convention throughout: higher score = better match. Distance-based
// recognizers must be negated at ingestion.
//
// Per-morph verification scores: each morph has exactly two contributing subjects
// (enforced by the array), each probed with one or more attempts.
struct ScoreMatrix {
    std::map<std::string, std::array<std::vector<double>, 2>> morphs;
    std::vector<double> mated, nonmated; // optional calibration lists

    // Throws InvalidArgument when there are no morphs or a score is non-finite,
    // CountMismatch when a subject's attempt list is empty.
    void validate() const;
};

// Smallest threshold among the observed score values (plus one ulp past the
// maximum) such that the fraction of non-mated scores >= t is <= far. With all
// scores equal the result is value + ulp and the achieved FAR is 0. Throws
// InvalidArgument on an empty list, non-finite scores, or far outside (0, 1).
double threshold_at_far(const std::vector<double>& nonmated, double far);

// Fraction of morphs accepted for BOTH subjects: per subject the attempts are
// aggregated with max (any attempt verifies) or min when min_over_attempts is
// set, and the aggregate must be strictly above the threshold for each subject.
double mmpmr(const ScoreMatrix& scores, double threshold, bool min_over_attempts = false);

// Stricter paired-attempt rate: a morph counts only when for EVERY attempt index
// both subjects' scores at that index are strictly above the threshold. Attempts
// are paired by index; unequal per-subject attempt counts throw UnpairedAttempts.
double fmmpmr(const ScoreMatrix& scores, double threshold);

struct DetPoint {
    double threshold = 0.0;
    double apcer = 0.0; // fraction of attack scores < threshold
    double bpcer = 0.0; // fraction of bona fide scores >= threshold
};

struct DetReport {
    double eer = 0.0;               // detection equal error rate
    double bpcer_at_apcer5 = 0.0;   // smallest BPCER with APCER <= 5%
    double bpcer_at_apcer10 = 0.0;  // smallest BPCER with APCER <= 10%
    std::vector<DetPoint> curve;    // one point per swept threshold
};

// Sweeps thresholds over the union of both score lists (plus one ulp past the
// maximum, closing the curve at APCER 1 / BPCER 0). The D-EER is linearly
// interpolated between the two operating points bracketing APCER = BPCER.
// BPCER@APCER<=x% is taken at the largest threshold keeping APCER within the
// target, which is the smallest BPCER attainable at that constraint. Results
// depend only on score ranks. Throws InvalidArgument on empty lists or
// non-finite scores.
DetReport det_metrics(const std::vector<double>& attack_scores,
                      const std::vector<double>& bonafide_scores);

// CSV loaders (header rows optional; '#' comments and blank lines skipped).
//
// Morph score rows: morph_id,subject_idx(1|2),attempt_idx,score. Attempts are
// ordered by attempt_idx within each (morph, subject); duplicate attempt
// indices or other malformed rows throw MalformedCsv.
ScoreMatrix load_score_matrix_csv(const std::string& path);

// Labeled score rows: sample_id,score,label(bonafide|morph). Returns
// (attack_scores, bonafide_scores) in file order.
std::pair<std::vector<double>, std::vector<double>> load_labeled_scores_csv(
    const std::string& path);

} // namespace morphcloud
