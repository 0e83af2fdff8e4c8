#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morphcloud/biometrics.hpp"
#include "morphcloud/cloud.hpp"

namespace morphcloud {

enum class SampleLabel { Bonafide, Morph };

struct FeatureVector {
    std::string sample_id;
    SampleLabel label = SampleLabel::Bonafide;
    std::vector<double> values;
};

// Subject keys owned by a sample: the id up to the first '_' (attempt/repeat
// suffix), split on '+' for morphs contributed by two subjects.
//   "s01_r2"    -> {"s01"}
//   "s01+s07_3" -> {"s01", "s07"}
std::vector<std::string> subject_keys(const std::string& sample_id);

// 16-dim hand-crafted descriptor (not a pretrained-network feature): mean and
// population std of the five eigen features (k=30), the three LAB entropy scores
// (256 bins), log point count, minimal enclosing radius, and mean nearest-neighbor
// spacing, in that order. Errors propagate from the feature extractors (the cloud
// needs more than 30 points).
FeatureVector builtin_features(const ColoredPointCloud& cloud,
                               const std::string& sample_id = "",
                               SampleLabel label = SampleLabel::Bonafide);

struct LinearModel {
    std::vector<double> weights; // on z-scored features; dropped dims pinned to 0
    double bias = 0.0;
    std::vector<double> mean, stddev; // fitted on training data; stddev 1 on dropped dims
    std::vector<size_t> dropped_dims; // zero-variance dimensions, recorded
    std::vector<std::string> train_subjects; // sorted subject keys seen in training
    double c = 1.0;
    size_t epochs = 0;
    uint64_t seed = 0;

    // decision score, higher = morph
    double score(const std::vector<double>& values) const;
};

// Linear SVM: z-score normalization fitted on the training set, then hinge loss
// with L2 regularization, F(w,b) = 0.5*|w|^2 + c * sum_i max(0, 1 - y_i*(w.z_i+b)),
// minimized by deterministic full-batch subgradient descent with backtracking step
// halving, so the objective is non-increasing per epoch by construction and the
// model is bit-reproducible for fixed inputs. The seed is recorded in the model
// metadata; the optimizer itself consumes no randomness. Zero-variance feature
// dimensions have no gradient and keep weight 0 (recorded in dropped_dims).
// objective_trace, when given, receives the objective after every epoch.
// Throws SingleClass when a class is missing, InvalidArgument when a class has
// fewer than 2 samples (or c/epochs are out of range, or values are non-finite),
// DimensionMismatch on ragged feature lengths.
LinearModel train_linear_svm(const std::vector<FeatureVector>& train, double c = 1.0,
                             size_t epochs = 200, uint64_t seed = 1,
                             std::vector<double>* objective_trace = nullptr);

struct MadEvalReport {
    DetReport det;
    std::vector<double> scores; // one per test sample, in input order
    size_t bonafide_count = 0, morph_count = 0;
};

// Scores every test sample with the model and delegates to det_metrics (morph
// scores are the attack list). Enforces the subject-disjoint protocol: a test
// sample sharing any subject key with model.train_subjects throws LeakedSplit.
// Throws DimensionMismatch when feature lengths differ from the model.
MadEvalReport evaluate(const LinearModel& model, const std::vector<FeatureVector>& test);

// CSV rows: sample_id,label(bonafide|morph),v1,...,vN. All rows must share one
// feature length (DimensionMismatch) and all values must be finite (MalformedCsv).
std::vector<FeatureVector> load_feature_csv(const std::string& path);

// JSON persistence of the full model including normalization and train_subjects.
void save_linear_model(const LinearModel& model, const std::string& path);
LinearModel load_linear_model(const std::string& path);

} // namespace morphcloud
