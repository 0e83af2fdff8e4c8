#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "morphcloud/biometrics.hpp"
#include "morphcloud/errors.hpp"
#include "morphcloud/rng.hpp"

using namespace morphcloud;

namespace {

template <typename Fn>
Errc thrown_code(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::NumericFailure; // sentinel: "did not throw"
}

// exhaustive sweep over candidate thresholds, counting with count_if directly
double threshold_oracle(std::vector<double> scores, double far) {
    double n = static_cast<double>(scores.size());
    std::sort(scores.begin(), scores.end());
    std::vector<double> candidates = scores;
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(
        std::nextafter(candidates.back(), std::numeric_limits<double>::infinity()));
    for (double t : candidates) {
        auto count = std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= t; });
        if (static_cast<double>(count) / n <= far) return t;
    }
    return candidates.back();
}

ScoreMatrix random_matrix(uint64_t seed, bool paired) {
    SplitMix64 rng(seed);
    ScoreMatrix m;
    size_t morphs = 1 + rng.next_below(12);
    for (size_t i = 0; i < morphs; ++i) {
        auto& subj = m.morphs["m" + std::to_string(i)];
        size_t a0 = 1 + rng.next_below(4);
        size_t a1 = paired ? a0 : 1 + rng.next_below(4);
        for (size_t a = 0; a < a0; ++a) subj[0].push_back(rng.next_double());
        for (size_t a = 0; a < a1; ++a) subj[1].push_back(rng.next_double());
    }
    return m;
}

double mmpmr_oracle(const ScoreMatrix& m, double t, bool use_min = false) {
    size_t ok = 0;
    for (const auto& [id, subj] : m.morphs) {
        size_t subjects_ok = 0;
        for (int s = 0; s < 2; ++s) {
            double agg = subj[s][0];
            for (double v : subj[s]) agg = use_min ? std::min(agg, v) : std::max(agg, v);
            if (agg > t) ++subjects_ok;
        }
        if (subjects_ok == 2) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(m.morphs.size());
}

double fmmpmr_oracle(const ScoreMatrix& m, double t) {
    size_t ok = 0;
    for (const auto& [id, subj] : m.morphs) {
        bool all = true;
        for (size_t a = 0; a < subj[0].size(); ++a)
            all = all && subj[0][a] > t && subj[1][a] > t;
        if (all) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(m.morphs.size());
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

TEST_SUITE_BEGIN("biometrics");

TEST_CASE("threshold_at_far picks the exact order statistic") {
    std::vector<double> scores;
    for (int i = 1; i <= 1000; ++i) scores.push_back(i);
    double t = threshold_at_far(scores, 0.001);
    CHECK(t == 1000.0);
    auto above = std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= t; });
    CHECK(above == 1);
    CHECK(threshold_at_far(scores, 0.002) == 999.0);
    CHECK(threshold_at_far(scores, 0.0015) == 1000.0); // floor(1.5) = 1 score allowed
}

TEST_CASE("threshold_at_far on all-equal scores steps one ulp past the value") {
    std::vector<double> scores(50, 7.5);
    double t = threshold_at_far(scores, 0.3);
    CHECK(t > 7.5);
    CHECK(t == std::nextafter(7.5, std::numeric_limits<double>::infinity()));
    CHECK(std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= t; }) == 0);
}

TEST_CASE("threshold_at_far matches the exhaustive sweep oracle") {
    SplitMix64 rng(6401);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> scores(500);
        // draw from 40 distinct values so duplicates are common
        for (auto& s : scores) s = static_cast<double>(rng.next_below(40)) * 0.25;
        for (double far : {0.01, 0.1, 0.25}) {
            double t = threshold_at_far(scores, far);
            CHECK(t == threshold_oracle(scores, far));
            double frac = static_cast<double>(std::count_if(scores.begin(), scores.end(),
                                                            [&](double s) { return s >= t; })) /
                          static_cast<double>(scores.size());
            CHECK(frac <= far);
        }
    }
}

TEST_CASE("threshold_at_far rejects bad input") {
    CHECK(thrown_code([] { threshold_at_far({}, 0.1); }) == Errc::InvalidArgument);
    CHECK(thrown_code([] { threshold_at_far({1.0}, 0.0); }) == Errc::InvalidArgument);
    CHECK(thrown_code([] { threshold_at_far({1.0}, 1.0); }) == Errc::InvalidArgument);
    CHECK(thrown_code([] { threshold_at_far({1.0}, -0.5); }) == Errc::InvalidArgument);
    double nan = std::nan("");
    CHECK(thrown_code([&] { threshold_at_far({1.0, nan}, 0.1); }) == Errc::InvalidArgument);
}

TEST_CASE("mmpmr counts morphs verifying for both subjects") {
    ScoreMatrix m;
    for (int i = 0; i < 10; ++i) {
        auto& subj = m.morphs["morph" + std::to_string(i)];
        subj[0] = {0.8, 0.9};
        subj[1] = {0.7, 0.95};
    }
    CHECK(mmpmr(m, 0.5) == 1.0);
    m.morphs["morph3"][1] = {0.1, 0.2}; // one subject of one morph always below
    CHECK(mmpmr(m, 0.5) == 0.9);
    // a score exactly at the threshold does not verify (strictly above)
    m.morphs["morph3"][1] = {0.5, 0.5};
    CHECK(mmpmr(m, 0.5) == 0.9);

    ScoreMatrix mixed;
    mixed.morphs["only"][0] = {0.2, 0.9}; // max passes, min fails
    mixed.morphs["only"][1] = {0.8, 0.8};
    CHECK(mmpmr(mixed, 0.5) == 1.0);
    CHECK(mmpmr(mixed, 0.5, true) == 0.0);
}

TEST_CASE("mmpmr equals brute-force re-evaluation on random matrices") {
    for (uint64_t seed = 6501; seed < 6701; ++seed) {
        ScoreMatrix m = random_matrix(seed, false);
        for (double t : {0.25, 0.5, 0.9}) {
            double v = mmpmr(m, t);
            CHECK(v == mmpmr_oracle(m, t));
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            CHECK(mmpmr(m, t, true) == mmpmr_oracle(m, t, true));
        }
    }
}

TEST_CASE("fmmpmr equals mmpmr bit-exact for single attempts") {
    SplitMix64 rng(6801);
    for (int trial = 0; trial < 100; ++trial) {
        ScoreMatrix m;
        size_t morphs = 1 + rng.next_below(10);
        for (size_t i = 0; i < morphs; ++i) {
            auto& subj = m.morphs["m" + std::to_string(i)];
            subj[0] = {rng.next_double()};
            subj[1] = {rng.next_double()};
        }
        double t = rng.next_double();
        CHECK(fmmpmr(m, t) == mmpmr(m, t));
    }
}

TEST_CASE("fmmpmr requires every attempt pair to verify") {
    ScoreMatrix m;
    m.morphs["a"][0] = {0.9, 0.9, 0.1}; // third attempt pair fails
    m.morphs["a"][1] = {0.9, 0.9, 0.9};
    CHECK(fmmpmr(m, 0.5) == 0.0);
    CHECK(mmpmr(m, 0.5) == 1.0);
    m.morphs["a"][0][2] = 0.8;
    CHECK(fmmpmr(m, 0.5) == 1.0);
}

TEST_CASE("fmmpmr never exceeds mmpmr and both fall with the threshold") {
    for (uint64_t seed = 6901; seed < 7001; ++seed) {
        ScoreMatrix m = random_matrix(seed, true);
        double prev_m = 1.0, prev_f = 1.0;
        for (double t : {0.1, 0.4, 0.7, 0.95}) {
            double vm = mmpmr(m, t), vf = fmmpmr(m, t);
            CHECK(vf <= vm);
            CHECK(vf == fmmpmr_oracle(m, t));
            CHECK(vm <= prev_m);
            CHECK(vf <= prev_f);
            prev_m = vm;
            prev_f = vf;
        }
    }
}

TEST_CASE("fmmpmr rejects unpaired attempts") {
    ScoreMatrix m;
    m.morphs["a"][0] = {0.9, 0.8};
    m.morphs["a"][1] = {0.9};
    CHECK(thrown_code([&] { fmmpmr(m, 0.5); }) == Errc::UnpairedAttempts);
    CHECK_NOTHROW(mmpmr(m, 0.5)); // mmpmr has no pairing requirement
}

TEST_CASE("score matrix validation") {
    ScoreMatrix empty;
    CHECK(thrown_code([&] { empty.validate(); }) == Errc::InvalidArgument);
    ScoreMatrix missing;
    missing.morphs["a"][0] = {0.5};
    CHECK(thrown_code([&] { missing.validate(); }) == Errc::CountMismatch);
    ScoreMatrix infinite;
    infinite.morphs["a"][0] = {0.5};
    infinite.morphs["a"][1] = {std::numeric_limits<double>::infinity()};
    CHECK(thrown_code([&] { infinite.validate(); }) == Errc::InvalidArgument);
}

TEST_CASE("det metrics on perfectly separated scores") {
    std::vector<double> bona = {0.1, 0.15, 0.2, 0.3, 0.4};
    std::vector<double> attack = {0.6, 0.7, 0.8, 0.9};
    DetReport r = det_metrics(attack, bona);
    CHECK(r.eer == 0.0);
    CHECK(r.bpcer_at_apcer5 == 0.0);
    CHECK(r.bpcer_at_apcer10 == 0.0);
    REQUIRE(!r.curve.empty());
    CHECK(r.curve.front().apcer == 0.0);
    CHECK(r.curve.front().bpcer == 1.0);
    CHECK(r.curve.back().apcer == 1.0);
    CHECK(r.curve.back().bpcer == 0.0);
    for (size_t i = 1; i < r.curve.size(); ++i) {
        CHECK(r.curve[i].apcer >= r.curve[i - 1].apcer);
        CHECK(r.curve[i].bpcer <= r.curve[i - 1].bpcer);
    }
}

TEST_CASE("det metrics at chance level for identical distributions") {
    SplitMix64 rng(7101);
    std::vector<double> scores(100);
    for (auto& s : scores) s = rng.next_double();
    DetReport r = det_metrics(scores, scores);
    CHECK(std::abs(r.eer - 0.5) <= 0.01); // within 1/min(n)

    DetReport degenerate = det_metrics({5.0, 5.0}, {5.0});
    CHECK(degenerate.eer == 0.5);
}

TEST_CASE("det metrics match the analytic gaussian equal-error rate") {
    // attack ~ N(2,1), bona fide ~ N(0,1): EER = Phi(-1) ~ 0.158655
    SplitMix64 rng(7111);
    std::vector<double> attack(10000), bona(10000);
    for (auto& s : attack) s = 2.0 + rng.next_gaussian();
    for (auto& s : bona) s = rng.next_gaussian();
    DetReport r = det_metrics(attack, bona);
    double analytic = std_normal_cdf(-1.0);
    CHECK(std::abs(r.eer - analytic) < 0.02);
    CHECK(r.bpcer_at_apcer10 < r.bpcer_at_apcer5 + 1e-12);
}

TEST_CASE("det metrics depend only on score ranks") {
    SplitMix64 rng(7121);
    std::vector<double> attack(300), bona(250);
    for (auto& s : attack) s = rng.next_range(-2, 3);
    for (auto& s : bona) s = rng.next_range(-3, 2);
    DetReport base = det_metrics(attack, bona);

    auto warp = [](std::vector<double> v) {
        for (auto& s : v) s = std::exp(s / 3.0); // strictly increasing
        return v;
    };
    DetReport warped = det_metrics(warp(attack), warp(bona));
    CHECK(warped.eer == base.eer);
    CHECK(warped.bpcer_at_apcer5 == base.bpcer_at_apcer5);
    CHECK(warped.bpcer_at_apcer10 == base.bpcer_at_apcer10);
    REQUIRE(warped.curve.size() == base.curve.size());
    for (size_t i = 0; i < base.curve.size(); ++i) {
        CHECK(warped.curve[i].apcer == base.curve[i].apcer);
        CHECK(warped.curve[i].bpcer == base.curve[i].bpcer);
    }
}

TEST_CASE("det metrics reject empty inputs") {
    CHECK(thrown_code([] { det_metrics({}, {1.0}); }) == Errc::InvalidArgument);
    CHECK(thrown_code([] { det_metrics({1.0}, {}); }) == Errc::InvalidArgument);
}

TEST_CASE("score matrix csv loads shuffled attempt rows in attempt order") {
    TempDir dir;
    std::string path = dir.file("scores.csv");
    write_text_file(path,
                    "morph_id,subject_idx,attempt_idx,score\n"
                    "# comment line\n"
                    "pair_b,2,2,0.62\n"
                    "pair_a,1,1,0.91\n"
                    "pair_b,1,1,0.55\n"
                    "pair_a,2,1,0.83\n"
                    "pair_b,2,1,0.61\n"
                    "\n"
                    "pair_a,1,2,0.92\n"
                    "pair_a,2,2,0.84\n"
                    "pair_b,1,2,0.56\n");
    ScoreMatrix m = load_score_matrix_csv(path);
    REQUIRE(m.morphs.size() == 2);
    CHECK(m.morphs["pair_a"][0] == std::vector<double>{0.91, 0.92});
    CHECK(m.morphs["pair_a"][1] == std::vector<double>{0.83, 0.84});
    CHECK(m.morphs["pair_b"][0] == std::vector<double>{0.55, 0.56});
    CHECK(m.morphs["pair_b"][1] == std::vector<double>{0.61, 0.62});
}

TEST_CASE("score matrix csv rejects malformed rows") {
    TempDir dir;
    auto load_with = [&](const std::string& body) {
        std::string path = dir.file("bad.csv");
        write_text_file(path, body);
        return thrown_code([&] { load_score_matrix_csv(path); });
    };
    CHECK(thrown_code([&] { load_score_matrix_csv(dir.file("absent.csv")); }) ==
          Errc::MissingFile);
    CHECK(load_with("a,3,1,0.5\n") == Errc::MalformedCsv);       // subject out of range
    CHECK(load_with("a,1,1,0.5\na,1,1,0.6\n") == Errc::MalformedCsv); // duplicate attempt
    CHECK(load_with("a,1,1\n") == Errc::MalformedCsv);           // too few cells
    CHECK(load_with("a,1,1,0.5\nb,1,1,oops\n") == Errc::MalformedCsv);
    CHECK(load_with("a,1,1.5,0.5\n") == Errc::MalformedCsv);     // fractional attempt
    CHECK(load_with("a,1,1,0.5\n") == Errc::CountMismatch);      // subject 2 missing
    CHECK(load_with("") == Errc::InvalidArgument);               // no morphs at all
}

TEST_CASE("labeled score csv splits attack and bona fide rows") {
    TempDir dir;
    std::string path = dir.file("labeled.csv");
    write_text_file(path,
                    "sample_id,score,label\n"
                    "s1,0.9,morph\n"
                    "s2,0.2,bonafide\n"
                    "s3,0.8,morph\n"
                    "s4,0.1,bonafide\n");
    auto [attack, bona] = load_labeled_scores_csv(path);
    CHECK(attack == std::vector<double>{0.9, 0.8});
    CHECK(bona == std::vector<double>{0.2, 0.1});

    write_text_file(path, "s1,0.9,genuine\n");
    CHECK(thrown_code([&] { load_labeled_scores_csv(path); }) == Errc::MalformedCsv);
    write_text_file(path, "s1,0.9,morph\n");
    CHECK(thrown_code([&] { load_labeled_scores_csv(path); }) == Errc::InvalidArgument);
}

TEST_SUITE_END();
