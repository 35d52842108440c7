#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "npvq/corpus.hpp"
#include "npvq/model_io.hpp"
#include "npvq/recognizer.hpp"

namespace npvq {

struct TrainOptions {
    int linear_bits = 7;
    int nonlinear_bits = 5;
    int lloyd_iters = 0;
    bool train_nonlinear = true;
    SplitMethod split_method = SplitMethod::Hyperplane;
    DistanceKind distance = DistanceKind::Mae;
    int epochs_per_start = 8;
    int num_random_starts = 4;
    std::uint64_t seed = 0;
};

// Per-speaker training over the corpus train split. Deterministic under a
// fixed seed; speakers train in parallel on independent seed streams.
std::vector<SpeakerModel> train_models(const Corpus& corpus, const TrainOptions& options);

// Convenience wrapper bundling trained models with their configuration.
ModelFile train_model_file(const Corpus& corpus, const TrainOptions& options);

struct DecisionRecord {
    std::string true_speaker;
    std::string utterance;
    std::string decided;
    bool correct = false;
    std::int64_t instruction_count = 0;
};

struct EvalReport {
    double error_rate = 0.0;
    int total = 0;
    int wrong = 0;
    double alpha = 0.0;
    int k = 0;
    std::string measure = "mae";
    // confusion[true][decided] = count
    std::map<std::string, std::map<std::string, int>> confusion;
    std::vector<DecisionRecord> decisions;
};

// One identify() per test utterance; closed-set error rate.
EvalReport evaluate(const std::vector<SpeakerModel>& models, const Corpus& corpus, double alpha,
                    int k, ResidualMeasure measure = ResidualMeasure::Mae);

std::string report_to_json(const EvalReport& report);

struct AlphaSweepRow {
    double alpha = 0.0;
    double error_rate = 0.0;
};

// Scores every test utterance once, then re-decides per alpha (preselection
// and residuals do not depend on alpha).
std::vector<AlphaSweepRow> sweep_alpha(const std::vector<SpeakerModel>& models,
                                       const Corpus& corpus, const std::vector<double>& alphas,
                                       int k, ResidualMeasure measure = ResidualMeasure::Mae);

struct KSweepRow {
    int k = 0;
    double error_rate = 0.0;
    std::int64_t instruction_count = 0;
};

std::vector<KSweepRow> sweep_k(const std::vector<SpeakerModel>& models, const Corpus& corpus,
                               double alpha, const std::vector<int>& ks,
                               ResidualMeasure measure = ResidualMeasure::Mae);

// Operating point from a sweep: the middle row of the minimal-error set,
// i.e. the center of the optimal plateau rather than its edge.
AlphaSweepRow choose_alpha(const std::vector<AlphaSweepRow>& rows);

// Plot-ready whitespace-separated data files.
void write_alpha_sweep(const std::filesystem::path& path, const std::vector<AlphaSweepRow>& rows);
void write_k_sweep(const std::filesystem::path& path, const std::vector<KSweepRow>& rows);

// "0.5,1,2", "lin:lo:hi:n" or "log:lo:hi:n".
std::vector<double> parse_alpha_spec(const std::string& spec);

} // namespace npvq
