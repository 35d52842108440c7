#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npvq/codebook.hpp"
#include "npvq/mlp.hpp"
#include "npvq/nonlinear_codebook.hpp"

namespace npvq {

struct SpeakerModel {
    std::string speaker_id;
    LinearCodebook linear_cb;
    std::optional<NonlinearCodebook> nonlinear_cb;
};

// Accounting units for the closed-form complexity model: one unit is one
// multiply-accumulate; a tanh evaluation is charged c_tg units. The runtime
// counters in identify() increment in exactly these units, so the model and
// the counters agree to the last unit.
struct CostModel {
    std::int64_t t_cl = 128; // linear codebook size
    std::int64_t t_cnl = 32; // predictor codebook size
    std::int64_t k = 2;      // preselected speakers
    std::int64_t l_t = 240;  // frame length
    std::int64_t n_i = 10;
    std::int64_t n_h1 = 4;
    std::int64_t n_h2 = 2;
    std::int64_t c_tg = 9;   // units per nonlinear transfer function
    std::int64_t p = 12;     // feature dimension
    std::int64_t n = 1;      // number of speakers
};

// Per frame: every speaker's linear codebook, p units per centroid.
std::int64_t cost_lpcc(const CostModel& cm);

// Per frame: cost_lpcc plus filtering the frame through the K preselected
// speakers' predictor codebooks.
std::int64_t cost_mlp(const CostModel& cm);

// c_tg used by the runtime counters.
inline constexpr std::int64_t kTanhUnitCost = 9;

// Accumulated (summed over frames) minimal quantization distortion of a
// sentence against one speaker's linear codebook.
double score_lpcc(const std::vector<LpccVector>& sentence_lpcc, const SpeakerModel& model,
                  std::uint64_t* unit_counter = nullptr);

// Accumulated best-predictor residual of the sentence's frames against a
// predictor codebook.
double score_residual(const std::vector<Frame>& frames, const NonlinearCodebook& ncb,
                      ResidualMeasure measure, std::uint64_t* unit_counter = nullptr);

// error = LPCC_error + alpha * residue_error
double combine(double lpcc_err, double residue_err, double alpha);

struct RecognitionResult {
    std::string decided_speaker;
    std::map<std::string, double> lpcc_scores;      // all speakers
    std::map<std::string, double> residual_scores;  // preselected only
    std::map<std::string, double> combined_scores;  // preselected only
    std::vector<std::string> preselected;
    double alpha = 0.0;
    int k = 0;
    // Accounting units per frame; equals cost_mlp of the matching CostModel.
    std::int64_t instruction_count = 0;
};

// Scores an utterance against all speakers and keeps the pieces the fusion
// rule needs; identify() and the sweeps share this.
struct UtteranceScores {
    std::map<std::string, double> lpcc_scores;
    std::map<std::string, double> residual_scores;
    std::vector<std::string> preselected; // lowest LPCC score first
    std::uint64_t raw_units = 0;
    std::size_t frame_count = 0;
    int k = 0;
};

UtteranceScores score_utterance(const std::vector<Frame>& frames,
                                const std::vector<LpccVector>& sentence_lpcc,
                                const std::vector<SpeakerModel>& models, int k,
                                ResidualMeasure measure, double alpha);

// Fusion decision at a given alpha over precomputed scores.
std::string decide(const UtteranceScores& scores, double alpha);

// Full pipeline: LPCC scores for all N speakers, K-preselection, residual
// scoring of the preselected codebooks, fused argmin decision.
RecognitionResult identify(const std::vector<Frame>& frames,
                           const std::vector<LpccVector>& sentence_lpcc,
                           const std::vector<SpeakerModel>& models, double alpha, int k,
                           ResidualMeasure measure = ResidualMeasure::Mae);

} // namespace npvq
