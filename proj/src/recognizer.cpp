#include "npvq/recognizer.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace npvq {

std::int64_t cost_lpcc(const CostModel& cm) {
    return cm.t_cl * cm.p * cm.n;
}

std::int64_t cost_mlp(const CostModel& cm) {
    const std::int64_t forward = cm.n_i * cm.n_h1 + cm.n_h1 + cm.n_h1 * cm.n_h2 +
                                 2 * cm.n_h2 + 1 + cm.c_tg * (cm.n_h1 + cm.n_h2);
    return cost_lpcc(cm) + cm.k * cm.t_cnl * (cm.l_t - cm.n_i) * forward;
}

double score_lpcc(const std::vector<LpccVector>& sentence_lpcc, const SpeakerModel& model,
                  std::uint64_t* unit_counter) {
    if (sentence_lpcc.empty())
        throw std::invalid_argument("score_lpcc: sentence is empty");
    double acc = 0.0;
    for (const LpccVector& v : sentence_lpcc) {
        acc += quantize(v, model.linear_cb).distortion;
        if (unit_counter)
            *unit_counter += static_cast<std::uint64_t>(model.linear_cb.size()) * v.size();
    }
    return acc;
}

double score_residual(const std::vector<Frame>& frames, const NonlinearCodebook& ncb,
                      ResidualMeasure measure, std::uint64_t* unit_counter) {
    if (ncb.predictors.empty())
        throw std::invalid_argument("score_residual: predictor codebook is empty");
    const std::uint64_t forward_units =
        static_cast<std::uint64_t>(kMlpInputs * kMlpHidden1 + kMlpHidden1 +
                                   kMlpHidden1 * kMlpHidden2 + 2 * kMlpHidden2 + 1 +
                                   kTanhUnitCost * (kMlpHidden1 + kMlpHidden2));
    double acc = 0.0;
    for (const Frame& frame : frames) {
        double best = std::numeric_limits<double>::infinity();
        for (const MlpPredictor& mlp : ncb.predictors)
            best = std::min(best, frame_residual(mlp, frame, measure));
        acc += best;
        if (unit_counter)
            *unit_counter += static_cast<std::uint64_t>(ncb.size()) *
                             static_cast<std::uint64_t>(kFrameLength - kMlpInputs) * forward_units;
    }
    return acc;
}

double combine(double lpcc_err, double residue_err, double alpha) {
    if (alpha < 0.0)
        throw std::invalid_argument("combine: alpha must be >= 0");
    return lpcc_err + alpha * residue_err;
}

UtteranceScores score_utterance(const std::vector<Frame>& frames,
                                const std::vector<LpccVector>& sentence_lpcc,
                                const std::vector<SpeakerModel>& models, int k,
                                ResidualMeasure measure, double alpha) {
    if (models.empty())
        throw std::invalid_argument("identify: no speaker models");
    if (k < 1 || static_cast<std::size_t>(k) > models.size())
        throw std::invalid_argument("identify: k must satisfy 1 <= k <= number of speakers");
    if (frames.size() != sentence_lpcc.size())
        throw std::invalid_argument("identify: frames and lpcc must align");
    if (frames.empty())
        throw std::invalid_argument("identify: empty sentence");

    const bool all_have_ncb =
        std::all_of(models.begin(), models.end(),
                    [](const SpeakerModel& m) { return m.nonlinear_cb.has_value(); });
    if (!all_have_ncb && alpha > 0.0)
        throw std::invalid_argument(
            "identify: alpha > 0 requires a nonlinear codebook for every speaker");

    UtteranceScores scores;
    scores.k = k;
    scores.frame_count = frames.size();

    std::vector<std::pair<double, std::size_t>> order; // (lpcc score, model index)
    order.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double s = score_lpcc(sentence_lpcc, models[i], &scores.raw_units);
        scores.lpcc_scores[models[i].speaker_id] = s;
        order.emplace_back(s, i);
    }
    std::sort(order.begin(), order.end());

    for (int r = 0; r < k; ++r) {
        const SpeakerModel& model = models[order[static_cast<std::size_t>(r)].second];
        scores.preselected.push_back(model.speaker_id);
        if (all_have_ncb)
            scores.residual_scores[model.speaker_id] =
                score_residual(frames, *model.nonlinear_cb, measure, &scores.raw_units);
    }
    return scores;
}

std::string decide(const UtteranceScores& scores, double alpha) {
    std::string best;
    double best_combined = std::numeric_limits<double>::infinity();
    double best_lpcc = std::numeric_limits<double>::infinity();
    for (const std::string& id : scores.preselected) {
        const double lpcc = scores.lpcc_scores.at(id);
        const auto res = scores.residual_scores.find(id);
        const double combined =
            combine(lpcc, res == scores.residual_scores.end() ? 0.0 : res->second,
                    res == scores.residual_scores.end() ? 0.0 : alpha);
        const bool wins = best.empty() || combined < best_combined ||
                          (combined == best_combined &&
                           (lpcc < best_lpcc || (lpcc == best_lpcc && id < best)));
        if (wins) {
            best = id;
            best_combined = combined;
            best_lpcc = lpcc;
        }
    }
    return best;
}

RecognitionResult identify(const std::vector<Frame>& frames,
                           const std::vector<LpccVector>& sentence_lpcc,
                           const std::vector<SpeakerModel>& models, double alpha, int k,
                           ResidualMeasure measure) {
    const UtteranceScores scores = score_utterance(frames, sentence_lpcc, models, k, measure, alpha);

    RecognitionResult result;
    result.alpha = alpha;
    result.k = k;
    result.lpcc_scores = scores.lpcc_scores;
    result.residual_scores = scores.residual_scores;
    result.preselected = scores.preselected;
    for (const std::string& id : scores.preselected) {
        const auto res = scores.residual_scores.find(id);
        result.combined_scores[id] =
            combine(scores.lpcc_scores.at(id),
                    res == scores.residual_scores.end() ? 0.0 : res->second,
                    res == scores.residual_scores.end() ? 0.0 : alpha);
    }
    result.decided_speaker = decide(scores, alpha);

    if (scores.raw_units % scores.frame_count != 0)
        throw std::logic_error("identify: instruction units are not a multiple of the frame count");
    result.instruction_count = static_cast<std::int64_t>(scores.raw_units / scores.frame_count);
    return result;
}

} // namespace npvq
