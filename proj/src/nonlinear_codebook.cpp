#include "npvq/nonlinear_codebook.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

#include "npvq/parallel.hpp"
#include "npvq/rng.hpp"

namespace npvq {

namespace {

constexpr std::size_t kMaxClusterSamples = 20000;

double cluster_mae(const MlpPredictor& mlp, const std::vector<Frame>& frames,
                   const std::vector<std::size_t>& indices) {
    double acc = 0.0;
    for (std::size_t i : indices) acc += frame_residual(mlp, frames[i], ResidualMeasure::Mae);
    return acc;
}

} // namespace

std::vector<std::vector<std::size_t>> cluster_by_linear(const std::vector<Frame>& frames,
                                                        const std::vector<LpccVector>& lpcc,
                                                        const LinearCodebook& cb) {
    if (frames.size() != lpcc.size())
        throw std::invalid_argument("cluster_by_linear: frames and lpcc must align");
    std::vector<std::vector<std::size_t>> clusters(cb.size());
    for (std::size_t i = 0; i < lpcc.size(); ++i)
        clusters[quantize(lpcc[i], cb).nearest_index].push_back(i);
    return clusters;
}

std::vector<std::vector<std::size_t>> assign_by_residual(const std::vector<Frame>& frames,
                                                         const NonlinearCodebook& ncb) {
    if (ncb.predictors.empty())
        throw std::invalid_argument("assign_by_residual: codebook is empty");
    std::vector<std::vector<std::size_t>> clusters(ncb.size());
    std::vector<std::size_t> choice(frames.size());
    parallel_for(frames.size(), [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t p = 0; p < ncb.predictors.size(); ++p) {
            const double r = frame_residual(ncb.predictors[p], frames[i], ResidualMeasure::Mae);
            if (r < best) {
                best = r;
                arg = p;
            }
        }
        choice[i] = arg;
    });
    for (std::size_t i = 0; i < frames.size(); ++i) clusters[choice[i]].push_back(i);
    return clusters;
}

std::vector<TrainingSample> gather_training_samples(const std::vector<Frame>& frames,
                                                    const std::vector<std::size_t>& indices,
                                                    std::size_t max_samples,
                                                    std::uint64_t seed) {
    constexpr int per_frame = kFrameLength - kMlpInputs;
    std::vector<TrainingSample> samples;
    samples.reserve(indices.size() * static_cast<std::size_t>(per_frame));
    for (std::size_t f : indices) {
        const Frame& frame = frames[f];
        for (int n = kMlpInputs; n < kFrameLength; ++n) {
            TrainingSample s;
            for (int i = 0; i < kMlpInputs; ++i)
                s.history[static_cast<std::size_t>(i)] =
                    frame.raw_samples[static_cast<std::size_t>(n - kMlpInputs + i)];
            s.target = frame.raw_samples[static_cast<std::size_t>(n)];
            samples.push_back(s);
        }
    }
    if (samples.size() > max_samples) {
        // Partial Fisher-Yates: the first max_samples entries become a
        // uniform subsample, order-stable under the fixed seed.
        Rng rng(mix_seed(seed, 0x5ab5a31eull));
        for (std::size_t i = 0; i < max_samples; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(samples.size() - i));
            std::swap(samples[i], samples[j]);
        }
        samples.resize(max_samples);
    }
    return samples;
}

NonlinearCodebook train_nonlinear_codebook(const std::vector<Frame>& frames,
                                           const std::vector<LpccVector>& lpcc,
                                           const LinearCodebook& clustering_cb, int size_bits,
                                           int lloyd_iters, const TrainConfig& config) {
    if (frames.empty())
        throw std::invalid_argument("train_nonlinear_codebook: no frames to train on");
    if (frames.size() != lpcc.size())
        throw std::invalid_argument("train_nonlinear_codebook: frames and lpcc must align");
    const std::size_t target = std::size_t{1} << size_bits;
    if (clustering_cb.size() != target)
        throw std::invalid_argument(
            "train_nonlinear_codebook: clustering codebook size must equal 2^size_bits");
    if (lloyd_iters < 0)
        throw std::invalid_argument("train_nonlinear_codebook: lloyd_iters must be >= 0");

    NonlinearCodebook ncb;
    ncb.size_bits = size_bits;
    ncb.predictors.resize(target);

    const auto record_distortion = [&](const std::vector<std::vector<std::size_t>>& clusters) {
        double acc = 0.0;
        for (std::size_t c = 0; c < target; ++c)
            acc += cluster_mae(ncb.predictors[c], frames, clusters[c]);
        ncb.distortion_history.push_back(acc / static_cast<double>(frames.size()));
    };

    // Iteration 0: cluster with the linear codebook, multistart training.
    auto clusters = cluster_by_linear(frames, lpcc, clustering_cb);
    parallel_for(target, [&](std::size_t c) {
        TrainConfig local = config;
        local.seed = mix_seed(config.seed, c);
        if (clusters[c].empty()) {
            // No data for this cell; park a random predictor there and let
            // the residual reassignment feed it later.
            Rng rng(local.seed);
            ncb.predictors[c] = random_predictor(rng);
            return;
        }
        const auto samples =
            gather_training_samples(frames, clusters[c], kMaxClusterSamples, local.seed);
        ncb.predictors[c] = train_multistart(samples, local, nullptr).mlp;
    });
    record_distortion(clusters);

    for (int iter = 1; iter <= lloyd_iters; ++iter) {
        if (iter == 1) clusters = assign_by_residual(frames, ncb);
        std::vector<MlpPredictor> next(target);
        parallel_for(target, [&](std::size_t c) {
            if (clusters[c].empty()) {
                next[c] = ncb.predictors[c];
                return;
            }
            TrainConfig local = config;
            local.seed = mix_seed(config.seed,
                                  (static_cast<std::uint64_t>(iter) << 32) | c);
            const auto samples =
                gather_training_samples(frames, clusters[c], kMaxClusterSamples, local.seed);

            // Candidates: warm start from the current predictor plus fresh
            // random starts. The current predictor also competes unchanged;
            // the winner is whichever quantizes this cluster best (MAE), so
            // a retrain can never make the codebook worse.
            Rng rng(local.seed);
            std::vector<MlpPredictor> candidates;
            candidates.push_back(ncb.predictors[c]);
            candidates.push_back(lm_train(ncb.predictors[c], samples, local).mlp);
            for (int s = 0; s < local.num_random_starts; ++s)
                candidates.push_back(lm_train(random_predictor(rng), samples, local).mlp);

            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                const double d = cluster_mae(candidates[i], frames, clusters[c]);
                if (d < best) {
                    best = d;
                    arg = i;
                }
            }
            next[c] = candidates[arg];
        });
        ncb.predictors = std::move(next);
        ncb.lloyd_iterations_done = iter;

        clusters = assign_by_residual(frames, ncb);
        record_distortion(clusters);
    }
    return ncb;
}

} // namespace npvq
