#pragma once

#include <cstddef>
#include <vector>

#include "npvq/codebook.hpp"
#include "npvq/mlp.hpp"

namespace npvq {

// Per-speaker codebook whose "centroids" are MLP sample predictors; a frame
// is near a centroid when that predictor leaves a small residual on it.
struct NonlinearCodebook {
    std::vector<MlpPredictor> predictors;
    int size_bits = 0;
    int lloyd_iterations_done = 0;
    // Mean per-frame MAE residual recorded after every training iteration;
    // non-increasing by construction.
    std::vector<double> distortion_history;

    std::size_t size() const { return predictors.size(); }
};

// Partition frame indices by nearest linear-codebook centroid of their LPCC
// vectors. clusters[c] lists the frames owned by centroid c.
std::vector<std::vector<std::size_t>> cluster_by_linear(const std::vector<Frame>& frames,
                                                        const std::vector<LpccVector>& lpcc,
                                                        const LinearCodebook& cb);

// Partition frame indices by lowest MAE prediction residual; ties go to the
// lowest predictor index.
std::vector<std::vector<std::size_t>> assign_by_residual(const std::vector<Frame>& frames,
                                                         const NonlinearCodebook& ncb);

// All (history, target) pairs drawn from the raw samples of the listed
// frames, capped by seeded uniform subsampling.
std::vector<TrainingSample> gather_training_samples(const std::vector<Frame>& frames,
                                                    const std::vector<std::size_t>& indices,
                                                    std::size_t max_samples,
                                                    std::uint64_t seed);

// Iteration 0 clusters by the linear codebook and trains one multistart MLP
// per cluster; iterations 1..lloyd_iters recluster by residual and retrain
// warm-started. A retrained predictor replaces the previous one only if it
// lowers the cluster's MAE residual, and empty clusters keep their
// predictor, so the recorded distortion never rises.
NonlinearCodebook train_nonlinear_codebook(const std::vector<Frame>& frames,
                                           const std::vector<LpccVector>& lpcc,
                                           const LinearCodebook& clustering_cb, int size_bits,
                                           int lloyd_iters, const TrainConfig& config);

} // namespace npvq
