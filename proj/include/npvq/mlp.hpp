#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "npvq/dsp.hpp"
#include "npvq/rng.hpp"

namespace npvq {

inline constexpr int kMlpInputs = 10;
inline constexpr int kMlpHidden1 = 4;
inline constexpr int kMlpHidden2 = 2;
inline constexpr int kMlpParams =
    (kMlpInputs * kMlpHidden1 + kMlpHidden1) + (kMlpHidden1 * kMlpHidden2 + kMlpHidden2) +
    (kMlpHidden2 + 1); // 57

// 10-4-2-1 sample predictor: two tanh hidden layers, linear output.
// history[i] = x[n-10+i], output is the predicted x[n].
struct MlpPredictor {
    std::array<std::array<double, kMlpInputs>, kMlpHidden1> w1{};
    std::array<double, kMlpHidden1> b1{};
    std::array<std::array<double, kMlpHidden1>, kMlpHidden2> w2{};
    std::array<double, kMlpHidden2> b2{};
    std::array<double, kMlpHidden2> w3{};
    double b3 = 0.0;
};

enum class ResidualMeasure { Mae, Mse };

struct TrainConfig {
    int epochs_per_start = 8;
    int num_random_starts = 4;
    double lm_lambda_init = 1e-3;
    double lm_lambda_factor = 10.0;
    std::uint64_t seed = 0;
};

struct TrainingSample {
    std::array<double, kMlpInputs> history{};
    double target = 0.0;
};

double predict(const MlpPredictor& mlp, std::span<const double> history);

// Mean |e| or mean e^2 of e[n] = raw[n] - predict(raw[n-10..n-1]) over
// n = 10..239 (230 residuals per frame; histories never cross frames).
double frame_residual(const MlpPredictor& mlp, const Frame& frame, ResidualMeasure measure);

// Parameter vector layout: w1 row-major, b1, w2 row-major, b2, w3, b3.
std::array<double, kMlpParams> parameters(const MlpPredictor& mlp);
MlpPredictor predictor_from_parameters(std::span<const double> params);

// Analytic d(output)/d(parameter) for one history, written to `row`.
void jacobian_row(const MlpPredictor& mlp, std::span<const double> history,
                  std::span<double> row);

// Rows = samples, columns = the 57 parameters, row-major.
std::vector<double> jacobian(const MlpPredictor& mlp, const std::vector<TrainingSample>& samples);

double mean_squared_error(const MlpPredictor& mlp, const std::vector<TrainingSample>& samples);

struct LmResult {
    MlpPredictor mlp;
    double final_mse = 0.0;
    // Set when the damped normal equations could not be solved even at the
    // largest damping tried; the parameters returned are the last good ones.
    bool convergence_warning = false;
};

// Levenberg-Marquardt: per epoch solve (J'J + lambda I) d = J'e, accept the
// step only if the MSE drops (lambda /= factor), otherwise raise lambda and
// retry, up to 10 escalations per epoch.
LmResult lm_train(const MlpPredictor& start, const std::vector<TrainingSample>& samples,
                  const TrainConfig& config);

// Uniform [-0.5, 0.5] parameters.
MlpPredictor random_predictor(Rng& rng);

struct MultistartResult {
    MlpPredictor mlp;
    double final_mse = 0.0;
};

// Trains num_random_starts random initializations plus the warm start when
// given (one extra random start otherwise) and keeps the candidate with the
// lowest final training MSE.
MultistartResult train_multistart(const std::vector<TrainingSample>& samples,
                                  const TrainConfig& config,
                                  const MlpPredictor* warm_start = nullptr);

} // namespace npvq
