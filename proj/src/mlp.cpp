#include "npvq/mlp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace npvq {

namespace {

struct ForwardState {
    std::array<double, kMlpHidden1> a1;
    std::array<double, kMlpHidden2> a2;
    double out;
};

ForwardState forward(const MlpPredictor& mlp, std::span<const double> history) {
    ForwardState s;
    for (int j = 0; j < kMlpHidden1; ++j) {
        double z = mlp.b1[static_cast<std::size_t>(j)];
        for (int i = 0; i < kMlpInputs; ++i)
            z += mlp.w1[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                 history[static_cast<std::size_t>(i)];
        s.a1[static_cast<std::size_t>(j)] = std::tanh(z);
    }
    for (int j = 0; j < kMlpHidden2; ++j) {
        double z = mlp.b2[static_cast<std::size_t>(j)];
        for (int i = 0; i < kMlpHidden1; ++i)
            z += mlp.w2[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                 s.a1[static_cast<std::size_t>(i)];
        s.a2[static_cast<std::size_t>(j)] = std::tanh(z);
    }
    s.out = mlp.b3;
    for (int j = 0; j < kMlpHidden2; ++j)
        s.out += mlp.w3[static_cast<std::size_t>(j)] * s.a2[static_cast<std::size_t>(j)];
    return s;
}

// Cholesky factorization/solve of an SPD system, in place. Returns false if
// a pivot collapses.
bool cholesky_solve(std::vector<double>& a, std::array<double, kMlpParams>& b) {
    constexpr int n = kMlpParams;
    for (int c = 0; c < n; ++c) {
        double diag = a[static_cast<std::size_t>(c * n + c)];
        for (int k = 0; k < c; ++k) {
            const double l = a[static_cast<std::size_t>(c * n + k)];
            diag -= l * l;
        }
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        const double root = std::sqrt(diag);
        a[static_cast<std::size_t>(c * n + c)] = root;
        for (int r = c + 1; r < n; ++r) {
            double v = a[static_cast<std::size_t>(r * n + c)];
            for (int k = 0; k < c; ++k)
                v -= a[static_cast<std::size_t>(r * n + k)] * a[static_cast<std::size_t>(c * n + k)];
            a[static_cast<std::size_t>(r * n + c)] = v / root;
        }
    }
    // L y = b
    for (int r = 0; r < n; ++r) {
        double v = b[static_cast<std::size_t>(r)];
        for (int k = 0; k < r; ++k)
            v -= a[static_cast<std::size_t>(r * n + k)] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(r)] = v / a[static_cast<std::size_t>(r * n + r)];
    }
    // L' x = y
    for (int r = n; r-- > 0;) {
        double v = b[static_cast<std::size_t>(r)];
        for (int k = r + 1; k < n; ++k)
            v -= a[static_cast<std::size_t>(k * n + r)] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(r)] = v / a[static_cast<std::size_t>(r * n + r)];
    }
    return true;
}

} // namespace

double predict(const MlpPredictor& mlp, std::span<const double> history) {
    if (history.size() != kMlpInputs)
        throw std::invalid_argument("predict: history must hold 10 samples");
    return forward(mlp, history).out;
}

double frame_residual(const MlpPredictor& mlp, const Frame& frame, ResidualMeasure measure) {
    double acc = 0.0;
    for (int n = kMlpInputs; n < kFrameLength; ++n) {
        const std::span<const double> history(frame.raw_samples.data() + n - kMlpInputs,
                                              kMlpInputs);
        const double e = frame.raw_samples[static_cast<std::size_t>(n)] - forward(mlp, history).out;
        acc += (measure == ResidualMeasure::Mae) ? std::fabs(e) : e * e;
    }
    return acc / static_cast<double>(kFrameLength - kMlpInputs);
}

std::array<double, kMlpParams> parameters(const MlpPredictor& mlp) {
    std::array<double, kMlpParams> p{};
    std::size_t idx = 0;
    for (const auto& row : mlp.w1)
        for (double w : row) p[idx++] = w;
    for (double b : mlp.b1) p[idx++] = b;
    for (const auto& row : mlp.w2)
        for (double w : row) p[idx++] = w;
    for (double b : mlp.b2) p[idx++] = b;
    for (double w : mlp.w3) p[idx++] = w;
    p[idx++] = mlp.b3;
    return p;
}

MlpPredictor predictor_from_parameters(std::span<const double> params) {
    if (params.size() != kMlpParams)
        throw std::invalid_argument("predictor_from_parameters: need 57 parameters");
    MlpPredictor mlp;
    std::size_t idx = 0;
    for (auto& row : mlp.w1)
        for (double& w : row) w = params[idx++];
    for (double& b : mlp.b1) b = params[idx++];
    for (auto& row : mlp.w2)
        for (double& w : row) w = params[idx++];
    for (double& b : mlp.b2) b = params[idx++];
    for (double& w : mlp.w3) w = params[idx++];
    mlp.b3 = params[idx++];
    return mlp;
}

void jacobian_row(const MlpPredictor& mlp, std::span<const double> history,
                  std::span<double> row) {
    if (row.size() != kMlpParams)
        throw std::invalid_argument("jacobian_row: row must hold 57 entries");
    const ForwardState s = forward(mlp, history);

    std::array<double, kMlpHidden2> dz2;
    for (int j = 0; j < kMlpHidden2; ++j)
        dz2[static_cast<std::size_t>(j)] =
            mlp.w3[static_cast<std::size_t>(j)] *
            (1.0 - s.a2[static_cast<std::size_t>(j)] * s.a2[static_cast<std::size_t>(j)]);

    std::array<double, kMlpHidden1> dz1;
    for (int i = 0; i < kMlpHidden1; ++i) {
        double acc = 0.0;
        for (int j = 0; j < kMlpHidden2; ++j)
            acc += dz2[static_cast<std::size_t>(j)] *
                   mlp.w2[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        dz1[static_cast<std::size_t>(i)] =
            acc * (1.0 - s.a1[static_cast<std::size_t>(i)] * s.a1[static_cast<std::size_t>(i)]);
    }

    std::size_t idx = 0;
    for (int j = 0; j < kMlpHidden1; ++j)
        for (int i = 0; i < kMlpInputs; ++i)
            row[idx++] = dz1[static_cast<std::size_t>(j)] * history[static_cast<std::size_t>(i)];
    for (int j = 0; j < kMlpHidden1; ++j) row[idx++] = dz1[static_cast<std::size_t>(j)];
    for (int j = 0; j < kMlpHidden2; ++j)
        for (int i = 0; i < kMlpHidden1; ++i)
            row[idx++] = dz2[static_cast<std::size_t>(j)] * s.a1[static_cast<std::size_t>(i)];
    for (int j = 0; j < kMlpHidden2; ++j) row[idx++] = dz2[static_cast<std::size_t>(j)];
    for (int j = 0; j < kMlpHidden2; ++j) row[idx++] = s.a2[static_cast<std::size_t>(j)];
    row[idx++] = 1.0; // output bias
}

std::vector<double> jacobian(const MlpPredictor& mlp, const std::vector<TrainingSample>& samples) {
    if (samples.empty())
        throw std::invalid_argument("jacobian: samples must be nonempty");
    std::vector<double> J(samples.size() * kMlpParams);
    for (std::size_t i = 0; i < samples.size(); ++i)
        jacobian_row(mlp, samples[i].history, std::span<double>(J.data() + i * kMlpParams, kMlpParams));
    return J;
}

double mean_squared_error(const MlpPredictor& mlp, const std::vector<TrainingSample>& samples) {
    double acc = 0.0;
    for (const TrainingSample& s : samples) {
        const double e = s.target - forward(mlp, s.history).out;
        acc += e * e;
    }
    return acc / static_cast<double>(samples.size());
}

LmResult lm_train(const MlpPredictor& start, const std::vector<TrainingSample>& samples,
                  const TrainConfig& config) {
    if (samples.empty())
        throw std::invalid_argument("lm_train: samples must be nonempty");

    constexpr int n = kMlpParams;
    LmResult result;
    result.mlp = start;
    result.final_mse = mean_squared_error(start, samples);

    std::array<double, n> params = parameters(start);
    double lambda = config.lm_lambda_init;

    std::vector<double> jtj(static_cast<std::size_t>(n) * n);
    std::vector<double> damped;
    std::array<double, n> jte{};
    std::array<double, n> row{};

    for (int epoch = 0; epoch < config.epochs_per_start; ++epoch) {
        // Build J'J and J'e at the current parameters.
        std::fill(jtj.begin(), jtj.end(), 0.0);
        jte.fill(0.0);
        for (const TrainingSample& s : samples) {
            jacobian_row(result.mlp, s.history, row);
            const double e = s.target - forward(result.mlp, s.history).out;
            for (int r = 0; r < n; ++r) {
                const double jr = row[static_cast<std::size_t>(r)];
                jte[static_cast<std::size_t>(r)] += jr * e;
                double* out = jtj.data() + static_cast<std::size_t>(r) * n + r;
                const double* in = row.data() + r;
                for (int c = r; c < n; ++c) *out++ += jr * *in++;
            }
        }
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < r; ++c)
                jtj[static_cast<std::size_t>(r) * n + c] = jtj[static_cast<std::size_t>(c) * n + r];

        bool accepted = false;
        bool solver_failed_at_max = false;
        for (int attempt = 0; attempt < 10; ++attempt) {
            damped = jtj;
            for (int d = 0; d < n; ++d) damped[static_cast<std::size_t>(d) * n + d] += lambda;
            std::array<double, n> delta = jte;
            if (!cholesky_solve(damped, delta)) {
                solver_failed_at_max = true;
                lambda *= config.lm_lambda_factor;
                continue;
            }
            solver_failed_at_max = false;
            std::array<double, n> trial = params;
            for (int d = 0; d < n; ++d) trial[static_cast<std::size_t>(d)] += delta[static_cast<std::size_t>(d)];
            const MlpPredictor candidate = predictor_from_parameters(trial);
            const double mse = mean_squared_error(candidate, samples);
            if (std::isfinite(mse) && mse < result.final_mse) {
                params = trial;
                result.mlp = candidate;
                result.final_mse = mse;
                lambda /= config.lm_lambda_factor;
                accepted = true;
                break;
            }
            lambda *= config.lm_lambda_factor;
        }

        if (!accepted) {
            result.convergence_warning = solver_failed_at_max;
            break; // no descent direction left at this damping range
        }
    }
    return result;
}

MlpPredictor random_predictor(Rng& rng) {
    std::array<double, kMlpParams> p;
    for (double& v : p) v = rng.uniform(-0.5, 0.5);
    return predictor_from_parameters(p);
}

MultistartResult train_multistart(const std::vector<TrainingSample>& samples,
                                  const TrainConfig& config, const MlpPredictor* warm_start) {
    if (samples.empty())
        throw std::invalid_argument("train_multistart: samples must be nonempty");

    Rng rng(config.seed);
    std::vector<MlpPredictor> starts;
    if (warm_start != nullptr) starts.push_back(*warm_start);
    const int random_starts = config.num_random_starts + (warm_start == nullptr ? 1 : 0);
    for (int i = 0; i < random_starts; ++i) starts.push_back(random_predictor(rng));

    MultistartResult best;
    best.final_mse = std::numeric_limits<double>::infinity();
    for (const MlpPredictor& start : starts) {
        LmResult r = lm_train(start, samples, config);
        if (r.final_mse < best.final_mse) {
            best.final_mse = r.final_mse;
            best.mlp = r.mlp;
        }
    }
    return best;
}

} // namespace npvq
