#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "npvq/audio.hpp"

namespace npvq {

inline constexpr int kFrameLength = 240;   // 30 ms at 8 kHz
inline constexpr int kFrameHop = 80;       // 2/3 overlap between frames
inline constexpr int kLpcOrder = 10;
inline constexpr int kCepstralOrder = 12;
inline constexpr double kPreEmphasis = 0.95;

// One analysis frame. `samples` carries the Hamming-windowed values used for
// LPC analysis; `raw_samples` keeps the unwindowed values, which the
// predictor codebooks need for residual scoring.
struct Frame {
    std::array<double, kFrameLength> samples;
    std::array<double, kFrameLength> raw_samples;
    std::size_t start_index = 0;
};

// 12 cepstral coefficients derived from the LPC fit of one frame.
using LpccVector = std::vector<double>;

std::vector<double> hamming_window(int length);

// Halves the sample rate: 63-tap windowed-sinc low-pass (3.4 kHz cutoff)
// followed by drop-by-2.
AudioSignal decimate_by_2(const AudioSignal& signal);

// Brings raw audio into analysis form: resample 16 kHz input to 8 kHz,
// pre-emphasize with y[n] = x[n] - 0.95 x[n-1], peak-normalize to [-1, 1].
// Must be called exactly once per signal; calling it on an already prepared
// signal is an error.
AudioSignal prepare(const AudioSignal& signal);

// Splits a prepared signal into overlapping Hamming-windowed frames.
// A trailing partial frame is discarded; a signal shorter than one frame
// gives an empty sequence.
std::vector<Frame> frames(const AudioSignal& signal);

// r[k] = sum_n s[n] s[n+k] for k = 0..max_lag.
std::vector<double> autocorrelate(std::span<const double> samples, int max_lag);

struct LpcAnalysis {
    // Predictor coefficients a_1..a_p with x^[n] = sum_k a_k x[n-k].
    std::vector<double> lpc;
    std::vector<double> reflection;
    double pred_error = 0.0;
};

// Levinson-Durbin recursion on an autocorrelation sequence.
LpcAnalysis levinson_durbin(std::span<const double> r, int order);

// Step-up / step-down between reflection coefficients and predictor
// coefficients (both in the x^[n] = sum a_k x[n-k] convention).
std::vector<double> lpc_from_reflection(std::span<const double> reflection);
std::vector<double> reflection_from_lpc(std::span<const double> lpc);

// c_n = a_n + sum_{k=1}^{n-1} (k/n) c_k a_{n-k}; the cepstrum of the
// synthesis filter 1/A(z). Rejects unstable models.
LpccVector lpc_to_cepstrum(std::span<const double> lpc, int cep_order);

// Frames plus their LPCC vectors. Degenerate frames (zero energy, or an
// autocorrelation the recursion cannot factor) carry no usable spectral
// information and are dropped; `skipped_degenerate` counts them.
struct FeatureSet {
    std::vector<Frame> frames;
    std::vector<LpccVector> lpcc;
    int skipped_degenerate = 0;
};

FeatureSet extract_features(const AudioSignal& prepared);

} // namespace npvq
