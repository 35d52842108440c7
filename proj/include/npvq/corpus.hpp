#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "npvq/audio.hpp"
#include "npvq/rng.hpp"

namespace npvq {

struct Utterance {
    std::string name;
    AudioSignal signal; // prepared
};

struct SpeakerData {
    std::string speaker_id;
    std::vector<Utterance> train;
    std::vector<Utterance> test;
};

struct Corpus {
    std::vector<SpeakerData> speakers; // sorted by speaker_id
};

// Loads root/<speaker_id>/{train,test}/*.wav, prepares every signal.
// Speakers and utterances come back sorted for reproducibility.
Corpus load_corpus(const std::filesystem::path& root);

// One synthetic speaker: an order-10 all-pole filter driven by white noise,
// optionally waveshaped with tanh(gain * x) so that half the population has
// structure a linear model cannot capture.
struct SpeakerGenerator {
    std::vector<double> ar;      // a_1..a_10, x[n] = sum a_k x[n-k] + e[n]
    double nonlinear_gain = 0.0; // 0 = linear speaker
    double noise_level = 0.0;    // additive noise, relative RMS
};

struct SyntheticSpec {
    int num_speakers = 10;
    int train_utterances = 5;
    int test_utterances = 5;
    double min_duration_s = 1.0;
    double max_duration_s = 3.0;
    double pole_radius_min = 0.6;
    double pole_radius_max = 0.95;
    double nonlinear_fraction = 0.5; // trailing fraction of speakers waveshaped
    double gain_min = 1.0;
    double gain_max = 3.0;
    double noise_level = 0.01;
    std::uint64_t seed = 0;
};

// Reads a SyntheticSpec from a small JSON file; missing keys keep defaults.
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

// Deterministic generator for speaker `index` under this spec.
SpeakerGenerator make_generator(const SyntheticSpec& spec, int index);

// Raw waveform from one generator (includes burn-in removal, waveshaping,
// additive noise; not normalized, not prepared).
std::vector<double> synth_signal(const SpeakerGenerator& gen, std::size_t num_samples, Rng& rng);

// Full corpus: per-speaker utterances rendered at 8 kHz, passed through
// 16-bit quantization (so results match a WAV round trip bit for bit) and
// prepared.
Corpus synth_corpus(const SyntheticSpec& spec);

// Same corpus written out as raw 16-bit WAV files in the load_corpus layout.
void write_synth_corpus(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

} // namespace npvq
