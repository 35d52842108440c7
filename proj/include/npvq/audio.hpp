#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace npvq {

// Mono audio, amplitudes in [-1, 1]. `prepared` marks a signal that has been
// run through prepare() (8 kHz, pre-emphasized, peak-normalized); prepare()
// refuses to run twice on the same signal.
struct AudioSignal {
    std::vector<double> samples;
    int sample_rate_hz = 8000;
    bool prepared = false;
};

// Reads a mono 16-bit PCM WAV at 8 or 16 kHz. Anything else is rejected
// with a descriptive error.
AudioSignal read_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM. Samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const AudioSignal& signal);

} // namespace npvq
