#include "npvq/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "npvq/dsp.hpp"

namespace npvq {

namespace {

std::vector<Utterance> load_split(const std::filesystem::path& dir, const std::string& speaker,
                                  const std::string& split) {
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("load_corpus: speaker '" + speaker + "' is missing a '" + split +
                                 "' directory (expected " + dir.string() + ")");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".wav")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("load_corpus: speaker '" + speaker + "' has no WAV files under " +
                                 dir.string());
    std::vector<Utterance> out;
    out.reserve(files.size());
    for (const auto& file : files)
        out.push_back({file.stem().string(), prepare(read_wav(file))});
    return out;
}

// Quantize to 16-bit PCM and back, matching what a WAV round trip does.
void quantize_16bit(std::vector<double>& samples) {
    for (double& s : samples) {
        const double clipped = std::clamp(s, -1.0, 1.0);
        const long q = std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L);
        s = static_cast<double>(q) / 32768.0;
    }
}

void validate_spec(const SyntheticSpec& spec) {
    if (spec.num_speakers < 1)
        throw std::invalid_argument("synthetic spec: num_speakers must be >= 1");
    if (spec.train_utterances < 1 || spec.test_utterances < 1)
        throw std::invalid_argument("synthetic spec: every speaker needs train and test utterances");
}

AudioSignal render_utterance(const SyntheticSpec& spec, const SpeakerGenerator& gen,
                             std::uint64_t seed) {
    Rng rng(seed);
    const double duration = rng.uniform(spec.min_duration_s, spec.max_duration_s);
    const auto samples = static_cast<std::size_t>(std::lround(duration * 8000.0));

    AudioSignal signal;
    signal.sample_rate_hz = 8000;
    signal.samples = synth_signal(gen, samples, rng);

    double peak = 0.0;
    for (double s : signal.samples) peak = std::max(peak, std::fabs(s));
    if (peak > 0.0)
        for (double& s : signal.samples) s *= 0.97 / peak;
    quantize_16bit(signal.samples);
    return signal;
}

std::string speaker_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "spk%02d", index);
    return buf;
}

std::uint64_t utterance_seed(const SyntheticSpec& spec, int speaker, bool test, int index) {
    return mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(speaker) + 1),
                    (test ? 0x800000ull : 0ull) | static_cast<std::uint64_t>(index));
}

} // namespace

Corpus load_corpus(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root))
        throw std::runtime_error("load_corpus: " + root.string() +
                                 " is not a directory (expected root/<speaker>/{train,test}/*.wav)");
    std::vector<std::filesystem::path> speaker_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root))
        if (entry.is_directory()) speaker_dirs.push_back(entry.path());
    std::sort(speaker_dirs.begin(), speaker_dirs.end());
    if (speaker_dirs.empty())
        throw std::runtime_error("load_corpus: no speaker directories under " + root.string());

    Corpus corpus;
    std::set<std::string> seen;
    for (const auto& dir : speaker_dirs) {
        SpeakerData speaker;
        speaker.speaker_id = dir.filename().string();
        if (!seen.insert(speaker.speaker_id).second)
            throw std::runtime_error("load_corpus: duplicate speaker id '" + speaker.speaker_id + "'");
        speaker.train = load_split(dir / "train", speaker.speaker_id, "train");
        speaker.test = load_split(dir / "test", speaker.speaker_id, "test");
        corpus.speakers.push_back(std::move(speaker));
    }
    return corpus;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open synthetic spec: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed synthetic spec " + path.string() + ": " + e.what());
    }
    SyntheticSpec spec;
    spec.num_speakers = j.value("num_speakers", spec.num_speakers);
    spec.train_utterances = j.value("train_utterances", spec.train_utterances);
    spec.test_utterances = j.value("test_utterances", spec.test_utterances);
    spec.min_duration_s = j.value("min_duration_s", spec.min_duration_s);
    spec.max_duration_s = j.value("max_duration_s", spec.max_duration_s);
    spec.pole_radius_min = j.value("pole_radius_min", spec.pole_radius_min);
    spec.pole_radius_max = j.value("pole_radius_max", spec.pole_radius_max);
    spec.nonlinear_fraction = j.value("nonlinear_fraction", spec.nonlinear_fraction);
    spec.gain_min = j.value("gain_min", spec.gain_min);
    spec.gain_max = j.value("gain_max", spec.gain_max);
    spec.noise_level = j.value("noise_level", spec.noise_level);
    spec.seed = j.value("seed", spec.seed);
    return spec;
}

SpeakerGenerator make_generator(const SyntheticSpec& spec, int index) {
    if (spec.num_speakers < 1 || index < 0 || index >= spec.num_speakers)
        throw std::invalid_argument("make_generator: speaker index out of range");
    if (!(spec.pole_radius_min > 0.0) || !(spec.pole_radius_max < 1.0) ||
        spec.pole_radius_min > spec.pole_radius_max)
        throw std::invalid_argument("make_generator: pole radii must lie inside (0, 1) "
                                    "(unstable filter spec)");
    if (spec.min_duration_s <= 0.0 || spec.max_duration_s < spec.min_duration_s)
        throw std::invalid_argument("make_generator: bad duration range");

    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(index) * 2 + 0x9111ull));
    // Five conjugate pole pairs inside the unit circle -> stable AR(10).
    // Each pair draws its angle from its own band; separated resonances keep
    // the filter well conditioned and the speakers spectrally distinct.
    std::vector<double> poly{1.0}; // coefficients of A(z) in z^-1
    for (int pair = 0; pair < 5; ++pair) {
        const double radius = rng.uniform(spec.pole_radius_min, spec.pole_radius_max);
        const double band = 0.9 / 5.0;
        const double angle =
            M_PI * (0.05 + (pair + 0.1 + 0.8 * rng.uniform()) * band);
        // (1 - 2 r cos(w) z^-1 + r^2 z^-2)
        const double c1 = -2.0 * radius * std::cos(angle);
        const double c2 = radius * radius;
        std::vector<double> next(poly.size() + 2, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] += c1 * poly[i];
            next[i + 2] += c2 * poly[i];
        }
        poly = std::move(next);
    }

    SpeakerGenerator gen;
    gen.ar.resize(10);
    for (int i = 0; i < 10; ++i) gen.ar[static_cast<std::size_t>(i)] = -poly[static_cast<std::size_t>(i) + 1];

    const int num_nonlinear =
        static_cast<int>(std::lround(spec.nonlinear_fraction * spec.num_speakers));
    if (index >= spec.num_speakers - num_nonlinear)
        gen.nonlinear_gain = rng.uniform(spec.gain_min, spec.gain_max);
    gen.noise_level = spec.noise_level;
    return gen;
}

std::vector<double> synth_signal(const SpeakerGenerator& gen, std::size_t num_samples, Rng& rng) {
    const std::size_t order = gen.ar.size();
    constexpr std::size_t kBurnIn = 500;
    std::vector<double> x(num_samples + kBurnIn, 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        double v = rng.gaussian();
        for (std::size_t k = 0; k < order && k < n; ++k)
            v += gen.ar[k] * x[n - 1 - k];
        x[n] = v;
    }
    x.erase(x.begin(), x.begin() + kBurnIn);

    if (gen.nonlinear_gain > 0.0) {
        double rms = 0.0;
        for (double s : x) rms += s * s;
        rms = std::sqrt(rms / static_cast<double>(x.size()));
        if (rms > 0.0)
            for (double& s : x) s = std::tanh(gen.nonlinear_gain * s / rms);
    }
    if (gen.noise_level > 0.0) {
        double rms = 0.0;
        for (double s : x) rms += s * s;
        rms = std::sqrt(rms / static_cast<double>(x.size()));
        for (double& s : x) s += gen.noise_level * rms * rng.gaussian();
    }
    return x;
}

Corpus synth_corpus(const SyntheticSpec& spec) {
    validate_spec(spec);
    Corpus corpus;
    corpus.speakers.resize(static_cast<std::size_t>(spec.num_speakers));
    for (int s = 0; s < spec.num_speakers; ++s) {
        const SpeakerGenerator gen = make_generator(spec, s);
        SpeakerData& speaker = corpus.speakers[static_cast<std::size_t>(s)];
        speaker.speaker_id = speaker_name(s);
        for (int u = 0; u < spec.train_utterances; ++u) {
            AudioSignal raw = render_utterance(spec, gen, utterance_seed(spec, s, false, u));
            char name[32];
            std::snprintf(name, sizeof name, "train%02d", u);
            speaker.train.push_back({name, prepare(raw)});
        }
        for (int u = 0; u < spec.test_utterances; ++u) {
            AudioSignal raw = render_utterance(spec, gen, utterance_seed(spec, s, true, u));
            char name[32];
            std::snprintf(name, sizeof name, "test%02d", u);
            speaker.test.push_back({name, prepare(raw)});
        }
    }
    return corpus;
}

void write_synth_corpus(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
    validate_spec(spec);
    for (int s = 0; s < spec.num_speakers; ++s) {
        const SpeakerGenerator gen = make_generator(spec, s);
        const std::filesystem::path base = out_dir / speaker_name(s);
        std::filesystem::create_directories(base / "train");
        std::filesystem::create_directories(base / "test");
        for (int u = 0; u < spec.train_utterances; ++u) {
            char name[32];
            std::snprintf(name, sizeof name, "train%02d.wav", u);
            write_wav(base / "train" / name,
                      render_utterance(spec, gen, utterance_seed(spec, s, false, u)));
        }
        for (int u = 0; u < spec.test_utterances; ++u) {
            char name[32];
            std::snprintf(name, sizeof name, "test%02d.wav", u);
            write_wav(base / "test" / name,
                      render_utterance(spec, gen, utterance_seed(spec, s, true, u)));
        }
    }
}

} // namespace npvq
