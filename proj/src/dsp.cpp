#include "npvq/dsp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace npvq {

std::vector<double> hamming_window(int length) {
    std::vector<double> w(static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n)
        w[static_cast<std::size_t>(n)] =
            0.54 - 0.46 * std::cos(2.0 * M_PI * n / (length - 1));
    return w;
}

AudioSignal decimate_by_2(const AudioSignal& signal) {
    // Linear-phase FIR: Hamming-windowed sinc, 63 taps, 3.4 kHz cutoff at
    // the input rate. Stopband is well past 40 dB down, passband ripple is
    // a fraction of a percent.
    constexpr int kTaps = 63;
    const double cutoff = 3400.0 / signal.sample_rate_hz; // cycles per sample
    static_assert(kTaps % 2 == 1);
    std::array<double, kTaps> h{};
    const std::vector<double> w = hamming_window(kTaps);
    const int mid = kTaps / 2;
    double sum = 0.0;
    for (int i = 0; i < kTaps; ++i) {
        const int m = i - mid;
        const double x = 2.0 * cutoff * m;
        const double sinc = (m == 0) ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
        h[static_cast<std::size_t>(i)] = 2.0 * cutoff * sinc * w[static_cast<std::size_t>(i)];
        sum += h[static_cast<std::size_t>(i)];
    }
    for (double& c : h) c /= sum; // unity DC gain

    AudioSignal out;
    out.sample_rate_hz = signal.sample_rate_hz / 2;
    out.prepared = signal.prepared;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(signal.samples.size());
    out.samples.reserve(static_cast<std::size_t>((n + 1) / 2));
    for (std::ptrdiff_t i = 0; i < n; i += 2) {
        double acc = 0.0;
        for (int t = 0; t < kTaps; ++t) {
            const std::ptrdiff_t j = i - mid + t;
            if (j >= 0 && j < n)
                acc += h[static_cast<std::size_t>(t)] *
                       signal.samples[static_cast<std::size_t>(j)];
        }
        out.samples.push_back(acc);
    }
    return out;
}

AudioSignal prepare(const AudioSignal& signal) {
    if (signal.prepared)
        throw std::invalid_argument("prepare: signal is already prepared; "
                                    "prepare must be called exactly once");
    if (signal.sample_rate_hz != 8000 && signal.sample_rate_hz != 16000)
        throw std::invalid_argument("prepare: unsupported sample rate " +
                                    std::to_string(signal.sample_rate_hz) +
                                    " Hz (expected 8000 or 16000)");

    AudioSignal out = (signal.sample_rate_hz == 16000) ? decimate_by_2(signal) : signal;

    // Pre-emphasis, y[0] = x[0].
    for (std::size_t n = out.samples.size(); n-- > 1;)
        out.samples[n] -= kPreEmphasis * out.samples[n - 1];

    double peak = 0.0;
    for (double s : out.samples) peak = std::max(peak, std::fabs(s));
    if (peak > 0.0)
        for (double& s : out.samples) s /= peak;

    out.prepared = true;
    return out;
}

std::vector<Frame> frames(const AudioSignal& signal) {
    if (!signal.prepared || signal.sample_rate_hz != 8000)
        throw std::invalid_argument("frames: signal must be prepared at 8 kHz");

    static const std::vector<double> window = hamming_window(kFrameLength);
    std::vector<Frame> out;
    if (signal.samples.size() < kFrameLength) return out;

    const std::size_t count = (signal.samples.size() - kFrameLength) / kFrameHop + 1;
    out.resize(count);
    for (std::size_t f = 0; f < count; ++f) {
        Frame& frame = out[f];
        frame.start_index = f * kFrameHop;
        for (int i = 0; i < kFrameLength; ++i) {
            const double raw = signal.samples[frame.start_index + static_cast<std::size_t>(i)];
            frame.raw_samples[static_cast<std::size_t>(i)] = raw;
            frame.samples[static_cast<std::size_t>(i)] = raw * window[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

std::vector<double> autocorrelate(std::span<const double> samples, int max_lag) {
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= samples.size())
        throw std::invalid_argument("autocorrelate: max_lag must be below the sample count");
    std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
    const std::size_t n = samples.size();
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i)
            acc += samples[i] * samples[i + static_cast<std::size_t>(k)];
        r[static_cast<std::size_t>(k)] = acc;
    }
    return r;
}

LpcAnalysis levinson_durbin(std::span<const double> r, int order) {
    if (order < 1 || static_cast<std::size_t>(order) >= r.size())
        throw std::invalid_argument("levinson_durbin: order must satisfy 1 <= order <= len(r)-1");
    if (r[0] <= 0.0)
        throw std::runtime_error("levinson_durbin: degenerate frame (zero autocorrelation energy)");

    LpcAnalysis res;
    res.lpc.assign(static_cast<std::size_t>(order), 0.0);
    res.reflection.reserve(static_cast<std::size_t>(order));
    double err = r[0];
    std::vector<double> prev(static_cast<std::size_t>(order), 0.0);
    for (int m = 1; m <= order; ++m) {
        double acc = r[static_cast<std::size_t>(m)];
        for (int j = 1; j < m; ++j)
            acc -= res.lpc[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(m - j)];
        if (err <= 0.0)
            throw std::runtime_error("levinson_durbin: autocorrelation is not positive definite");
        const double k = acc / err;
        if (!(std::fabs(k) < 1.0))
            throw std::runtime_error("levinson_durbin: autocorrelation is not positive definite "
                                     "(reflection coefficient out of range)");
        prev = res.lpc;
        res.lpc[static_cast<std::size_t>(m - 1)] = k;
        for (int j = 1; j < m; ++j)
            res.lpc[static_cast<std::size_t>(j - 1)] =
                prev[static_cast<std::size_t>(j - 1)] - k * prev[static_cast<std::size_t>(m - j - 1)];
        res.reflection.push_back(k);
        err *= (1.0 - k * k);
    }
    res.pred_error = err;
    return res;
}

std::vector<double> lpc_from_reflection(std::span<const double> reflection) {
    std::vector<double> a;
    a.reserve(reflection.size());
    for (std::size_t m = 0; m < reflection.size(); ++m) {
        const double k = reflection[m];
        const std::vector<double> prev = a;
        a.push_back(0.0);
        a[m] = k;
        for (std::size_t j = 0; j < m; ++j)
            a[j] = prev[j] - k * prev[m - 1 - j];
    }
    return a;
}

std::vector<double> reflection_from_lpc(std::span<const double> lpc) {
    std::vector<double> a(lpc.begin(), lpc.end());
    std::vector<double> k(lpc.size(), 0.0);
    for (std::size_t m = lpc.size(); m-- > 0;) {
        const double km = a[m];
        k[m] = km;
        const double denom = 1.0 - km * km;
        if (denom <= 0.0)
            throw std::runtime_error("reflection_from_lpc: model is unstable "
                                     "(|reflection| >= 1)");
        std::vector<double> prev(m);
        for (std::size_t j = 0; j < m; ++j)
            prev[j] = (a[j] + km * a[m - 1 - j]) / denom;
        a.assign(prev.begin(), prev.end());
    }
    return k;
}

LpccVector lpc_to_cepstrum(std::span<const double> lpc, int cep_order) {
    try {
        reflection_from_lpc(lpc);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("lpc_to_cepstrum: unstable LPC model");
    }

    LpccVector c(static_cast<std::size_t>(cep_order), 0.0);
    const auto a = [&](int n) -> double {
        return (n >= 1 && n <= static_cast<int>(lpc.size())) ? lpc[static_cast<std::size_t>(n - 1)]
                                                             : 0.0;
    };
    for (int n = 1; n <= cep_order; ++n) {
        double sum = a(n);
        for (int k = 1; k < n; ++k)
            sum += (static_cast<double>(k) / n) * c[static_cast<std::size_t>(k - 1)] * a(n - k);
        c[static_cast<std::size_t>(n - 1)] = sum;
    }
    return c;
}

FeatureSet extract_features(const AudioSignal& prepared) {
    FeatureSet out;
    for (Frame& frame : frames(prepared)) {
        const std::vector<double> r = autocorrelate(frame.samples, kLpcOrder);
        if (r[0] <= 0.0) {
            ++out.skipped_degenerate;
            continue;
        }
        try {
            const LpcAnalysis lpc = levinson_durbin(r, kLpcOrder);
            out.lpcc.push_back(lpc_to_cepstrum(lpc.lpc, kCepstralOrder));
            out.frames.push_back(frame);
        } catch (const std::runtime_error&) {
            ++out.skipped_degenerate;
        }
    }
    return out;
}

} // namespace npvq
