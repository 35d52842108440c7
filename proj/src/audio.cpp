#include "npvq/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace npvq {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

} // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open WAV file: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw std::runtime_error("malformed WAV (missing RIFF/WAVE header): " + path.string());
    }

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t len = read_u32(bytes.data() + pos + 4);
        if (pos + 8 + len > bytes.size())
            throw std::runtime_error("malformed WAV (truncated chunk): " + path.string());
        const unsigned char* body = bytes.data() + pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16) throw std::runtime_error("malformed WAV (short fmt chunk): " + path.string());
            format = read_u16(body);
            channels = read_u16(body + 2);
            rate = read_u32(body + 4);
            bits = read_u16(body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = body;
            data_len = len;
        }
        pos += 8 + len + (len & 1); // chunks are word aligned
    }

    if (!have_fmt || data == nullptr)
        throw std::runtime_error("malformed WAV (missing fmt or data chunk): " + path.string());
    if (format != 1)
        throw std::runtime_error("unsupported WAV encoding (expected PCM): " + path.string());
    if (channels != 1)
        throw std::runtime_error("unsupported WAV channel count " + std::to_string(channels) +
                                 " (expected mono): " + path.string());
    if (bits != 16)
        throw std::runtime_error("unsupported WAV sample width " + std::to_string(bits) +
                                 " (expected 16-bit): " + path.string());
    if (rate != 8000 && rate != 16000)
        throw std::runtime_error("unsupported WAV sample rate " + std::to_string(rate) +
                                 " (expected 8000 or 16000): " + path.string());

    AudioSignal signal;
    signal.sample_rate_hz = static_cast<int>(rate);
    const std::size_t n = data_len / 2;
    signal.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int16_t v =
            static_cast<std::int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
        signal.samples[i] = static_cast<double>(v) / 32768.0;
    }
    return signal;
}

void write_wav(const std::filesystem::path& path, const AudioSignal& signal) {
    const std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
    const std::uint32_t rate = static_cast<std::uint32_t>(signal.sample_rate_hz);
    std::string out;
    out.reserve(44 + 2 * n);
    out.append("RIFF");
    put_u32(out, 36 + 2 * n);
    out.append("WAVE");
    out.append("fmt ");
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);  // block align
    put_u16(out, 16); // bits
    out.append("data");
    put_u32(out, 2 * n);
    for (double s : signal.samples) {
        const double clipped = std::clamp(s, -1.0, 1.0);
        const long q = std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L);
        const auto v = static_cast<std::int16_t>(q);
        out.push_back(static_cast<char>(v & 0xff));
        out.push_back(static_cast<char>((v >> 8) & 0xff));
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write WAV file: " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("short write to WAV file: " + path.string());
}

} // namespace npvq
