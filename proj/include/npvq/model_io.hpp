#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "npvq/recognizer.hpp"

namespace npvq {

inline constexpr int kModelFormatVersion = 1;

// Everything needed to reload and rerun a trained speaker set: the models,
// the hyperparameters they were trained with, and the alpha chosen by the
// sweep (when one has been run).
struct ModelFile {
    int version = kModelFormatVersion;
    std::uint64_t seed = 0;
    int linear_bits = 0;
    int nonlinear_bits = 0;
    int lloyd_iters = 0;
    std::string split_method = "hyperplane";
    std::string distance = "mae";
    std::optional<double> alpha; // persisted fusion weight, if chosen
    std::vector<SpeakerModel> models;
};

std::string serialize_models(const ModelFile& file);
ModelFile deserialize_models(const std::string& text);

// JSON with a whole-file CRC-32; numeric arrays round-trip bit exact.
void save_models(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_models(const std::filesystem::path& path);

} // namespace npvq
