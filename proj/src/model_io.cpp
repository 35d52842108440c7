#include "npvq/model_io.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace npvq {

namespace {

using nlohmann::json;

std::uint32_t crc32(const std::string& data) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xffffffffu;
    for (unsigned char ch : data) crc = table[(crc ^ ch) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

json centroids_to_json(const LinearCodebook& cb) {
    json j;
    j["size_bits"] = cb.size_bits;
    j["split_method"] = cb.split_method == SplitMethod::StdDev ? "stddev" : "hyperplane";
    j["distance"] = cb.distance == DistanceKind::Mae ? "mae" : "euclidean";
    j["training_distortion"] = cb.training_distortion;
    j["centroids"] = cb.centroids;
    return j;
}

LinearCodebook codebook_from_json(const json& j) {
    LinearCodebook cb;
    cb.size_bits = j.at("size_bits").get<int>();
    cb.split_method =
        j.at("split_method").get<std::string>() == "stddev" ? SplitMethod::StdDev
                                                            : SplitMethod::Hyperplane;
    cb.distance = j.at("distance").get<std::string>() == "euclidean" ? DistanceKind::Euclidean
                                                                     : DistanceKind::Mae;
    cb.training_distortion = j.at("training_distortion").get<double>();
    cb.centroids = j.at("centroids").get<std::vector<FeatureVector>>();
    return cb;
}

json predictor_to_json(const MlpPredictor& mlp) {
    const auto p = parameters(mlp);
    return json(std::vector<double>(p.begin(), p.end()));
}

MlpPredictor predictor_from_json(const json& j) {
    const auto p = j.get<std::vector<double>>();
    return predictor_from_parameters(p);
}

} // namespace

std::string serialize_models(const ModelFile& file) {
    json payload;
    payload["version"] = file.version;
    payload["seed"] = file.seed;
    payload["linear_bits"] = file.linear_bits;
    payload["nonlinear_bits"] = file.nonlinear_bits;
    payload["lloyd_iters"] = file.lloyd_iters;
    payload["split_method"] = file.split_method;
    payload["distance"] = file.distance;
    if (file.alpha) payload["alpha"] = *file.alpha;

    json speakers = json::array();
    for (const SpeakerModel& model : file.models) {
        json s;
        s["speaker_id"] = model.speaker_id;
        s["linear_cb"] = centroids_to_json(model.linear_cb);
        if (model.nonlinear_cb) {
            json n;
            n["size_bits"] = model.nonlinear_cb->size_bits;
            n["lloyd_iterations_done"] = model.nonlinear_cb->lloyd_iterations_done;
            n["distortion_history"] = model.nonlinear_cb->distortion_history;
            json preds = json::array();
            for (const MlpPredictor& mlp : model.nonlinear_cb->predictors)
                preds.push_back(predictor_to_json(mlp));
            n["predictors"] = preds;
            s["nonlinear_cb"] = n;
        }
        speakers.push_back(s);
    }
    payload["speakers"] = speakers;

    json root;
    root["payload"] = payload;
    const std::string canonical = payload.dump();
    char sum[16];
    std::snprintf(sum, sizeof sum, "%08x", crc32(canonical));
    root["crc32"] = sum;
    return root.dump(1);
}

ModelFile deserialize_models(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!root.contains("payload") || !root.contains("crc32"))
        throw std::runtime_error("model file is missing payload or checksum");

    const std::string canonical = root["payload"].dump();
    char sum[16];
    std::snprintf(sum, sizeof sum, "%08x", crc32(canonical));
    if (root["crc32"].get<std::string>() != sum)
        throw std::runtime_error("model file checksum mismatch (file is corrupt)");

    const json& payload = root["payload"];
    const int version = payload.at("version").get<int>();
    if (version != kModelFormatVersion)
        throw std::runtime_error("unsupported model file format version " +
                                 std::to_string(version) + " (this build reads version " +
                                 std::to_string(kModelFormatVersion) + ")");

    ModelFile file;
    file.version = version;
    file.seed = payload.at("seed").get<std::uint64_t>();
    file.linear_bits = payload.at("linear_bits").get<int>();
    file.nonlinear_bits = payload.at("nonlinear_bits").get<int>();
    file.lloyd_iters = payload.at("lloyd_iters").get<int>();
    file.split_method = payload.at("split_method").get<std::string>();
    file.distance = payload.at("distance").get<std::string>();
    if (payload.contains("alpha")) file.alpha = payload["alpha"].get<double>();

    for (const json& s : payload.at("speakers")) {
        SpeakerModel model;
        model.speaker_id = s.at("speaker_id").get<std::string>();
        model.linear_cb = codebook_from_json(s.at("linear_cb"));
        if (s.contains("nonlinear_cb")) {
            const json& n = s["nonlinear_cb"];
            NonlinearCodebook ncb;
            ncb.size_bits = n.at("size_bits").get<int>();
            ncb.lloyd_iterations_done = n.at("lloyd_iterations_done").get<int>();
            ncb.distortion_history = n.at("distortion_history").get<std::vector<double>>();
            for (const json& p : n.at("predictors")) ncb.predictors.push_back(predictor_from_json(p));
            model.nonlinear_cb = std::move(ncb);
        }
        file.models.push_back(std::move(model));
    }
    return file;
}

void save_models(const std::filesystem::path& path, const ModelFile& file) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    const std::string text = serialize_models(file);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("short write to model file: " + path.string());
}

ModelFile load_models(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_models(text);
}

} // namespace npvq
