// Python bindings for the npvq core: feature extraction, codebook training,
// predictor codebooks, recognition, the cost model and the harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "npvq/harness.hpp"

namespace py = pybind11;
using namespace npvq;

namespace {

std::vector<double> frame_raw(const Frame& f) {
    return {f.raw_samples.begin(), f.raw_samples.end()};
}

std::vector<double> frame_windowed(const Frame& f) {
    return {f.samples.begin(), f.samples.end()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "speaker identification with fused linear and nonlinear predictive codebooks";

    py::enum_<SplitMethod>(m, "SplitMethod")
        .value("STDDEV", SplitMethod::StdDev)
        .value("HYPERPLANE", SplitMethod::Hyperplane);
    py::enum_<DistanceKind>(m, "DistanceKind")
        .value("MAE", DistanceKind::Mae)
        .value("EUCLIDEAN", DistanceKind::Euclidean);
    py::enum_<ResidualMeasure>(m, "ResidualMeasure")
        .value("MAE", ResidualMeasure::Mae)
        .value("MSE", ResidualMeasure::Mse);

    py::class_<AudioSignal>(m, "AudioSignal")
        .def(py::init<>())
        .def_readwrite("samples", &AudioSignal::samples)
        .def_readwrite("sample_rate_hz", &AudioSignal::sample_rate_hz)
        .def_readwrite("prepared", &AudioSignal::prepared);

    m.def("read_wav", &read_wav, py::arg("path"));
    m.def("write_wav", &write_wav, py::arg("path"), py::arg("signal"));
    m.def("prepare", &prepare, py::arg("signal"));

    py::class_<Frame>(m, "Frame")
        .def_property_readonly("raw_samples", &frame_raw)
        .def_property_readonly("samples", &frame_windowed)
        .def_readonly("start_index", &Frame::start_index);

    m.def("frames", &frames, py::arg("signal"));
    m.def(
        "autocorrelate",
        [](const std::vector<double>& samples, int max_lag) {
            return autocorrelate(samples, max_lag);
        },
        py::arg("samples"), py::arg("max_lag"));

    py::class_<LpcAnalysis>(m, "LpcAnalysis")
        .def_readonly("lpc", &LpcAnalysis::lpc)
        .def_readonly("reflection", &LpcAnalysis::reflection)
        .def_readonly("pred_error", &LpcAnalysis::pred_error);
    m.def(
        "levinson_durbin",
        [](const std::vector<double>& r, int order) { return levinson_durbin(r, order); },
        py::arg("autocorrelation"), py::arg("order"));
    m.def(
        "lpc_to_cepstrum",
        [](const std::vector<double>& lpc, int cep_order) {
            return lpc_to_cepstrum(lpc, cep_order);
        },
        py::arg("lpc"), py::arg("cep_order") = kCepstralOrder);

    py::class_<FeatureSet>(m, "FeatureSet")
        .def_readonly("frames", &FeatureSet::frames)
        .def_readonly("lpcc", &FeatureSet::lpcc)
        .def_readonly("skipped_degenerate", &FeatureSet::skipped_degenerate);
    m.def("extract_features", &extract_features, py::arg("prepared_signal"));

    py::class_<LinearCodebook>(m, "LinearCodebook")
        .def_readonly("centroids", &LinearCodebook::centroids)
        .def_readonly("size_bits", &LinearCodebook::size_bits)
        .def_readonly("training_distortion", &LinearCodebook::training_distortion)
        .def("__len__", [](const LinearCodebook& cb) { return cb.size(); });

    py::class_<QuantizationResult>(m, "QuantizationResult")
        .def_readonly("nearest_index", &QuantizationResult::nearest_index)
        .def_readonly("distortion", &QuantizationResult::distortion);

    m.def("distance_mae", &distance_mae, py::arg("a"), py::arg("b"));
    m.def("quantize", &quantize, py::arg("vector"), py::arg("codebook"));
    m.def("train_codebook", &train_codebook, py::arg("data"), py::arg("size_bits"),
          py::arg("split_method") = SplitMethod::Hyperplane,
          py::arg("distance") = DistanceKind::Mae);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs_per_start", &TrainConfig::epochs_per_start)
        .def_readwrite("num_random_starts", &TrainConfig::num_random_starts)
        .def_readwrite("lm_lambda_init", &TrainConfig::lm_lambda_init)
        .def_readwrite("lm_lambda_factor", &TrainConfig::lm_lambda_factor)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<MlpPredictor>(m, "MlpPredictor")
        .def(py::init<>())
        .def_property_readonly("parameters",
                               [](const MlpPredictor& p) {
                                   const auto arr = parameters(p);
                                   return std::vector<double>(arr.begin(), arr.end());
                               })
        .def("predict",
             [](const MlpPredictor& p, const std::vector<double>& history) {
                 return predict(p, history);
             })
        .def("frame_residual", &frame_residual, py::arg("frame"),
             py::arg("measure") = ResidualMeasure::Mae);

    py::class_<NonlinearCodebook>(m, "NonlinearCodebook")
        .def_readonly("predictors", &NonlinearCodebook::predictors)
        .def_readonly("size_bits", &NonlinearCodebook::size_bits)
        .def_readonly("lloyd_iterations_done", &NonlinearCodebook::lloyd_iterations_done)
        .def_readonly("distortion_history", &NonlinearCodebook::distortion_history)
        .def("__len__", [](const NonlinearCodebook& cb) { return cb.size(); });

    m.def("train_nonlinear_codebook", &train_nonlinear_codebook, py::arg("frames"),
          py::arg("lpcc"), py::arg("clustering_codebook"), py::arg("size_bits"),
          py::arg("lloyd_iters"), py::arg("config"));

    py::class_<SpeakerModel>(m, "SpeakerModel")
        .def_readonly("speaker_id", &SpeakerModel::speaker_id)
        .def_readonly("linear_cb", &SpeakerModel::linear_cb)
        .def_readonly("nonlinear_cb", &SpeakerModel::nonlinear_cb);

    py::class_<CostModel>(m, "CostModel")
        .def(py::init<>())
        .def_readwrite("t_cl", &CostModel::t_cl)
        .def_readwrite("t_cnl", &CostModel::t_cnl)
        .def_readwrite("k", &CostModel::k)
        .def_readwrite("l_t", &CostModel::l_t)
        .def_readwrite("n_i", &CostModel::n_i)
        .def_readwrite("n_h1", &CostModel::n_h1)
        .def_readwrite("n_h2", &CostModel::n_h2)
        .def_readwrite("c_tg", &CostModel::c_tg)
        .def_readwrite("p", &CostModel::p)
        .def_readwrite("n", &CostModel::n);
    m.def("cost_lpcc", &cost_lpcc, py::arg("cost_model"));
    m.def("cost_mlp", &cost_mlp, py::arg("cost_model"));

    py::class_<RecognitionResult>(m, "RecognitionResult")
        .def_readonly("decided_speaker", &RecognitionResult::decided_speaker)
        .def_readonly("lpcc_scores", &RecognitionResult::lpcc_scores)
        .def_readonly("residual_scores", &RecognitionResult::residual_scores)
        .def_readonly("combined_scores", &RecognitionResult::combined_scores)
        .def_readonly("preselected", &RecognitionResult::preselected)
        .def_readonly("alpha", &RecognitionResult::alpha)
        .def_readonly("k", &RecognitionResult::k)
        .def_readonly("instruction_count", &RecognitionResult::instruction_count);

    m.def("score_lpcc",
          [](const std::vector<LpccVector>& lpcc, const SpeakerModel& model) {
              return score_lpcc(lpcc, model);
          });
    m.def("score_residual",
          [](const std::vector<Frame>& frames, const NonlinearCodebook& ncb,
             ResidualMeasure measure) { return score_residual(frames, ncb, measure); },
          py::arg("frames"), py::arg("codebook"), py::arg("measure") = ResidualMeasure::Mae);
    m.def("combine", &combine, py::arg("lpcc_err"), py::arg("residue_err"), py::arg("alpha"));
    m.def("identify", &identify, py::arg("frames"), py::arg("lpcc"), py::arg("models"),
          py::arg("alpha"), py::arg("k"), py::arg("measure") = ResidualMeasure::Mae);

    py::class_<Utterance>(m, "Utterance")
        .def_readonly("name", &Utterance::name)
        .def_readonly("signal", &Utterance::signal);
    py::class_<SpeakerData>(m, "SpeakerData")
        .def_readonly("speaker_id", &SpeakerData::speaker_id)
        .def_readonly("train", &SpeakerData::train)
        .def_readonly("test", &SpeakerData::test);
    py::class_<Corpus>(m, "Corpus").def_readonly("speakers", &Corpus::speakers);

    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_readwrite("num_speakers", &SyntheticSpec::num_speakers)
        .def_readwrite("train_utterances", &SyntheticSpec::train_utterances)
        .def_readwrite("test_utterances", &SyntheticSpec::test_utterances)
        .def_readwrite("min_duration_s", &SyntheticSpec::min_duration_s)
        .def_readwrite("max_duration_s", &SyntheticSpec::max_duration_s)
        .def_readwrite("pole_radius_min", &SyntheticSpec::pole_radius_min)
        .def_readwrite("pole_radius_max", &SyntheticSpec::pole_radius_max)
        .def_readwrite("nonlinear_fraction", &SyntheticSpec::nonlinear_fraction)
        .def_readwrite("gain_min", &SyntheticSpec::gain_min)
        .def_readwrite("gain_max", &SyntheticSpec::gain_max)
        .def_readwrite("noise_level", &SyntheticSpec::noise_level)
        .def_readwrite("seed", &SyntheticSpec::seed);

    m.def("load_corpus", &load_corpus, py::arg("root"));
    m.def("synth_corpus", &synth_corpus, py::arg("spec"));
    m.def("write_synth_corpus", &write_synth_corpus, py::arg("spec"), py::arg("out_dir"));

    py::class_<TrainOptions>(m, "TrainOptions")
        .def(py::init<>())
        .def_readwrite("linear_bits", &TrainOptions::linear_bits)
        .def_readwrite("nonlinear_bits", &TrainOptions::nonlinear_bits)
        .def_readwrite("lloyd_iters", &TrainOptions::lloyd_iters)
        .def_readwrite("train_nonlinear", &TrainOptions::train_nonlinear)
        .def_readwrite("split_method", &TrainOptions::split_method)
        .def_readwrite("distance", &TrainOptions::distance)
        .def_readwrite("epochs_per_start", &TrainOptions::epochs_per_start)
        .def_readwrite("num_random_starts", &TrainOptions::num_random_starts)
        .def_readwrite("seed", &TrainOptions::seed);

    m.def("train_models", &train_models, py::arg("corpus"), py::arg("options"));

    py::class_<DecisionRecord>(m, "DecisionRecord")
        .def_readonly("true_speaker", &DecisionRecord::true_speaker)
        .def_readonly("utterance", &DecisionRecord::utterance)
        .def_readonly("decided", &DecisionRecord::decided)
        .def_readonly("correct", &DecisionRecord::correct)
        .def_readonly("instruction_count", &DecisionRecord::instruction_count);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("error_rate", &EvalReport::error_rate)
        .def_readonly("total", &EvalReport::total)
        .def_readonly("wrong", &EvalReport::wrong)
        .def_readonly("alpha", &EvalReport::alpha)
        .def_readonly("k", &EvalReport::k)
        .def_readonly("confusion", &EvalReport::confusion)
        .def_readonly("decisions", &EvalReport::decisions);

    m.def("evaluate", &evaluate, py::arg("models"), py::arg("corpus"), py::arg("alpha"),
          py::arg("k"), py::arg("measure") = ResidualMeasure::Mae);
    m.def("report_to_json", &report_to_json, py::arg("report"));

    py::class_<AlphaSweepRow>(m, "AlphaSweepRow")
        .def_readonly("alpha", &AlphaSweepRow::alpha)
        .def_readonly("error_rate", &AlphaSweepRow::error_rate);
    py::class_<KSweepRow>(m, "KSweepRow")
        .def_readonly("k", &KSweepRow::k)
        .def_readonly("error_rate", &KSweepRow::error_rate)
        .def_readonly("instruction_count", &KSweepRow::instruction_count);
    m.def("sweep_alpha", &sweep_alpha, py::arg("models"), py::arg("corpus"), py::arg("alphas"),
          py::arg("k"), py::arg("measure") = ResidualMeasure::Mae);
    m.def("sweep_k", &sweep_k, py::arg("models"), py::arg("corpus"), py::arg("alpha"),
          py::arg("ks"), py::arg("measure") = ResidualMeasure::Mae);

    py::class_<ModelFile>(m, "ModelFile")
        .def(py::init<>())
        .def_readwrite("version", &ModelFile::version)
        .def_readwrite("seed", &ModelFile::seed)
        .def_readwrite("linear_bits", &ModelFile::linear_bits)
        .def_readwrite("nonlinear_bits", &ModelFile::nonlinear_bits)
        .def_readwrite("lloyd_iters", &ModelFile::lloyd_iters)
        .def_readwrite("alpha", &ModelFile::alpha)
        .def_readwrite("models", &ModelFile::models);
    m.def("train_model_file", &train_model_file, py::arg("corpus"), py::arg("options"));
    m.def("save_models", &save_models, py::arg("path"), py::arg("file"));
    m.def("load_models", &load_models, py::arg("path"));
    m.def("serialize_models", &serialize_models, py::arg("file"));
}
