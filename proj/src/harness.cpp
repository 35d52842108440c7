#include "npvq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "npvq/dsp.hpp"
#include "npvq/parallel.hpp"

namespace npvq {

namespace {

FeatureSet speaker_train_features(const SpeakerData& speaker) {
    FeatureSet all;
    for (const Utterance& utt : speaker.train) {
        FeatureSet fs = extract_features(utt.signal);
        all.skipped_degenerate += fs.skipped_degenerate;
        std::move(fs.frames.begin(), fs.frames.end(), std::back_inserter(all.frames));
        std::move(fs.lpcc.begin(), fs.lpcc.end(), std::back_inserter(all.lpcc));
    }
    return all;
}

struct TestUtteranceRef {
    const SpeakerData* speaker;
    const Utterance* utterance;
};

std::vector<TestUtteranceRef> test_utterances(const Corpus& corpus) {
    std::vector<TestUtteranceRef> refs;
    for (const SpeakerData& speaker : corpus.speakers)
        for (const Utterance& utt : speaker.test) refs.push_back({&speaker, &utt});
    return refs;
}

void check_coverage(const std::vector<SpeakerModel>& models, const Corpus& corpus) {
    std::set<std::string> ids;
    for (const SpeakerModel& m : models) ids.insert(m.speaker_id);
    for (const SpeakerData& s : corpus.speakers)
        if (!ids.count(s.speaker_id))
            throw std::invalid_argument("evaluate: no model for corpus speaker '" +
                                        s.speaker_id + "'");
}

} // namespace

std::vector<SpeakerModel> train_models(const Corpus& corpus, const TrainOptions& options) {
    if (corpus.speakers.empty())
        throw std::invalid_argument("train_models: corpus has no speakers");

    std::vector<SpeakerModel> models(corpus.speakers.size());
    parallel_for(corpus.speakers.size(), [&](std::size_t i) {
        const SpeakerData& speaker = corpus.speakers[i];
        try {
            const FeatureSet features = speaker_train_features(speaker);
            SpeakerModel model;
            model.speaker_id = speaker.speaker_id;
            model.linear_cb = train_codebook(features.lpcc, options.linear_bits,
                                             options.split_method, options.distance);
            if (options.train_nonlinear) {
                const LinearCodebook& clustering_cb =
                    options.nonlinear_bits == options.linear_bits
                        ? model.linear_cb
                        : [&] {
                              return train_codebook(features.lpcc, options.nonlinear_bits,
                                                    options.split_method, options.distance);
                          }();
                TrainConfig config;
                config.epochs_per_start = options.epochs_per_start;
                config.num_random_starts = options.num_random_starts;
                config.seed = mix_seed(options.seed, i);
                model.nonlinear_cb =
                    train_nonlinear_codebook(features.frames, features.lpcc, clustering_cb,
                                             options.nonlinear_bits, options.lloyd_iters, config);
            }
            models[i] = std::move(model);
        } catch (const std::exception& e) {
            throw std::runtime_error("training speaker '" + speaker.speaker_id + "': " + e.what());
        }
    });
    return models;
}

ModelFile train_model_file(const Corpus& corpus, const TrainOptions& options) {
    ModelFile file;
    file.seed = options.seed;
    file.linear_bits = options.linear_bits;
    file.nonlinear_bits = options.train_nonlinear ? options.nonlinear_bits : -1;
    file.lloyd_iters = options.lloyd_iters;
    file.split_method = options.split_method == SplitMethod::StdDev ? "stddev" : "hyperplane";
    file.distance = options.distance == DistanceKind::Euclidean ? "euclidean" : "mae";
    file.models = train_models(corpus, options);
    return file;
}

EvalReport evaluate(const std::vector<SpeakerModel>& models, const Corpus& corpus, double alpha,
                    int k, ResidualMeasure measure) {
    check_coverage(models, corpus);
    const auto refs = test_utterances(corpus);
    if (refs.empty())
        throw std::invalid_argument("evaluate: corpus has no test utterances");

    EvalReport report;
    report.alpha = alpha;
    report.k = k;
    report.measure = measure == ResidualMeasure::Mae ? "mae" : "mse";
    report.decisions.resize(refs.size());
    parallel_for(refs.size(), [&](std::size_t i) {
        const FeatureSet fs = extract_features(refs[i].utterance->signal);
        const RecognitionResult r = identify(fs.frames, fs.lpcc, models, alpha, k, measure);
        report.decisions[i] = {refs[i].speaker->speaker_id, refs[i].utterance->name,
                               r.decided_speaker,
                               r.decided_speaker == refs[i].speaker->speaker_id,
                               r.instruction_count};
    });

    report.total = static_cast<int>(refs.size());
    for (const DecisionRecord& d : report.decisions) {
        if (!d.correct) ++report.wrong;
        ++report.confusion[d.true_speaker][d.decided];
    }
    report.error_rate = static_cast<double>(report.wrong) / report.total;
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["error_rate"] = report.error_rate;
    j["total"] = report.total;
    j["wrong"] = report.wrong;
    j["alpha"] = report.alpha;
    j["k"] = report.k;
    j["measure"] = report.measure;
    j["confusion"] = report.confusion;
    nlohmann::json decisions = nlohmann::json::array();
    for (const DecisionRecord& d : report.decisions)
        decisions.push_back({{"true_speaker", d.true_speaker},
                             {"utterance", d.utterance},
                             {"decided", d.decided},
                             {"correct", d.correct},
                             {"instruction_count", d.instruction_count}});
    j["decisions"] = decisions;
    return j.dump(1);
}

std::vector<AlphaSweepRow> sweep_alpha(const std::vector<SpeakerModel>& models,
                                       const Corpus& corpus, const std::vector<double>& alphas,
                                       int k, ResidualMeasure measure) {
    if (alphas.empty())
        throw std::invalid_argument("sweep_alpha: no alpha values given");
    check_coverage(models, corpus);
    const auto refs = test_utterances(corpus);

    // Preselection and residual scores do not depend on alpha, so score each
    // utterance once and re-decide per alpha value.
    const double max_alpha = *std::max_element(alphas.begin(), alphas.end());
    std::vector<UtteranceScores> scores(refs.size());
    parallel_for(refs.size(), [&](std::size_t i) {
        const FeatureSet fs = extract_features(refs[i].utterance->signal);
        scores[i] = score_utterance(fs.frames, fs.lpcc, models, k, measure, max_alpha);
    });

    std::vector<AlphaSweepRow> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
        if (alpha < 0.0) throw std::invalid_argument("sweep_alpha: alpha must be >= 0");
        int wrong = 0;
        for (std::size_t i = 0; i < refs.size(); ++i)
            if (decide(scores[i], alpha) != refs[i].speaker->speaker_id) ++wrong;
        rows.push_back({alpha, static_cast<double>(wrong) / static_cast<double>(refs.size())});
    }
    return rows;
}

std::vector<KSweepRow> sweep_k(const std::vector<SpeakerModel>& models, const Corpus& corpus,
                               double alpha, const std::vector<int>& ks, ResidualMeasure measure) {
    if (ks.empty())
        throw std::invalid_argument("sweep_k: no k values given");
    for (int k : ks)
        if (k < 1 || static_cast<std::size_t>(k) > models.size())
            throw std::invalid_argument("sweep_k: k values must lie in [1, N]");

    std::vector<KSweepRow> rows;
    rows.reserve(ks.size());
    for (int k : ks) {
        const EvalReport report = evaluate(models, corpus, alpha, k, measure);
        CostModel cm;
        cm.n = static_cast<std::int64_t>(models.size());
        cm.k = k;
        cm.t_cl = static_cast<std::int64_t>(models.front().linear_cb.size());
        cm.t_cnl = models.front().nonlinear_cb
                       ? static_cast<std::int64_t>(models.front().nonlinear_cb->size())
                       : 0;
        rows.push_back({k, report.error_rate, cost_mlp(cm)});
    }
    return rows;
}

AlphaSweepRow choose_alpha(const std::vector<AlphaSweepRow>& rows) {
    if (rows.empty())
        throw std::invalid_argument("choose_alpha: empty sweep");
    double best = rows.front().error_rate;
    for (const AlphaSweepRow& r : rows) best = std::min(best, r.error_rate);
    std::vector<std::size_t> minimal;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].error_rate == best) minimal.push_back(i);
    return rows[minimal[minimal.size() / 2]];
}

void write_alpha_sweep(const std::filesystem::path& path, const std::vector<AlphaSweepRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write sweep file: " + path.string());
    out << "# alpha error_rate\n";
    for (const AlphaSweepRow& r : rows) out << r.alpha << ' ' << r.error_rate << '\n';
}

void write_k_sweep(const std::filesystem::path& path, const std::vector<KSweepRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write sweep file: " + path.string());
    out << "# k error_rate instruction_count\n";
    for (const KSweepRow& r : rows)
        out << r.k << ' ' << r.error_rate << ' ' << r.instruction_count << '\n';
}

std::vector<double> parse_alpha_spec(const std::string& spec) {
    const auto parse_range = [&](const std::string& body, bool log_scale) {
        std::vector<double> out;
        double lo = 0.0, hi = 0.0;
        int n = 0;
        char sep1 = 0, sep2 = 0;
        std::istringstream in(body);
        if (!(in >> lo >> sep1 >> hi >> sep2 >> n) || sep1 != ':' || sep2 != ':' || n < 2)
            throw std::invalid_argument("bad alpha range spec (want lo:hi:count): " + spec);
        if (log_scale && (lo <= 0.0 || hi <= 0.0))
            throw std::invalid_argument("log alpha range needs positive endpoints: " + spec);
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            out.push_back(log_scale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                    : lo + t * (hi - lo));
        }
        return out;
    };
    // semicolon-separated chunks, each a range or a comma list of values
    std::vector<double> out;
    std::istringstream chunks(spec);
    std::string chunk;
    while (std::getline(chunks, chunk, ';')) {
        if (chunk.empty()) continue;
        if (chunk.rfind("log:", 0) == 0) {
            const auto r = parse_range(chunk.substr(4), true);
            out.insert(out.end(), r.begin(), r.end());
            continue;
        }
        if (chunk.rfind("lin:", 0) == 0) {
            const auto r = parse_range(chunk.substr(4), false);
            out.insert(out.end(), r.begin(), r.end());
            continue;
        }
        std::istringstream in(chunk);
        std::string token;
        while (std::getline(in, token, ',')) {
            if (token.empty()) continue;
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(token, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad alpha value '" + token + "' in spec: " + spec);
            }
            if (used != token.size())
                throw std::invalid_argument("bad alpha value '" + token + "' in spec: " + spec);
            out.push_back(value);
        }
    }
    if (out.empty()) throw std::invalid_argument("empty alpha spec: " + spec);
    return out;
}

} // namespace npvq
