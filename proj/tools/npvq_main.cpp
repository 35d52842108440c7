// npvq command line: train speaker models, identify utterances, evaluate
// corpora, sweep the fusion weight and the preselection depth, print the
// complexity model, synthesize test corpora.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "npvq/dsp.hpp"
#include "npvq/harness.hpp"
#include "npvq/model_io.hpp"

using namespace npvq;

namespace {

ResidualMeasure parse_measure(const std::string& name) {
    if (name == "mae") return ResidualMeasure::Mae;
    if (name == "mse") return ResidualMeasure::Mse;
    throw CLI::ValidationError("--measure must be mae or mse");
}

int run_train(const std::string& corpus_dir, const std::string& synthetic_spec,
              const std::string& out, int linear_bits, int nonlinear_bits, int lloyd_iters,
              std::uint64_t seed, bool no_nonlinear, const std::string& split) {
    if (corpus_dir.empty() == synthetic_spec.empty()) {
        std::cerr << "train: give exactly one of --corpus or --synthetic\n";
        return 1;
    }
    const Corpus corpus = corpus_dir.empty()
                              ? synth_corpus(load_synthetic_spec(synthetic_spec))
                              : load_corpus(corpus_dir);

    TrainOptions options;
    options.linear_bits = linear_bits;
    options.nonlinear_bits = nonlinear_bits;
    options.lloyd_iters = lloyd_iters;
    options.train_nonlinear = !no_nonlinear;
    options.split_method = split == "stddev" ? SplitMethod::StdDev : SplitMethod::Hyperplane;
    options.seed = seed;

    const ModelFile file = train_model_file(corpus, options);
    save_models(out, file);
    std::cout << "trained " << file.models.size() << " speaker models -> " << out << "\n";
    for (const SpeakerModel& m : file.models) {
        std::cout << "  " << m.speaker_id << ": linear distortion " << m.linear_cb.training_distortion;
        if (m.nonlinear_cb)
            std::cout << ", predictor distortion " << m.nonlinear_cb->distortion_history.back();
        std::cout << "\n";
    }
    return 0;
}

int run_identify(const std::string& models_path, const std::string& wav, double alpha,
                 bool alpha_set, int k, const std::string& measure) {
    const ModelFile file = load_models(models_path);
    if (!alpha_set) {
        if (!file.alpha) {
            std::cerr << "identify: no --alpha given and the model file has none stored "
                         "(run sweep-alpha --update-models first)\n";
            return 1;
        }
        alpha = *file.alpha;
    }
    const FeatureSet fs = extract_features(prepare(read_wav(wav)));
    const RecognitionResult r =
        identify(fs.frames, fs.lpcc, file.models, alpha, k, parse_measure(measure));

    std::cout << "decided: " << r.decided_speaker << "\n";
    std::cout << "alpha: " << r.alpha << "  k: " << r.k
              << "  instructions/frame: " << r.instruction_count << "\n";
    std::cout << "preselected:";
    for (const std::string& id : r.preselected) std::cout << ' ' << id;
    std::cout << "\nscores (lpcc";
    if (!r.residual_scores.empty()) std::cout << ", residual, combined";
    std::cout << "):\n";
    for (const auto& [id, lpcc] : r.lpcc_scores) {
        std::cout << "  " << id << ": " << lpcc;
        if (r.combined_scores.count(id)) {
            std::cout << ", " << r.residual_scores.at(id) << ", " << r.combined_scores.at(id);
        }
        std::cout << "\n";
    }
    return 0;
}

int run_evaluate(const std::string& models_path, const std::string& corpus_dir, double alpha,
                 bool alpha_set, int k, const std::string& measure, const std::string& report_out) {
    const ModelFile file = load_models(models_path);
    if (!alpha_set) {
        if (!file.alpha) {
            std::cerr << "evaluate: no --alpha given and the model file has none stored\n";
            return 1;
        }
        alpha = *file.alpha;
    }
    const Corpus corpus = load_corpus(corpus_dir);
    const EvalReport report = evaluate(file.models, corpus, alpha, k, parse_measure(measure));
    if (!report_out.empty()) {
        std::ofstream out(report_out, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write report: " + report_out);
        out << report_to_json(report);
    }
    std::printf("error rate %.4f (%d/%d wrong), alpha %g, k %d\n", report.error_rate,
                report.wrong, report.total, alpha, k);
    return 0;
}

int run_sweep_alpha(const std::string& models_path, const std::string& corpus_dir,
                    const std::string& alphas_spec, int k, const std::string& out,
                    bool update_models) {
    ModelFile file = load_models(models_path);
    const Corpus corpus = load_corpus(corpus_dir);
    const std::vector<double> alphas = parse_alpha_spec(alphas_spec);
    const auto rows = sweep_alpha(file.models, corpus, alphas, k);
    write_alpha_sweep(out, rows);

    const auto best = std::min_element(rows.begin(), rows.end(),
                                       [](const AlphaSweepRow& a, const AlphaSweepRow& b) {
                                           return a.error_rate < b.error_rate;
                                       });
    std::printf("swept %zu alphas -> %s; best alpha %g (error %.4f)\n", rows.size(), out.c_str(),
                best->alpha, best->error_rate);
    if (update_models) {
        file.alpha = best->alpha;
        save_models(models_path, file);
        std::printf("stored alpha %g in %s\n", best->alpha, models_path.c_str());
    }
    return 0;
}

int run_sweep_k(const std::string& models_path, const std::string& corpus_dir, double alpha,
                bool alpha_set, const std::string& out) {
    const ModelFile file = load_models(models_path);
    double a = alpha;
    if (!alpha_set) {
        if (!file.alpha) {
            std::cerr << "sweep-k: no --alpha given and the model file has none stored\n";
            return 1;
        }
        a = *file.alpha;
    }
    const Corpus corpus = load_corpus(corpus_dir);
    std::vector<int> ks(file.models.size());
    std::iota(ks.begin(), ks.end(), 1);
    const auto rows = sweep_k(file.models, corpus, a, ks);
    write_k_sweep(out, rows);
    std::printf("swept k = 1..%zu -> %s\n", ks.size(), out.c_str());
    return 0;
}

int run_cost(std::int64_t t_cl, std::int64_t t_cnl, std::int64_t k, std::int64_t n,
             std::int64_t c_tg) {
    CostModel cm;
    cm.t_cl = t_cl;
    cm.t_cnl = t_cnl;
    cm.k = k;
    cm.n = n;
    cm.c_tg = c_tg;
    std::printf("linear codebook units/frame:    %lld\n",
                static_cast<long long>(cost_lpcc(cm)));
    std::printf("predictor codebook units/frame: %lld\n",
                static_cast<long long>(cost_mlp(cm)));
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    const SyntheticSpec spec = load_synthetic_spec(spec_path);
    write_synth_corpus(spec, out_dir);
    std::printf("wrote %d speakers x (%d train + %d test) WAVs under %s\n", spec.num_speakers,
                spec.train_utterances, spec.test_utterances, out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"speaker identification with fused linear and predictor codebooks"};
    app.set_config("--config");
    app.require_subcommand(1);

    // train
    std::string corpus_dir, synthetic_spec, out_models, split = "hyperplane";
    int linear_bits = 7, nonlinear_bits = 5, lloyd_iters = 0;
    std::uint64_t seed = 0;
    bool no_nonlinear = false;
    auto* train = app.add_subcommand("train", "train speaker models");
    train->add_option("--corpus", corpus_dir, "corpus root (speaker/{train,test}/*.wav)");
    train->add_option("--synthetic", synthetic_spec, "synthetic corpus spec (JSON)");
    train->add_option("--out", out_models, "output model file")->required();
    train->add_option("--linear-bits", linear_bits, "log2 linear codebook size");
    train->add_option("--nonlinear-bits", nonlinear_bits, "log2 predictor codebook size");
    train->add_option("--lloyd-iters", lloyd_iters, "generalized Lloyd iterations");
    train->add_option("--seed", seed, "training seed");
    train->add_option("--split", split, "centroid split method: hyperplane|stddev")
        ->check(CLI::IsMember({"hyperplane", "stddev"}));
    train->add_flag("--no-nonlinear", no_nonlinear, "skip predictor codebooks");

    // identify
    std::string id_models, id_wav, id_measure = "mae";
    double id_alpha = 0.0;
    int id_k = 2;
    auto* identify_cmd = app.add_subcommand("identify", "identify one utterance");
    identify_cmd->add_option("--models", id_models)->required();
    identify_cmd->add_option("--wav", id_wav)->required();
    auto* id_alpha_opt = identify_cmd->add_option("--alpha", id_alpha, "fusion weight");
    identify_cmd->add_option("--k", id_k, "preselection depth");
    identify_cmd->add_option("--measure", id_measure)->check(CLI::IsMember({"mae", "mse"}));

    // evaluate
    std::string ev_models, ev_corpus, ev_measure = "mae", ev_report;
    double ev_alpha = 0.0;
    int ev_k = 2;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "closed-set error over a corpus");
    evaluate_cmd->add_option("--models", ev_models)->required();
    evaluate_cmd->add_option("--corpus", ev_corpus)->required();
    auto* ev_alpha_opt = evaluate_cmd->add_option("--alpha", ev_alpha, "fusion weight");
    evaluate_cmd->add_option("--k", ev_k, "preselection depth");
    evaluate_cmd->add_option("--measure", ev_measure)->check(CLI::IsMember({"mae", "mse"}));
    evaluate_cmd->add_option("--report", ev_report, "write the JSON report here");

    // sweep-alpha
    std::string sa_models, sa_corpus, sa_alphas, sa_out;
    int sa_k = 2;
    bool sa_update = false;
    auto* sweep_alpha_cmd = app.add_subcommand("sweep-alpha", "error rate as a function of alpha");
    sweep_alpha_cmd->add_option("--models", sa_models)->required();
    sweep_alpha_cmd->add_option("--corpus", sa_corpus)->required();
    sweep_alpha_cmd->add_option("--alphas", sa_alphas,
                                "comma list, lin:lo:hi:n, or log:lo:hi:n")->required();
    sweep_alpha_cmd->add_option("--k", sa_k, "preselection depth");
    sweep_alpha_cmd->add_option("--out", sa_out, "two-column output file")->required();
    sweep_alpha_cmd->add_flag("--update-models", sa_update,
                              "store the best alpha back into the model file");

    // sweep-k
    std::string sk_models, sk_corpus, sk_out;
    double sk_alpha = 0.0;
    auto* sweep_k_cmd = app.add_subcommand("sweep-k", "error rate as a function of k");
    sweep_k_cmd->add_option("--models", sk_models)->required();
    sweep_k_cmd->add_option("--corpus", sk_corpus)->required();
    auto* sk_alpha_opt = sweep_k_cmd->add_option("--alpha", sk_alpha, "fusion weight");
    sweep_k_cmd->add_option("--out", sk_out, "three-column output file")->required();

    // cost
    std::int64_t c_tcl = 128, c_tcnl = 32, c_k = 2, c_n = 1, c_ctg = 9;
    auto* cost_cmd = app.add_subcommand("cost", "closed-form complexity model");
    cost_cmd->add_option("--t-cl", c_tcl, "linear codebook size");
    cost_cmd->add_option("--t-cnl", c_tcnl, "predictor codebook size");
    cost_cmd->add_option("--k", c_k, "preselection depth");
    cost_cmd->add_option("--n", c_n, "number of speakers");
    cost_cmd->add_option("--c-tg", c_ctg, "units per nonlinear transfer function");

    // synth
    std::string sy_spec, sy_out;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic WAV corpus");
    synth_cmd->add_option("--spec", sy_spec)->required();
    synth_cmd->add_option("--out", sy_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return run_train(corpus_dir, synthetic_spec, out_models, linear_bits, nonlinear_bits,
                             lloyd_iters, seed, no_nonlinear, split);
        if (identify_cmd->parsed())
            return run_identify(id_models, id_wav, id_alpha, id_alpha_opt->count() > 0, id_k,
                                id_measure);
        if (evaluate_cmd->parsed())
            return run_evaluate(ev_models, ev_corpus, ev_alpha, ev_alpha_opt->count() > 0, ev_k,
                                ev_measure, ev_report);
        if (sweep_alpha_cmd->parsed())
            return run_sweep_alpha(sa_models, sa_corpus, sa_alphas, sa_k, sa_out, sa_update);
        if (sweep_k_cmd->parsed())
            return run_sweep_k(sk_models, sk_corpus, sk_alpha, sk_alpha_opt->count() > 0, sk_out);
        if (cost_cmd->parsed()) return run_cost(c_tcl, c_tcnl, c_k, c_n, c_ctg);
        if (synth_cmd->parsed()) return run_synth(sy_spec, sy_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
