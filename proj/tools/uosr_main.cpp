// uosr: post-hoc uncertainty scoring and open-set evaluation over exported
// classifier features/logits/labels.
//
// Subcommands: ingest, eval, fewshot, sweep, synth, hist.
// Exit codes: 0 success, 1 IO failure, 2 validation/config error, 3 internal.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "uosr/fewshot.hpp"
#include "uosr/knn.hpp"
#include "uosr/metrics.hpp"
#include "uosr/scorers.hpp"
#include "uosr/sweep.hpp"
#include "uosr/synth.hpp"
#include "uosr/tensorio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(const uosr::Error& e) {
    switch (e.code()) {
        case uosr::errc::io_failure: return 1;
        case uosr::errc::internal: return 3;
        default: return 2;
    }
}

uosr::FileFormat format_of(const std::string& path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv"
               ? uosr::FileFormat::csv
               : uosr::FileFormat::binary;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) uosr::raise(uosr::errc::io_failure, "cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) uosr::raise(uosr::errc::io_failure, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) uosr::raise(uosr::errc::io_failure, "rename to " + path.string() + ": " + ec.message());
}

// Bundle paths plus pipeline knobs; a JSON config file provides defaults and
// command-line flags override field by field.
struct RunConfig {
    std::optional<std::string> train_feats, train_labels, test_feats, test_logits,
        test_labels, ood_feats, ood_logits, ood_class_ids, predictions;
    std::string scorer = "msp";
    double temperature = 1.0;
    std::size_t k = 5;
    double alpha = 50.0;
    double beta = 1.0;
    std::size_t shots = 5;
    std::uint64_t seed = 0;
    std::size_t bins = 15;
    std::string format = "json";
    std::optional<std::string> out;
    unsigned threads = 0;  // 0 = all hardware threads
    bool exclude_refs = true;
    std::vector<std::string> rows;
};

struct ConfigFlags {
    std::string config;
    std::string train_feats, train_labels, test_feats, test_logits, test_labels, ood_feats,
        ood_logits, ood_class_ids, predictions, out;
    RunConfig v;  // scalar values collected from flags
    CLI::App* cmd = nullptr;

    void add_common(CLI::App* app) {
        cmd = app;
        app->add_option("--config", config, "JSON config file; flags override its fields");
        app->add_option("--train-feats", train_feats, "train feature matrix");
        app->add_option("--train-labels", train_labels, "train labels");
        app->add_option("--test-feats", test_feats, "InD test features");
        app->add_option("--test-logits", test_logits, "InD test logits");
        app->add_option("--test-labels", test_labels, "InD test labels");
        app->add_option("--ood-feats", ood_feats, "OoD test features");
        app->add_option("--ood-logits", ood_logits, "OoD test logits");
        app->add_option("--ood-class-ids", ood_class_ids, "OoD class ids (for few-shot draws)");
        app->add_option("--predictions", predictions,
                        "predicted labels (default: argmax of test logits)");
        app->add_option("--scorer", v.scorer, "msp|entropy|maxlogit|energy|gini|knn");
        app->add_option("--temperature", v.temperature, "softmax temperature");
        app->add_option("--k", v.k, "top-K for the KNN scorers");
        app->add_option("--alpha", v.alpha, "fusion gate steepness");
        app->add_option("--beta", v.beta, "lambda = mean - beta * std");
        app->add_option("--shots", v.shots, "reference samples per OoD class");
        app->add_option("--seed", v.seed, "RNG seed");
        app->add_option("--bins", v.bins, "bin count (ECE, hist)");
        app->add_option("--format", v.format, "json|markdown|csv");
        app->add_option("--out", out, "output file");
        app->add_option("--threads", v.threads, "worker cap, 0 = all cores");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) uosr::raise(uosr::errc::io_failure, "cannot open " + config);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                uosr::raise(uosr::errc::bad_spec, "config parse: " + std::string(e.what()));
            }
            auto str = [&](const char* key, std::optional<std::string>& out_field) {
                if (j.contains(key)) out_field = j.at(key).get<std::string>();
            };
            str("train_feats", cfg.train_feats);
            str("train_labels", cfg.train_labels);
            str("test_feats", cfg.test_feats);
            str("test_logits", cfg.test_logits);
            str("test_labels", cfg.test_labels);
            str("ood_feats", cfg.ood_feats);
            str("ood_logits", cfg.ood_logits);
            str("ood_class_ids", cfg.ood_class_ids);
            str("predictions", cfg.predictions);
            if (j.contains("scorer")) cfg.scorer = j.at("scorer").get<std::string>();
            if (j.contains("temperature")) cfg.temperature = j.at("temperature").get<double>();
            if (j.contains("k")) cfg.k = j.at("k").get<std::size_t>();
            if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
            if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
            if (j.contains("shots")) cfg.shots = j.at("shots").get<std::size_t>();
            if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("bins")) cfg.bins = j.at("bins").get<std::size_t>();
            if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
            if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
            if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
            if (j.contains("exclude_refs")) cfg.exclude_refs = j.at("exclude_refs").get<bool>();
        }
        // Flags win.
        auto take_path = [&](const char* flag, const std::string& from,
                             std::optional<std::string>& to) {
            if (cmd->count(flag)) to = from;
        };
        take_path("--train-feats", train_feats, cfg.train_feats);
        take_path("--train-labels", train_labels, cfg.train_labels);
        take_path("--test-feats", test_feats, cfg.test_feats);
        take_path("--test-logits", test_logits, cfg.test_logits);
        take_path("--test-labels", test_labels, cfg.test_labels);
        take_path("--ood-feats", ood_feats, cfg.ood_feats);
        take_path("--ood-logits", ood_logits, cfg.ood_logits);
        take_path("--ood-class-ids", ood_class_ids, cfg.ood_class_ids);
        take_path("--predictions", predictions, cfg.predictions);
        take_path("--out", out, cfg.out);
        if (cmd->count("--scorer")) cfg.scorer = v.scorer;
        if (cmd->count("--temperature")) cfg.temperature = v.temperature;
        if (cmd->count("--k")) cfg.k = v.k;
        if (cmd->count("--alpha")) cfg.alpha = v.alpha;
        if (cmd->count("--beta")) cfg.beta = v.beta;
        if (cmd->count("--shots")) cfg.shots = v.shots;
        if (cmd->count("--seed")) cfg.seed = v.seed;
        if (cmd->count("--bins")) cfg.bins = v.bins;
        if (cmd->count("--format")) cfg.format = v.format;
        if (cmd->count("--threads")) cfg.threads = v.threads;
        if (cfg.format != "json" && cfg.format != "markdown" && cfg.format != "csv")
            uosr::raise(uosr::errc::bad_spec, "unknown format '" + cfg.format + "'");
        return cfg;
    }
};

uosr::EvaluationBundle load_bundle(const RunConfig& cfg) {
    uosr::EvaluationBundle b;
    auto matrix = [](const std::optional<std::string>& p) {
        return uosr::load_matrix(*p, format_of(*p));
    };
    auto labels = [](const std::optional<std::string>& p) {
        return uosr::load_labels(*p, format_of(*p));
    };
    if (!cfg.test_feats) uosr::raise(uosr::errc::missing_component, "missing --test-feats");
    if (!cfg.test_labels) uosr::raise(uosr::errc::missing_component, "missing --test-labels");
    if (!cfg.ood_feats) uosr::raise(uosr::errc::missing_component, "missing --ood-feats");
    b.test_features = matrix(cfg.test_feats);
    b.test_labels = labels(cfg.test_labels);
    b.ood_features = matrix(cfg.ood_feats);
    if (cfg.train_feats) b.train_features = matrix(cfg.train_feats);
    if (cfg.train_labels) b.train_labels = labels(cfg.train_labels);
    if (cfg.test_logits) b.test_logits = matrix(cfg.test_logits);
    if (cfg.ood_logits) b.ood_logits = matrix(cfg.ood_logits);
    if (cfg.ood_class_ids) b.ood_class_ids = labels(cfg.ood_class_ids);
    return b;
}

std::size_t resolve_n_classes(const uosr::EvaluationBundle& b) {
    if (b.test_logits) return b.test_logits->cols;
    std::int64_t max_label = -1;
    for (auto l : b.test_labels) max_label = std::max(max_label, l);
    if (b.train_labels)
        for (auto l : *b.train_labels) max_label = std::max(max_label, l);
    return static_cast<std::size_t>(max_label + 1);
}

uosr::LabelVector resolve_predictions(const RunConfig& cfg, const uosr::EvaluationBundle& b) {
    if (cfg.predictions) return uosr::load_labels(*cfg.predictions, format_of(*cfg.predictions));
    if (b.test_logits) return uosr::predictions_from_logits(*b.test_logits);
    uosr::raise(uosr::errc::missing_component,
                "need --predictions or --test-logits to derive predictions");
}

// Scores over the evaluated sequence: InD test rows then all OoD rows.
uosr::ScoreVector pipeline_scores(const RunConfig& cfg, const uosr::EvaluationBundle& b,
                                  std::vector<double>* msp_confidence) {
    if (cfg.scorer == "knn") {
        if (!b.train_features)
            uosr::raise(uosr::errc::missing_component, "missing train features for knn scorer");
        uosr::SimilarityBank train_bank(*b.train_features);
        uosr::FeatureMatrix all = uosr::vstack(b.test_features, b.ood_features);
        return uosr::knn_score(all, train_bank, {cfg.k}, cfg.threads);
    }
    if (!b.test_logits)
        uosr::raise(uosr::errc::missing_component, "missing test logits for logit scorer");
    if (!b.ood_logits)
        uosr::raise(uosr::errc::missing_component, "missing ood logits for logit scorer");
    uosr::FeatureMatrix all = uosr::vstack(*b.test_logits, *b.ood_logits);
    uosr::ScoreVector s = uosr::score_logits(&all, cfg.scorer, {cfg.temperature});
    if (msp_confidence && cfg.scorer == "msp") {
        msp_confidence->clear();
        msp_confidence->reserve(s.size());
        for (double u : s.scores) msp_confidence->push_back(1.0 - u);
    }
    return s;
}

std::string summary_line(const uosr::MetricReport& r) {
    auto f = [](const std::optional<double>& v, double scale) -> std::string {
        if (!v) return "n/a";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", *v * scale);
        return buf;
    };
    return "Acc. " + f(r.accuracy, 1.0) + " | AURC " + f(r.aurc_uosr, 1.0) + " | UOSR " +
           f(r.auroc_uosr, 100.0) + " | OSR " + f(r.auroc_osr, 100.0) + " | InC/InW " +
           f(r.auroc_inc_inw, 100.0) + " | InC/OoD " + f(r.auroc_inc_ood, 100.0) +
           " | InW/OoD " + f(r.auroc_inw_ood, 100.0);
}

int cmd_ingest(const std::vector<std::pair<std::string, std::string>>& matrices,
               const std::vector<std::pair<std::string, std::string>>& labels) {
    if (matrices.empty() && labels.empty())
        uosr::raise(uosr::errc::bad_spec, "nothing to ingest; pass --matrix and/or --labels");
    for (const auto& [src, dst] : matrices)
        uosr::write_matrix(uosr::load_matrix(src, uosr::FileFormat::csv), dst);
    for (const auto& [src, dst] : labels)
        uosr::write_labels(uosr::load_labels(src, uosr::FileFormat::csv), dst);
    std::cout << "ingested " << matrices.size() << " matrix file(s), " << labels.size()
              << " label file(s)\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg) {
    uosr::EvaluationBundle b = load_bundle(cfg);
    uosr::validate_bundle(b, resolve_n_classes(b));
    uosr::LabelVector predictions = resolve_predictions(cfg, b);

    std::vector<double> confidence;
    uosr::ScoreVector scores = pipeline_scores(cfg, b, &confidence);
    uosr::OutcomeVector outcomes =
        uosr::classify_outcomes(predictions, b.test_labels, b.ood_features.rows);

    uosr::EvaluateOptions opt;
    opt.ece_bins = cfg.bins;
    if (!confidence.empty()) opt.confidence = &confidence;
    uosr::MetricReport report = uosr::evaluate(scores, outcomes, opt);

    std::string body;
    if (cfg.format == "json")
        body = uosr::report_to_json(report) + "\n";
    else
        body = uosr::report_table_header(cfg.format == "markdown") + "\n" +
               uosr::report_table_row(report, cfg.format == "markdown") + "\n";
    if (cfg.out) write_atomic(*cfg.out, body);
    std::cout << summary_line(report) << "\n";
    return 0;
}

int cmd_fewshot(const RunConfig& cfg) {
    uosr::EvaluationBundle b = load_bundle(cfg);
    uosr::validate_bundle(b, resolve_n_classes(b));
    uosr::FewShotConfig fs;
    fs.shots = cfg.shots;
    fs.knn.k = cfg.k;
    fs.fusion.alpha = cfg.alpha;
    fs.fusion.beta = cfg.beta;
    fs.seed = cfg.seed;
    fs.scorer0 = cfg.scorer == "knn" ? "msp" : cfg.scorer;
    fs.temperature.t = cfg.temperature;
    fs.exclude_refs = cfg.exclude_refs;
    fs.n_threads = cfg.threads;
    fs.ece_bins = cfg.bins;

    uosr::FewShotResult result = uosr::run_fewshot(b, fs);
    std::string body;
    if (cfg.format == "json")
        body = uosr::fewshot_to_json(result, fs) + "\n";
    else
        body = uosr::fewshot_table(result, cfg.format == "markdown", cfg.rows);
    if (cfg.out) write_atomic(*cfg.out, body);
    std::cout << result.n_repeats << " repeat(s), " << result.unused_refs
              << " unused reference sample(s)\n";
    std::cout << uosr::fewshot_table(result, true, cfg.rows);
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<std::size_t>& ks,
              const std::vector<double>& alphas, const std::vector<double>& betas) {
    uosr::EvaluationBundle b = load_bundle(cfg);
    uosr::validate_bundle(b, resolve_n_classes(b));
    uosr::FewShotConfig fs;
    fs.shots = cfg.shots;
    fs.knn.k = cfg.k;
    fs.fusion.alpha = cfg.alpha;
    fs.fusion.beta = cfg.beta;
    fs.seed = cfg.seed;
    fs.scorer0 = cfg.scorer == "knn" ? "msp" : cfg.scorer;
    fs.temperature.t = cfg.temperature;
    fs.exclude_refs = cfg.exclude_refs;
    fs.n_threads = cfg.threads;
    fs.ece_bins = cfg.bins;

    uosr::SweepGrid grid{ks, alphas, betas};
    auto cells = uosr::sweep(b, fs, grid);
    std::string body = cfg.format == "json" ? uosr::sweep_to_json(cells) + "\n"
                                            : uosr::sweep_to_csv(cells);
    if (cfg.out) write_atomic(*cfg.out, body);
    std::cout << "swept " << cells.size() << " cell(s)\n";
    if (!cfg.out) std::cout << body;
    return 0;
}

int cmd_hist(const RunConfig& cfg) {
    uosr::EvaluationBundle b = load_bundle(cfg);
    uosr::validate_bundle(b, resolve_n_classes(b));
    uosr::LabelVector predictions = resolve_predictions(cfg, b);
    uosr::ScoreVector scores = pipeline_scores(cfg, b, nullptr);
    uosr::OutcomeVector outcomes =
        uosr::classify_outcomes(predictions, b.test_labels, b.ood_features.rows);
    if (scores.size() == 0) uosr::raise(uosr::errc::empty_input, "no scores to bin");
    if (cfg.bins < 1) uosr::raise(uosr::errc::bad_spec, "--bins must be >= 1");

    // Equal-width bins spanning [min, max] of the pooled scores exactly; the
    // max lands in the last bin.
    double lo = scores.scores[0], hi = scores.scores[0];
    for (double v : scores.scores) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double width = (hi - lo) / static_cast<double>(cfg.bins);
    std::vector<std::array<std::size_t, 3>> counts(cfg.bins, {0, 0, 0});
    for (std::size_t i = 0; i < scores.size(); ++i) {
        std::size_t bin = cfg.bins - 1;
        if (width > 0.0)
            bin = std::min(cfg.bins - 1,
                           static_cast<std::size_t>((scores.scores[i] - lo) / width));
        counts[bin][static_cast<std::size_t>(outcomes.outcomes[i])] += 1;
    }
    std::string body = "bin_lo,bin_hi,inc,inw,ood\n";
    char buf[160];
    for (std::size_t bin = 0; bin < cfg.bins; ++bin) {
        double edge_lo = lo + width * static_cast<double>(bin);
        double edge_hi = bin + 1 == cfg.bins ? hi : lo + width * static_cast<double>(bin + 1);
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%zu,%zu,%zu\n", edge_lo, edge_hi,
                      counts[bin][0], counts[bin][1], counts[bin][2]);
        body += buf;
    }
    if (cfg.out)
        write_atomic(*cfg.out, body);
    else
        std::cout << body;
    if (cfg.out) std::cout << "wrote histogram (" << cfg.bins << " bins)\n";
    return 0;
}

uosr::ScoreDist parse_dist(const json& j) {
    if (j.contains("gaussian"))
        return uosr::GaussianDist{j["gaussian"].at("mu").get<double>(),
                                  j["gaussian"].at("sigma").get<double>()};
    if (j.contains("beta"))
        return uosr::BetaDist{j["beta"].at("a").get<double>(),
                              j["beta"].at("b").get<double>()};
    if (j.contains("point")) return uosr::PointDist{j["point"].at("v").get<double>()};
    uosr::raise(uosr::errc::bad_spec, "dist must be gaussian, beta or point");
}

uosr::GroupSpec parse_group(const json& j) {
    uosr::GroupSpec g;
    g.n = j.at("n").get<std::size_t>();
    g.dist = parse_dist(j.at("dist"));
    if (j.contains("clip"))
        g.clip = std::make_pair(j["clip"].at(0).get<double>(), j["clip"].at(1).get<double>());
    return g;
}

std::vector<uosr::ClusterSpec> parse_clusters(const json& j) {
    std::vector<uosr::ClusterSpec> out;
    for (const auto& c : j) {
        uosr::ClusterSpec spec;
        spec.n = c.at("n").get<std::size_t>();
        spec.center = c.at("center").get<std::vector<double>>();
        spec.spread = c.at("spread").get<double>();
        spec.class_id = c.at("class_id").get<std::int64_t>();
        out.push_back(std::move(spec));
    }
    return out;
}

int cmd_synth(const std::string& spec_path, bool calib, const std::string& out_prefix,
              std::uint64_t seed, bool seed_given) {
    if (calib) {
        auto scenarios = uosr::calibration_scenarios(seed);
        json manifest;
        manifest["kind"] = "calibration-scenarios";
        manifest["seed"] = seed;
        for (const auto& s : scenarios) {
            uosr::FeatureMatrix conf{s.confidence.size(), 1, s.confidence};
            std::string conf_path = out_prefix + "_" + s.id + "_confidence.bin";
            std::string correct_path = out_prefix + "_" + s.id + "_correct.bin";
            uosr::write_matrix(conf, conf_path);
            uosr::LabelVector correct(s.correct.begin(), s.correct.end());
            uosr::write_labels(correct, correct_path);
            manifest["scenarios"].push_back(
                {{"id", s.id}, {"confidence", conf_path}, {"correct", correct_path}});
        }
        write_atomic(out_prefix + "_manifest.json", manifest.dump(2) + "\n");
        std::cout << "wrote " << scenarios.size() << " scenario(s)\n";
        return 0;
    }

    if (spec_path.empty())
        uosr::raise(uosr::errc::bad_spec, "pass --spec or --calibration-scenarios");
    std::ifstream in(spec_path);
    if (!in) uosr::raise(uosr::errc::io_failure, "cannot open " + spec_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        uosr::raise(uosr::errc::bad_spec, "spec parse: " + std::string(e.what()));
    }
    std::uint64_t effective_seed = seed_given ? seed : j.value("seed", std::uint64_t{0});
    std::string kind = j.value("kind", "");
    json manifest;
    manifest["kind"] = kind;
    manifest["seed"] = effective_seed;

    if (kind == "scores") {
        auto [scores, outcomes] = uosr::gen_scores(parse_group(j.at("inc")),
                                                   parse_group(j.at("inw")),
                                                   parse_group(j.at("ood")), effective_seed);
        uosr::FeatureMatrix m{scores.size(), 1, scores.scores};
        uosr::LabelVector tags;
        tags.reserve(outcomes.size());
        for (auto o : outcomes.outcomes) tags.push_back(static_cast<std::int64_t>(o));
        uosr::write_matrix(m, out_prefix + "_scores.bin");
        uosr::write_labels(tags, out_prefix + "_outcomes.bin");
        manifest["scores"] = out_prefix + "_scores.bin";
        manifest["outcomes"] = out_prefix + "_outcomes.bin";
    } else if (kind == "bundle") {
        auto train = parse_clusters(j.at("train"));
        auto test = parse_clusters(j.at("test"));
        auto ood = parse_clusters(j.at("ood"));
        uosr::EvaluationBundle b = uosr::gen_bundle(train, test, ood, effective_seed);
        auto put = [&](const char* name, const uosr::FeatureMatrix& m) {
            std::string path = out_prefix + "_" + name + ".bin";
            uosr::write_matrix(m, path);
            manifest[name] = path;
        };
        auto put_labels = [&](const char* name, const uosr::LabelVector& l) {
            std::string path = out_prefix + "_" + name + ".bin";
            uosr::write_labels(l, path);
            manifest[name] = path;
        };
        put("train_feats", *b.train_features);
        put_labels("train_labels", *b.train_labels);
        put("test_feats", b.test_features);
        put("test_logits", *b.test_logits);
        put_labels("test_labels", b.test_labels);
        put("ood_feats", b.ood_features);
        put("ood_logits", *b.ood_logits);
        put_labels("ood_class_ids", *b.ood_class_ids);
    } else {
        uosr::raise(uosr::errc::bad_spec, "spec kind must be 'scores' or 'bundle'");
    }
    write_atomic(out_prefix + "_manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << kind << " files with prefix " << out_prefix << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"post-hoc uncertainty scoring and open-set evaluation"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "convert CSV exports to the binary container");
    std::vector<std::pair<std::string, std::string>> ingest_matrices, ingest_labels;
    ingest->add_option("--matrix", ingest_matrices, "CSV_SRC BIN_DST matrix pair");
    ingest->add_option("--labels", ingest_labels, "CSV_SRC BIN_DST label pair");

    auto* eval = app.add_subcommand("eval", "score a bundle and report all metrics");
    ConfigFlags eval_flags;
    eval_flags.add_common(eval);

    auto* fewshot = app.add_subcommand("fewshot", "run the few-shot reference protocol");
    ConfigFlags fewshot_flags;
    fewshot_flags.add_common(fewshot);
    std::vector<std::string> rows;
    fewshot->add_option("--rows", rows, "restrict table to these method rows")
        ->delimiter(',');
    bool no_exclude = false;
    fewshot->add_flag("--no-exclude-refs", no_exclude,
                      "keep drawn reference samples in the evaluated OoD set");

    auto* sweep_cmd = app.add_subcommand("sweep", "grid-evaluate K / alpha / beta");
    ConfigFlags sweep_flags;
    sweep_flags.add_common(sweep_cmd);
    std::vector<std::size_t> sweep_ks;
    std::vector<double> sweep_alphas, sweep_betas;
    sweep_cmd->add_option("--ks", sweep_ks, "K grid")->delimiter(',');
    sweep_cmd->add_option("--alphas", sweep_alphas, "alpha grid")->delimiter(',');
    sweep_cmd->add_option("--betas", sweep_betas, "beta grid")->delimiter(',');
    bool sweep_no_exclude = false;
    sweep_cmd->add_flag("--no-exclude-refs", sweep_no_exclude,
                        "keep drawn reference samples in the evaluated OoD set");

    auto* synth = app.add_subcommand("synth", "generate synthetic scores or bundles");
    std::string synth_spec, synth_out;
    bool synth_calib = false;
    std::uint64_t synth_seed = 0;
    synth->add_option("--spec", synth_spec, "JSON scenario spec");
    synth->add_flag("--calibration-scenarios", synth_calib,
                    "emit the five built-in calibration layouts");
    synth->add_option("--out", synth_out, "output path prefix")->required();
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "RNG seed override");

    auto* hist = app.add_subcommand("hist", "per-group score histograms as CSV");
    ConfigFlags hist_flags;
    hist_flags.add_common(hist);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ingest) return cmd_ingest(ingest_matrices, ingest_labels);
        if (*eval) return cmd_eval(eval_flags.resolve());
        if (*fewshot) {
            RunConfig cfg = fewshot_flags.resolve();
            if (no_exclude) cfg.exclude_refs = false;
            cfg.rows = rows;
            return cmd_fewshot(cfg);
        }
        if (*sweep_cmd) {
            RunConfig cfg = sweep_flags.resolve();
            if (sweep_no_exclude) cfg.exclude_refs = false;
            return cmd_sweep(cfg, sweep_ks, sweep_alphas, sweep_betas);
        }
        if (*synth)
            return cmd_synth(synth_spec, synth_calib, synth_out, synth_seed,
                             synth_seed_opt->count() > 0);
        if (*hist) return cmd_hist(hist_flags.resolve());
    } catch (const uosr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
