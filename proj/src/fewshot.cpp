#include "uosr/fewshot.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"
#include "uosr/rng.hpp"

namespace uosr {

std::vector<std::vector<std::size_t>> draw_reference_partition(
    const LabelVector& ref_pool_class_ids, std::size_t shots, std::uint64_t seed) {
    if (ref_pool_class_ids.empty()) raise(errc::empty_pool, "reference pool is empty");
    if (shots < 1) raise(errc::bad_spec, "shots must be >= 1");

    // Classes processed in ascending id order, indices ascending before the
    // shuffle, one shared RNG stream: the partition is a pure function of
    // (pool, shots, seed).
    std::map<std::int64_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < ref_pool_class_ids.size(); ++i)
        by_class[ref_pool_class_ids[i]].push_back(i);

    std::size_t min_count = ref_pool_class_ids.size();
    for (const auto& [cls, members] : by_class) min_count = std::min(min_count, members.size());
    if (min_count < shots)
        raise(errc::shots_exceed_class_size,
              "smallest class has " + std::to_string(min_count) + " samples, need " +
                  std::to_string(shots));

    SplitMix64 rng(mix_key(seed, 0x7265665f64726177ULL, 0));  // "ref_draw" stream
    std::size_t n_repeats = min_count / shots;
    std::vector<std::vector<std::size_t>> repeats(n_repeats);
    for (auto& [cls, members] : by_class) {
        seeded_shuffle(std::span<std::size_t>(members), rng);
        for (std::size_t r = 0; r < n_repeats; ++r)
            for (std::size_t s = 0; s < shots; ++s)
                repeats[r].push_back(members[r * shots + s]);
    }
    for (auto& rep : repeats) std::sort(rep.begin(), rep.end());
    return repeats;
}

const MethodSeries& FewShotResult::row(std::string_view method) const {
    for (const auto& m : methods)
        if (m.method == method) return m;
    raise(errc::internal, "no method row '" + std::string(method) + "'");
}

namespace {

FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<std::size_t>& idx) {
    FeatureMatrix out;
    out.rows = idx.size();
    out.cols = m.cols;
    out.data.reserve(out.rows * out.cols);
    for (std::size_t r : idx) {
        auto row = m.row(r);
        out.data.insert(out.data.end(), row.begin(), row.end());
    }
    return out;
}

}  // namespace

FewShotResult run_fewshot(const EvaluationBundle& bundle, const FewShotConfig& cfg) {
    if (!bundle.train_features) raise(errc::missing_component, "few-shot needs train features");
    if (!bundle.test_logits) raise(errc::missing_component, "few-shot needs test logits");
    if (!bundle.ood_logits) raise(errc::missing_component, "few-shot needs ood logits");
    if (!bundle.ood_class_ids) raise(errc::missing_component, "few-shot needs ood class ids");
    if (!is_logit_scorer(cfg.scorer0))
        raise(errc::bad_spec, "scorer0 must be a logit scorer, got '" + cfg.scorer0 + "'");
    if (!(cfg.fusion.alpha > 0.0)) raise(errc::bad_spec, "alpha must be positive");
    if (cfg.knn.k < 1) raise(errc::k_out_of_range, "k must be >= 1");

    FewShotResult result;
    result.draws = draw_reference_partition(*bundle.ood_class_ids, cfg.shots, cfg.seed);
    result.n_repeats = result.draws.size();
    std::size_t used = 0;
    for (const auto& d : result.draws) used += d.size();
    result.unused_refs = bundle.ood_class_ids->size() - used;

    SimilarityBank train_bank(*bundle.train_features);
    LabelVector predictions = predictions_from_logits(*bundle.test_logits);

    const char* method_ids[6] = {cfg.scorer0.c_str(), "knn", "fsknn",
                                 "fsknn+s", "fsknn*s", "fsknns"};
    result.methods.resize(6);
    for (int i = 0; i < 6; ++i) result.methods[i].method = method_ids[i];

    for (const auto& draw : result.draws) {
        // Evaluated OoD set: the pool minus this repeat's reference draw.
        std::vector<std::size_t> eval_idx;
        if (cfg.exclude_refs) {
            std::vector<bool> drawn(bundle.ood_features.rows, false);
            for (std::size_t i : draw) drawn[i] = true;
            for (std::size_t i = 0; i < bundle.ood_features.rows; ++i)
                if (!drawn[i]) eval_idx.push_back(i);
        } else {
            eval_idx.resize(bundle.ood_features.rows);
            for (std::size_t i = 0; i < eval_idx.size(); ++i) eval_idx[i] = i;
        }
        if (eval_idx.empty())
            raise(errc::empty_pool, "no OoD samples left to evaluate after the reference draw");
        result.evaluated_ood.push_back(eval_idx);

        FeatureMatrix ref_feats = take_rows(bundle.ood_features, draw);
        SimilarityBank ref_bank(std::move(ref_feats));

        FeatureMatrix eval_feats =
            vstack(bundle.test_features, take_rows(bundle.ood_features, eval_idx));
        FeatureMatrix eval_logits =
            vstack(*bundle.test_logits, take_rows(*bundle.ood_logits, eval_idx));

        OutcomeVector outcomes = classify_outcomes(predictions, bundle.test_labels,
                                                   eval_idx.size());

        ScoreVector u0 = score_logits(&eval_logits, cfg.scorer0, cfg.temperature);
        ScoreVector u_knn = knn_score(eval_feats, train_bank, cfg.knn, cfg.n_threads);
        ScoreVector u1 = fsknn_score(eval_feats, train_bank, ref_bank, cfg.knn, cfg.n_threads);

        // Gate threshold from the reference samples' own fsknn scores.
        ScoreVector ref_u1 = fsknn_score(take_rows(bundle.ood_features, draw), train_bank,
                                         ref_bank, cfg.knn, cfg.n_threads);
        FusionParams fusion = cfg.fusion;
        fusion.lambda = select_lambda(ref_stats(ref_u1), cfg.fusion.beta);

        ScoreVector fused = fsknns_fuse(u0, u1, fusion);
        ScoreVector added = additive_fuse(u0, u1);
        ScoreVector multiplied = multiplicative_fuse(u0, u1);

        EvaluateOptions opt;
        opt.ece_bins = cfg.ece_bins;
        std::vector<double> confidence;
        if (cfg.scorer0 == "msp") {
            confidence.reserve(u0.size());
            for (double u : u0.scores) confidence.push_back(1.0 - u);
            opt.confidence = &confidence;
        }

        result.methods[0].per_repeat.push_back(evaluate(u0, outcomes, opt));
        result.methods[1].per_repeat.push_back(evaluate(u_knn, outcomes));
        result.methods[2].per_repeat.push_back(evaluate(u1, outcomes));
        result.methods[3].per_repeat.push_back(evaluate(added, outcomes));
        result.methods[4].per_repeat.push_back(evaluate(multiplied, outcomes));
        result.methods[5].per_repeat.push_back(evaluate(fused, outcomes));
    }

    for (auto& m : result.methods) m.mean = mean_report(m.per_repeat);
    return result;
}

namespace {

nlohmann::json report_json_obj(const MetricReport& r) {
    return nlohmann::json::parse(report_to_json(r));
}

}  // namespace

std::string fewshot_to_json(const FewShotResult& r, const FewShotConfig& cfg) {
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : r.methods) {
        nlohmann::json per_repeat = nlohmann::json::array();
        for (const auto& rep : m.per_repeat) per_repeat.push_back(report_json_obj(rep));
        methods.push_back({{"method", m.method},
                           {"mean", report_json_obj(m.mean)},
                           {"per_repeat", per_repeat}});
    }
    nlohmann::json draws = nlohmann::json::array();
    for (const auto& d : r.draws) draws.push_back(d);
    nlohmann::json j{
        {"config",
         {{"shots", cfg.shots},
          {"k", cfg.knn.k},
          {"alpha", cfg.fusion.alpha},
          {"beta", cfg.fusion.beta},
          {"seed", cfg.seed},
          {"scorer0", cfg.scorer0},
          {"temperature", cfg.temperature.t},
          {"exclude_refs", cfg.exclude_refs}}},
        {"n_repeats", r.n_repeats},
        {"unused_refs", r.unused_refs},
        {"draws", draws},
        {"methods", methods},
    };
    return j.dump(2);
}

std::string fewshot_table(const FewShotResult& r, bool markdown,
                          std::span<const std::string> rows) {
    auto wanted = [&](const std::string& method) {
        if (rows.empty()) return true;
        return std::find(rows.begin(), rows.end(), method) != rows.end();
    };
    std::string out;
    if (markdown) {
        out = "| Method | AURC | UOSR | OSR | InC/OoD | InC/InW |\n"
              "|---|---|---|---|---|---|\n";
    } else {
        out = "Method,AURC,UOSR,OSR,InC/OoD,InC/InW\n";
    }
    auto fmt = [](const std::optional<double>& v, double scale) -> std::string {
        if (!v) return "n/a";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", *v * scale);
        return buf;
    };
    for (const auto& m : r.methods) {
        if (!wanted(m.method)) continue;
        std::string cells[5] = {fmt(m.mean.aurc_uosr, 1.0), fmt(m.mean.auroc_uosr, 100.0),
                                fmt(m.mean.auroc_osr, 100.0), fmt(m.mean.auroc_inc_ood, 100.0),
                                fmt(m.mean.auroc_inc_inw, 100.0)};
        if (markdown) {
            out += "| " + m.method + " |";
            for (const auto& c : cells) out += " " + c + " |";
            out += "\n";
        } else {
            out += m.method;
            for (const auto& c : cells) out += "," + c;
            out += "\n";
        }
    }
    return out;
}

}  // namespace uosr
