#include "uosr/sweep.hpp"

#include <cstdio>

#include "json.hpp"

namespace uosr {

std::vector<SweepCell> sweep(const EvaluationBundle& bundle, const FewShotConfig& base_cfg,
                             const SweepGrid& grid) {
    if (grid.ks.empty() && grid.alphas.empty() && grid.betas.empty())
        raise(errc::bad_spec, "sweep grid is empty along every axis");

    auto ks = grid.ks.empty() ? std::vector<std::size_t>{base_cfg.knn.k} : grid.ks;
    auto alphas = grid.alphas.empty() ? std::vector<double>{base_cfg.fusion.alpha} : grid.alphas;
    auto betas = grid.betas.empty() ? std::vector<double>{base_cfg.fusion.beta} : grid.betas;
    for (std::size_t k : ks)
        if (k < 1) raise(errc::k_out_of_range, "sweep k must be >= 1");

    std::sort(ks.begin(), ks.end());
    std::sort(alphas.begin(), alphas.end());
    std::sort(betas.begin(), betas.end());

    std::vector<SweepCell> cells;
    for (std::size_t k : ks)
        for (double alpha : alphas)
            for (double beta : betas) {
                FewShotConfig cfg = base_cfg;  // seed shared: draws identical per cell
                cfg.knn.k = k;
                cfg.fusion.alpha = alpha;
                cfg.fusion.beta = beta;
                FewShotResult r = run_fewshot(bundle, cfg);
                SweepCell cell{k, alpha, beta, r.mean_report(), 0.0};
                double lambda_sum = 0.0;
                for (const auto& rep : r.per_repeat())
                    for (const auto& [name, value] : rep.params)
                        if (name == "lambda") lambda_sum += value;
                cell.mean_lambda = lambda_sum / static_cast<double>(r.n_repeats);
                cells.push_back(std::move(cell));
            }
    return cells;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

}  // namespace

std::string sweep_to_csv(std::span<const SweepCell> cells) {
    std::string out = "k,alpha,beta,uosr_auroc,osr_auroc,inc_inw,inc_ood,aurc\n";
    char buf[128];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%zu,%g,%g,", c.k, c.alpha, c.beta);
        out += buf;
        out += fmt_opt(c.mean.auroc_uosr) + "," + fmt_opt(c.mean.auroc_osr) + "," +
               fmt_opt(c.mean.auroc_inc_inw) + "," + fmt_opt(c.mean.auroc_inc_ood) + "," +
               fmt_opt(c.mean.aurc_uosr) + "\n";
    }
    return out;
}

std::string sweep_to_json(std::span<const SweepCell> cells) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        if (!v) return nullptr;
        return *v;
    };
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : cells)
        rows.push_back({{"k", c.k},
                        {"alpha", c.alpha},
                        {"beta", c.beta},
                        {"uosr_auroc", opt(c.mean.auroc_uosr)},
                        {"osr_auroc", opt(c.mean.auroc_osr)},
                        {"inc_inw", opt(c.mean.auroc_inc_inw)},
                        {"inc_ood", opt(c.mean.auroc_inc_ood)},
                        {"aurc", opt(c.mean.aurc_uosr)},
                        {"mean_lambda", c.mean_lambda}});
    return rows.dump(2);
}

}  // namespace uosr
