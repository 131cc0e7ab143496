#include "uosr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"

namespace uosr {

namespace {

// Neumaier-compensated sum; keeps the per-bin confidence mean exact enough
// that a perfectly calibrated point mass yields an ECE of exactly zero.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

std::vector<double> gather(const ScoreVector& s, const OutcomeVector& o,
                           std::initializer_list<Outcome> which) {
    std::vector<double> out;
    for (std::size_t i = 0; i < o.size(); ++i)
        for (Outcome w : which)
            if (o.outcomes[i] == w) {
                out.push_back(s.scores[i]);
                break;
            }
    return out;
}

std::optional<double> try_auroc(const std::vector<double>& neg, const std::vector<double>& pos) {
    if (neg.empty() || pos.empty()) return std::nullopt;
    return auroc(neg, pos);
}

std::string fmt2(const std::optional<double>& v, double scale) {
    if (!v) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", *v * scale);
    return buf;
}

}  // namespace

double auroc(std::span<const double> neg, std::span<const double> pos) {
    if (neg.empty() || pos.empty()) raise(errc::empty_class, "auroc needs both classes");
    std::size_t n = neg.size(), m = pos.size();
    std::vector<std::pair<double, std::uint8_t>> v;
    v.reserve(n + m);
    for (double s : neg) v.emplace_back(s, 0);
    for (double s : pos) v.emplace_back(s, 1);
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Midrank tie handling: every member of a tie group gets the average rank.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j].first == v[i].first) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (v[k].second) rank_sum_pos += midrank;
        i = j;
    }
    double u = rank_sum_pos - static_cast<double>(m) * (static_cast<double>(m) + 1.0) / 2.0;
    return u / (static_cast<double>(m) * static_cast<double>(n));
}

double aupr(std::span<const double> neg, std::span<const double> pos) {
    if (neg.empty() || pos.empty()) raise(errc::empty_class, "aupr needs both classes");
    std::vector<std::pair<double, std::uint8_t>> v;
    v.reserve(neg.size() + pos.size());
    for (double s : neg) v.emplace_back(s, 0);
    for (double s : pos) v.emplace_back(s, 1);
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    double total_pos = static_cast<double>(pos.size());
    double area = 0.0, prev_recall = 0.0;
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j].first == v[i].first) {
            (v[j].second ? tp : fp) += 1;
            ++j;
        }
        double recall = static_cast<double>(tp) / total_pos;
        double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

std::vector<RiskCoveragePoint> risk_coverage_curve(std::span<const double> confidence,
                                                   std::span<const std::uint8_t> correct) {
    if (confidence.size() != correct.size())
        raise(errc::length_mismatch, "confidence vs correct length");
    if (confidence.empty()) raise(errc::empty_input, "empty risk-coverage input");
    std::vector<std::size_t> order(confidence.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (confidence[a] != confidence[b]) return confidence[a] > confidence[b];
        return a < b;  // deterministic tie rule
    });
    std::vector<RiskCoveragePoint> curve;
    curve.reserve(order.size());
    std::size_t wrong = 0;
    double n = static_cast<double>(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!correct[order[i]]) ++wrong;
        curve.push_back({static_cast<double>(i + 1) / n,
                         static_cast<double>(wrong) / static_cast<double>(i + 1),
                         confidence[order[i]]});
    }
    return curve;
}

double aurc(std::span<const RiskCoveragePoint> curve) {
    if (curve.empty()) raise(errc::empty_input, "empty risk-coverage curve");
    double sum = 0.0;
    for (const auto& p : curve) sum += p.risk;
    return 1000.0 * sum / static_cast<double>(curve.size());
}

double ece(std::span<const double> confidence, std::span<const std::uint8_t> correct,
           std::size_t n_bins) {
    if (confidence.size() != correct.size())
        raise(errc::length_mismatch, "confidence vs correct length");
    if (n_bins < 1) raise(errc::bad_spec, "n_bins must be >= 1");
    for (double c : confidence)
        if (!(c >= 0.0 && c <= 1.0))
            raise(errc::out_of_range, "confidence " + std::to_string(c) + " outside [0, 1]");

    // Bin membership is decided by comparisons against the boundary doubles
    // b/n_bins, not by a multiply-and-floor shortcut, so boundary confidences
    // land in the owning bin.
    auto bin_of = [&](double c) -> std::size_t {
        if (c == 0.0) return 0;
        std::size_t idx = std::min(
            n_bins - 1, static_cast<std::size_t>(std::floor(c * static_cast<double>(n_bins))));
        while (idx > 0 && c <= static_cast<double>(idx) / static_cast<double>(n_bins)) --idx;
        while (idx + 1 < n_bins &&
               c > static_cast<double>(idx + 1) / static_cast<double>(n_bins))
            ++idx;
        return idx;
    };

    std::vector<CompensatedSum> conf_sum(n_bins);
    std::vector<std::size_t> count(n_bins, 0), hits(n_bins, 0);
    for (std::size_t i = 0; i < confidence.size(); ++i) {
        std::size_t b = bin_of(confidence[i]);
        conf_sum[b].add(confidence[i]);
        count[b] += 1;
        hits[b] += correct[i] ? 1 : 0;
    }
    double total = static_cast<double>(confidence.size());
    double e = 0.0;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (count[b] == 0) continue;
        double nb = static_cast<double>(count[b]);
        double acc = static_cast<double>(hits[b]) / nb;
        double conf = conf_sum[b].value() / nb;
        e += (nb / total) * std::abs(acc - conf);
    }
    return e;
}

MetricReport evaluate(const ScoreVector& scores, const OutcomeVector& outcomes,
                      const EvaluateOptions& opt) {
    if (scores.size() != outcomes.size())
        raise(errc::length_mismatch, "scores " + std::to_string(scores.size()) +
                                         " vs outcomes " + std::to_string(outcomes.size()));
    MetricReport r;
    r.n_inc = static_cast<double>(outcomes.n_inc);
    r.n_inw = static_cast<double>(outcomes.n_inw);
    r.n_ood = static_cast<double>(outcomes.n_ood);
    r.scorer_id = scores.scorer_id;
    r.params = scores.params;

    if (outcomes.n_ind() > 0) r.accuracy = 100.0 * closed_set_accuracy(outcomes);

    auto inc = gather(scores, outcomes, {Outcome::inc});
    auto inw = gather(scores, outcomes, {Outcome::inw});
    auto ood = gather(scores, outcomes, {Outcome::ood});
    auto inw_ood = gather(scores, outcomes, {Outcome::inw, Outcome::ood});
    auto inc_inw = gather(scores, outcomes, {Outcome::inc, Outcome::inw});

    r.auroc_uosr = try_auroc(inc, inw_ood);
    r.auroc_osr = try_auroc(inc_inw, ood);
    r.auroc_sp = try_auroc(inc, inw);
    r.auroc_inc_inw = try_auroc(inc, inw);
    r.auroc_inc_ood = try_auroc(inc, ood);
    r.auroc_inw_ood = try_auroc(inw, ood);
    if (!inc.empty() && !inw_ood.empty()) r.aupr_uosr = aupr(inc, inw_ood);

    if (outcomes.size() > 0) {
        std::vector<double> conf(outcomes.size());
        std::vector<std::uint8_t> correct(outcomes.size());
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            conf[i] = -scores.scores[i];
            correct[i] = outcomes.outcomes[i] == Outcome::inc ? 1 : 0;
        }
        r.aurc_uosr = aurc(risk_coverage_curve(conf, correct));
    }

    if (opt.confidence != nullptr && outcomes.n_ind() > 0) {
        if (opt.confidence->size() != outcomes.size())
            raise(errc::length_mismatch, "confidence vs outcomes length");
        std::vector<double> conf;
        std::vector<std::uint8_t> correct;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (outcomes.outcomes[i] == Outcome::ood) continue;
            conf.push_back((*opt.confidence)[i]);
            correct.push_back(outcomes.outcomes[i] == Outcome::inc ? 1 : 0);
        }
        r.ece = ece(conf, correct, opt.ece_bins);
    }
    return r;
}

MetricReport mean_report(std::span<const MetricReport> reports) {
    if (reports.empty()) raise(errc::empty_input, "no reports to average");
    MetricReport m;
    m.scorer_id = reports.front().scorer_id;
    m.params = reports.front().params;
    double n = static_cast<double>(reports.size());

    auto avg = [&](auto field) -> std::optional<double> {
        double sum = 0.0;
        for (const auto& r : reports) {
            const std::optional<double>& v = r.*field;
            if (!v) return std::nullopt;
            sum += *v;
        }
        return sum / n;
    };
    m.accuracy = avg(&MetricReport::accuracy);
    m.auroc_uosr = avg(&MetricReport::auroc_uosr);
    m.auroc_osr = avg(&MetricReport::auroc_osr);
    m.auroc_sp = avg(&MetricReport::auroc_sp);
    m.auroc_inc_inw = avg(&MetricReport::auroc_inc_inw);
    m.auroc_inc_ood = avg(&MetricReport::auroc_inc_ood);
    m.auroc_inw_ood = avg(&MetricReport::auroc_inw_ood);
    m.aupr_uosr = avg(&MetricReport::aupr_uosr);
    m.aurc_uosr = avg(&MetricReport::aurc_uosr);
    m.ece = avg(&MetricReport::ece);
    for (const auto& r : reports) {
        m.n_inc += r.n_inc;
        m.n_inw += r.n_inw;
        m.n_ood += r.n_ood;
    }
    m.n_inc /= n;
    m.n_inw /= n;
    m.n_ood /= n;
    return m;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

}  // namespace

std::string report_to_json(const MetricReport& r) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    nlohmann::json j{
        {"scorer", r.scorer_id},
        {"params", params},
        {"counts", {{"inc", r.n_inc}, {"inw", r.n_inw}, {"ood", r.n_ood}}},
        {"accuracy", opt_json(r.accuracy)},
        {"aurc_uosr", opt_json(r.aurc_uosr)},
        {"auroc", {{"uosr", opt_json(r.auroc_uosr)},
                   {"osr", opt_json(r.auroc_osr)},
                   {"sp", opt_json(r.auroc_sp)},
                   {"inc_inw", opt_json(r.auroc_inc_inw)},
                   {"inc_ood", opt_json(r.auroc_inc_ood)},
                   {"inw_ood", opt_json(r.auroc_inw_ood)}}},
        {"aupr_uosr", opt_json(r.aupr_uosr)},
        {"ece", opt_json(r.ece)},
    };
    return j.dump(2);
}

std::string report_table_header(bool markdown) {
    if (markdown)
        return "| Acc. | AURC | UOSR | OSR | InC/InW | InC/OoD | InW/OoD |\n"
               "|---|---|---|---|---|---|---|";
    return "Acc.,AURC,UOSR,OSR,InC/InW,InC/OoD,InW/OoD";
}

std::string report_table_row(const MetricReport& r, bool markdown) {
    std::string cells[7] = {
        fmt2(r.accuracy, 1.0),       fmt2(r.aurc_uosr, 1.0),
        fmt2(r.auroc_uosr, 100.0),   fmt2(r.auroc_osr, 100.0),
        fmt2(r.auroc_inc_inw, 100.0), fmt2(r.auroc_inc_ood, 100.0),
        fmt2(r.auroc_inw_ood, 100.0),
    };
    std::string out;
    if (markdown) {
        out = "|";
        for (const auto& c : cells) out += " " + c + " |";
    } else {
        for (std::size_t i = 0; i < 7; ++i) {
            if (i) out += ",";
            out += cells[i];
        }
    }
    return out;
}

}  // namespace uosr
