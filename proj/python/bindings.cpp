#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uosr/fewshot.hpp"
#include "uosr/fusion.hpp"
#include "uosr/knn.hpp"
#include "uosr/metrics.hpp"
#include "uosr/outcomes.hpp"
#include "uosr/scorers.hpp"
#include "uosr/sweep.hpp"
#include "uosr/synth.hpp"
#include "uosr/tensorio.hpp"

namespace py = pybind11;
using namespace uosr;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

FeatureMatrix to_matrix(const DoubleArray& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    FeatureMatrix m;
    m.rows = static_cast<std::size_t>(a.shape(0));
    m.cols = static_cast<std::size_t>(a.shape(1));
    m.data.assign(a.data(), a.data() + m.rows * m.cols);
    return m;
}

std::vector<double> to_vector(const DoubleArray& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return {a.data(), a.data() + a.shape(0)};
}

LabelVector to_labels(const IntArray& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return {a.data(), a.data() + a.shape(0)};
}

std::vector<std::uint8_t> to_flags(const IntArray& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    std::vector<std::uint8_t> out(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = a.data()[i] ? 1 : 0;
    return out;
}

py::array matrix_to_numpy(const FeatureMatrix& m) {
    py::array_t<double> a({m.rows, m.cols});
    std::copy(m.data.begin(), m.data.end(), a.mutable_data());
    return a;
}

py::array labels_to_numpy(const LabelVector& l) {
    py::array_t<std::int64_t> a(static_cast<py::ssize_t>(l.size()));
    std::copy(l.begin(), l.end(), a.mutable_data());
    return a;
}

py::array scores_to_numpy(const ScoreVector& s) {
    py::array_t<double> a(static_cast<py::ssize_t>(s.size()));
    std::copy(s.scores.begin(), s.scores.end(), a.mutable_data());
    return a;
}

ScoreVector to_scores(const DoubleArray& a, const char* id) {
    ScoreVector s;
    s.scores = to_vector(a);
    s.scorer_id = id;
    return s;
}

py::object opt_to_py(const std::optional<double>& v) {
    if (!v) return py::none();
    return py::float_(*v);
}

py::dict report_to_dict(const MetricReport& r) {
    py::dict params;
    for (const auto& [k, v] : r.params) params[py::str(k)] = v;
    py::dict d;
    d["scorer"] = r.scorer_id;
    d["params"] = params;
    d["accuracy"] = opt_to_py(r.accuracy);
    d["aurc_uosr"] = opt_to_py(r.aurc_uosr);
    d["auroc_uosr"] = opt_to_py(r.auroc_uosr);
    d["auroc_osr"] = opt_to_py(r.auroc_osr);
    d["auroc_sp"] = opt_to_py(r.auroc_sp);
    d["auroc_inc_inw"] = opt_to_py(r.auroc_inc_inw);
    d["auroc_inc_ood"] = opt_to_py(r.auroc_inc_ood);
    d["auroc_inw_ood"] = opt_to_py(r.auroc_inw_ood);
    d["aupr_uosr"] = opt_to_py(r.aupr_uosr);
    d["ece"] = opt_to_py(r.ece);
    d["n_inc"] = r.n_inc;
    d["n_inw"] = r.n_inw;
    d["n_ood"] = r.n_ood;
    return d;
}

Task task_from_string(const std::string& name) {
    if (name == "uosr") return Task::uosr;
    if (name == "osr") return Task::osr;
    if (name == "sp") return Task::sp;
    throw py::value_error("task must be 'uosr', 'osr' or 'sp'");
}

FewShotConfig make_config(std::size_t shots, std::size_t k, double alpha, double beta,
                          std::uint64_t seed, const std::string& scorer0, double temperature,
                          bool exclude_refs, unsigned threads, std::size_t ece_bins) {
    FewShotConfig cfg;
    cfg.shots = shots;
    cfg.knn.k = k;
    cfg.fusion.alpha = alpha;
    cfg.fusion.beta = beta;
    cfg.seed = seed;
    cfg.scorer0 = scorer0;
    cfg.temperature.t = temperature;
    cfg.exclude_refs = exclude_refs;
    cfg.n_threads = threads;
    cfg.ece_bins = ece_bins;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "post-hoc uncertainty scoring and open-set evaluation";

    py::register_exception<Error>(m, "UosrError");

    // ---- tensor IO ----
    m.def(
        "load_matrix",
        [](const std::string& path, const std::string& format) {
            return matrix_to_numpy(load_matrix(
                path, format == "csv" ? FileFormat::csv : FileFormat::binary));
        },
        py::arg("path"), py::arg("format") = "binary");
    m.def(
        "write_matrix",
        [](const DoubleArray& a, const std::string& path) { write_matrix(to_matrix(a), path); },
        py::arg("matrix"), py::arg("path"));
    m.def(
        "load_labels",
        [](const std::string& path, const std::string& format) {
            return labels_to_numpy(load_labels(
                path, format == "csv" ? FileFormat::csv : FileFormat::binary));
        },
        py::arg("path"), py::arg("format") = "binary");
    m.def(
        "write_labels",
        [](const IntArray& a, const std::string& path) { write_labels(to_labels(a), path); },
        py::arg("labels"), py::arg("path"));

    // ---- outcomes ----
    py::class_<OutcomeVector>(m, "OutcomeVector")
        .def_readonly("n_inc", &OutcomeVector::n_inc)
        .def_readonly("n_inw", &OutcomeVector::n_inw)
        .def_readonly("n_ood", &OutcomeVector::n_ood)
        .def("__len__", &OutcomeVector::size)
        .def("to_numpy", [](const OutcomeVector& o) {
            py::array_t<std::uint8_t> a(static_cast<py::ssize_t>(o.size()));
            for (std::size_t i = 0; i < o.size(); ++i)
                a.mutable_data()[i] = static_cast<std::uint8_t>(o.outcomes[i]);
            return a;
        });
    m.def(
        "classify_outcomes",
        [](const IntArray& predictions, const IntArray& labels, std::size_t n_ood) {
            return classify_outcomes(to_labels(predictions), to_labels(labels), n_ood);
        },
        py::arg("predictions"), py::arg("labels"), py::arg("n_ood"));
    m.def(
        "ground_truth",
        [](const std::string& task, const OutcomeVector& o) {
            TaskGroundTruth gt = ground_truth(task_from_string(task), o);
            py::array_t<std::uint8_t> reject(static_cast<py::ssize_t>(gt.reject.size()));
            py::array_t<std::uint8_t> mask(static_cast<py::ssize_t>(gt.mask.size()));
            std::copy(gt.reject.begin(), gt.reject.end(), reject.mutable_data());
            std::copy(gt.mask.begin(), gt.mask.end(), mask.mutable_data());
            return py::make_tuple(reject, mask);
        },
        py::arg("task"), py::arg("outcomes"));
    m.def("closed_set_accuracy", &closed_set_accuracy, py::arg("outcomes"));

    // ---- logit scorers ----
    auto bind_scorer = [&](const char* name, auto fn) {
        m.def(
            name,
            [fn](const DoubleArray& logits, double t) {
                return scores_to_numpy(fn(to_matrix(logits), Temperature{t}));
            },
            py::arg("logits"), py::arg("t") = 1.0);
    };
    bind_scorer("msp_score", [](const FeatureMatrix& l, Temperature t) { return msp_score(l, t); });
    bind_scorer("entropy_score",
                [](const FeatureMatrix& l, Temperature t) { return entropy_score(l, t); });
    bind_scorer("energy_score",
                [](const FeatureMatrix& l, Temperature t) { return energy_score(l, t); });
    bind_scorer("gini_score",
                [](const FeatureMatrix& l, Temperature t) { return gini_score(l, t); });
    m.def(
        "maxlogit_score",
        [](const DoubleArray& logits) { return scores_to_numpy(maxlogit_score(to_matrix(logits))); },
        py::arg("logits"));
    m.def(
        "softmax",
        [](const DoubleArray& row, double t) {
            auto p = softmax(to_vector(row), Temperature{t});
            py::array_t<double> a(static_cast<py::ssize_t>(p.size()));
            std::copy(p.begin(), p.end(), a.mutable_data());
            return a;
        },
        py::arg("logits_row"), py::arg("t") = 1.0);
    m.def(
        "predictions_from_logits",
        [](const DoubleArray& logits) {
            return labels_to_numpy(predictions_from_logits(to_matrix(logits)));
        },
        py::arg("logits"));

    // ---- knn scorers ----
    m.def(
        "topk_similarity",
        [](const DoubleArray& query, const DoubleArray& bank, std::size_t k) {
            SimilarityBank b(to_matrix(bank));
            return topk_similarity(to_vector(query), b, k);
        },
        py::arg("query"), py::arg("bank"), py::arg("k"));
    m.def(
        "knn_score",
        [](const DoubleArray& test, const DoubleArray& train, std::size_t k, unsigned threads) {
            SimilarityBank bank(to_matrix(train));
            return scores_to_numpy(knn_score(to_matrix(test), bank, {k}, threads));
        },
        py::arg("test"), py::arg("train"), py::arg("k") = 5, py::arg("threads") = 1);
    m.def(
        "fsknn_score",
        [](const DoubleArray& test, const DoubleArray& train, const DoubleArray& ref,
           std::size_t k, unsigned threads) {
            SimilarityBank train_bank(to_matrix(train));
            SimilarityBank ref_bank(to_matrix(ref));
            return scores_to_numpy(
                fsknn_score(to_matrix(test), train_bank, ref_bank, {k}, threads));
        },
        py::arg("test"), py::arg("train"), py::arg("ref"), py::arg("k") = 5,
        py::arg("threads") = 1);

    // ---- fusion ----
    m.def(
        "ref_stats",
        [](const DoubleArray& u) {
            RefStats s = ref_stats(to_scores(u, "ref"));
            return py::make_tuple(s.mean, s.std, s.n);
        },
        py::arg("ref_uncertainties"));
    m.def(
        "select_lambda",
        [](double mean, double std, double beta) {
            return select_lambda({mean, std, 1}, beta);
        },
        py::arg("mean"), py::arg("std"), py::arg("beta") = 1.0);
    m.def(
        "fsknns_fuse",
        [](const DoubleArray& u0, const DoubleArray& u1, double alpha, double lambda) {
            return scores_to_numpy(fsknns_fuse(to_scores(u0, "u0"), to_scores(u1, "u1"),
                                               {alpha, 1.0, lambda}));
        },
        py::arg("u0"), py::arg("u1"), py::arg("alpha") = 50.0, py::arg("lambda") = 0.0);
    m.def(
        "additive_fuse",
        [](const DoubleArray& u0, const DoubleArray& u1) {
            return scores_to_numpy(additive_fuse(to_scores(u0, "u0"), to_scores(u1, "u1")));
        },
        py::arg("u0"), py::arg("u1"));
    m.def(
        "multiplicative_fuse",
        [](const DoubleArray& u0, const DoubleArray& u1) {
            return scores_to_numpy(
                multiplicative_fuse(to_scores(u0, "u0"), to_scores(u1, "u1")));
        },
        py::arg("u0"), py::arg("u1"));

    // ---- metrics ----
    m.def(
        "auroc",
        [](const DoubleArray& neg, const DoubleArray& pos) {
            return auroc(to_vector(neg), to_vector(pos));
        },
        py::arg("neg"), py::arg("pos"));
    m.def(
        "aupr",
        [](const DoubleArray& neg, const DoubleArray& pos) {
            return aupr(to_vector(neg), to_vector(pos));
        },
        py::arg("neg"), py::arg("pos"));
    m.def(
        "risk_coverage_curve",
        [](const DoubleArray& confidence, const IntArray& correct) {
            auto curve = risk_coverage_curve(to_vector(confidence), to_flags(correct));
            py::array_t<double> a({curve.size(), std::size_t{3}});
            for (std::size_t i = 0; i < curve.size(); ++i) {
                a.mutable_data()[3 * i] = curve[i].coverage;
                a.mutable_data()[3 * i + 1] = curve[i].risk;
                a.mutable_data()[3 * i + 2] = curve[i].theta;
            }
            return a;
        },
        py::arg("confidence"), py::arg("correct"));
    m.def(
        "aurc",
        [](const DoubleArray& confidence, const IntArray& correct) {
            return aurc(risk_coverage_curve(to_vector(confidence), to_flags(correct)));
        },
        py::arg("confidence"), py::arg("correct"));
    m.def(
        "ece",
        [](const DoubleArray& confidence, const IntArray& correct, std::size_t n_bins) {
            return ece(to_vector(confidence), to_flags(correct), n_bins);
        },
        py::arg("confidence"), py::arg("correct"), py::arg("n_bins") = 15);
    m.def(
        "evaluate",
        [](const DoubleArray& scores, const OutcomeVector& outcomes,
           py::object confidence, std::size_t ece_bins) {
            EvaluateOptions opt;
            opt.ece_bins = ece_bins;
            std::vector<double> conf;
            if (!confidence.is_none()) {
                conf = to_vector(confidence.cast<DoubleArray>());
                opt.confidence = &conf;
            }
            return report_to_dict(evaluate(to_scores(scores, "scores"), outcomes, opt));
        },
        py::arg("scores"), py::arg("outcomes"), py::arg("confidence") = py::none(),
        py::arg("ece_bins") = 15);

    // ---- synthetic generators ----
    py::class_<GaussianDist>(m, "Gaussian")
        .def(py::init<double, double>(), py::arg("mu"), py::arg("sigma"));
    py::class_<BetaDist>(m, "Beta").def(py::init<double, double>(), py::arg("a"), py::arg("b"));
    py::class_<PointDist>(m, "Point").def(py::init<double>(), py::arg("v"));
    py::class_<GroupSpec>(m, "GroupSpec")
        .def(py::init([](std::size_t n, const ScoreDist& dist,
                         std::optional<std::pair<double, double>> clip) {
                 GroupSpec g;
                 g.n = n;
                 g.dist = dist;
                 g.clip = clip;
                 return g;
             }),
             py::arg("n"), py::arg("dist"), py::arg("clip") = py::none());
    py::class_<ClusterSpec>(m, "ClusterSpec")
        .def(py::init([](std::size_t n, std::vector<double> center, double spread,
                         std::int64_t class_id) {
                 return ClusterSpec{n, std::move(center), spread, class_id};
             }),
             py::arg("n"), py::arg("center"), py::arg("spread"), py::arg("class_id"));

    py::class_<EvaluationBundle>(m, "EvaluationBundle")
        .def_property_readonly("train_features",
                               [](const EvaluationBundle& b) -> py::object {
                                   if (!b.train_features) return py::none();
                                   return matrix_to_numpy(*b.train_features);
                               })
        .def_property_readonly("test_features",
                               [](const EvaluationBundle& b) {
                                   return matrix_to_numpy(b.test_features);
                               })
        .def_property_readonly("test_logits",
                               [](const EvaluationBundle& b) -> py::object {
                                   if (!b.test_logits) return py::none();
                                   return matrix_to_numpy(*b.test_logits);
                               })
        .def_property_readonly("test_labels",
                               [](const EvaluationBundle& b) {
                                   return labels_to_numpy(b.test_labels);
                               })
        .def_property_readonly("ood_features",
                               [](const EvaluationBundle& b) {
                                   return matrix_to_numpy(b.ood_features);
                               })
        .def_property_readonly("ood_logits",
                               [](const EvaluationBundle& b) -> py::object {
                                   if (!b.ood_logits) return py::none();
                                   return matrix_to_numpy(*b.ood_logits);
                               })
        .def_property_readonly("ood_class_ids", [](const EvaluationBundle& b) -> py::object {
            if (!b.ood_class_ids) return py::none();
            return labels_to_numpy(*b.ood_class_ids);
        });

    m.def(
        "gen_scores",
        [](const GroupSpec& inc, const GroupSpec& inw, const GroupSpec& ood,
           std::uint64_t seed) {
            auto [scores, outcomes] = gen_scores(inc, inw, ood, seed);
            return py::make_tuple(scores_to_numpy(scores), outcomes);
        },
        py::arg("inc"), py::arg("inw"), py::arg("ood"), py::arg("seed") = 0);
    m.def(
        "gen_bundle",
        [](const std::vector<ClusterSpec>& train, const std::vector<ClusterSpec>& test,
           const std::vector<ClusterSpec>& ood, std::uint64_t seed) {
            return gen_bundle(train, test, ood, seed);
        },
        py::arg("train"), py::arg("test"), py::arg("ood"), py::arg("seed") = 0);
    m.def(
        "calibration_scenarios",
        [](std::uint64_t seed) {
            py::list out;
            for (const auto& s : calibration_scenarios(seed)) {
                py::array_t<double> conf(static_cast<py::ssize_t>(s.confidence.size()));
                std::copy(s.confidence.begin(), s.confidence.end(), conf.mutable_data());
                py::array_t<std::uint8_t> correct(static_cast<py::ssize_t>(s.correct.size()));
                std::copy(s.correct.begin(), s.correct.end(), correct.mutable_data());
                out.append(py::make_tuple(s.id, conf, correct));
            }
            return out;
        },
        py::arg("seed") = 0);

    // ---- few-shot protocol ----
    m.def(
        "draw_reference_partition",
        [](const IntArray& class_ids, std::size_t shots, std::uint64_t seed) {
            return draw_reference_partition(to_labels(class_ids), shots, seed);
        },
        py::arg("class_ids"), py::arg("shots"), py::arg("seed") = 0);
    m.def(
        "run_fewshot",
        [](const EvaluationBundle& bundle, std::size_t shots, std::size_t k, double alpha,
           double beta, std::uint64_t seed, const std::string& scorer0, double temperature,
           bool exclude_refs, unsigned threads, std::size_t ece_bins) {
            FewShotResult r = run_fewshot(
                bundle, make_config(shots, k, alpha, beta, seed, scorer0, temperature,
                                    exclude_refs, threads, ece_bins));
            py::dict methods;
            for (const auto& series : r.methods) {
                py::list per_repeat;
                for (const auto& rep : series.per_repeat) per_repeat.append(report_to_dict(rep));
                py::dict entry;
                entry["mean"] = report_to_dict(series.mean);
                entry["per_repeat"] = per_repeat;
                methods[py::str(series.method)] = entry;
            }
            py::dict out;
            out["n_repeats"] = r.n_repeats;
            out["unused_refs"] = r.unused_refs;
            out["draws"] = r.draws;
            out["methods"] = methods;
            return out;
        },
        py::arg("bundle"), py::arg("shots") = 5, py::arg("k") = 5, py::arg("alpha") = 50.0,
        py::arg("beta") = 1.0, py::arg("seed") = 0, py::arg("scorer0") = "msp",
        py::arg("temperature") = 1.0, py::arg("exclude_refs") = true, py::arg("threads") = 1,
        py::arg("ece_bins") = 15);
    m.def(
        "sweep",
        [](const EvaluationBundle& bundle, const std::vector<std::size_t>& ks,
           const std::vector<double>& alphas, const std::vector<double>& betas,
           std::size_t shots, std::uint64_t seed, const std::string& scorer0,
           unsigned threads) {
            auto cells = sweep(bundle,
                               make_config(shots, 5, 50.0, 1.0, seed, scorer0, 1.0, true,
                                           threads, 15),
                               SweepGrid{ks, alphas, betas});
            py::list out;
            for (const auto& c : cells) {
                py::dict d;
                d["k"] = c.k;
                d["alpha"] = c.alpha;
                d["beta"] = c.beta;
                d["mean"] = report_to_dict(c.mean);
                d["mean_lambda"] = c.mean_lambda;
                out.append(d);
            }
            return out;
        },
        py::arg("bundle"), py::arg("ks") = std::vector<std::size_t>{},
        py::arg("alphas") = std::vector<double>{}, py::arg("betas") = std::vector<double>{},
        py::arg("shots") = 5, py::arg("seed") = 0, py::arg("scorer0") = "msp",
        py::arg("threads") = 1);
}
