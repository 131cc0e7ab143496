// End-to-end tests of the uosr binary. The binary path comes from the
// UOSR_CLI environment variable (set by ctest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "uosr/metrics.hpp"
#include "uosr/scorers.hpp"
#include "uosr/tensorio.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

std::string cli_path() {
    const char* p = std::getenv("UOSR_CLI");
    REQUIRE_MESSAGE(p != nullptr, "UOSR_CLI must point at the uosr binary");
    return p;
}

RunResult run(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path = fs::temp_directory_path() / ("uosr_cli_" + std::to_string(counter.fetch_add(1)));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes a small bundle via the synth subcommand; returns the common flags.
std::string make_bundle(const TempDir& dir, const char* prefix) {
    std::string spec = dir.file("spec.json");
    write_text(spec, R"({"kind":"bundle","seed":5,
        "train":[{"n":60,"center":[6,0,0,0],"spread":0.3,"class_id":0},
                 {"n":60,"center":[0,6,0,0],"spread":0.3,"class_id":1}],
        "test":[{"n":80,"center":[6,0,0,0],"spread":0.3,"class_id":0},
                {"n":80,"center":[0,6,0,0],"spread":0.3,"class_id":1},
                {"n":30,"center":[2.8,3.2,0,0],"spread":0.25,"class_id":0}],
        "ood":[{"n":10,"center":[0,4.8,4.5,0],"spread":0.3,"class_id":100},
               {"n":10,"center":[0,4.8,0,4.5],"spread":0.3,"class_id":101}]})");
    std::string out_prefix = dir.file(prefix);
    RunResult r = run("synth --spec " + spec + " --out " + out_prefix);
    REQUIRE(r.exit_code == 0);
    return " --train-feats " + out_prefix + "_train_feats.bin" +
           " --test-feats " + out_prefix + "_test_feats.bin" +
           " --test-logits " + out_prefix + "_test_logits.bin" +
           " --test-labels " + out_prefix + "_test_labels.bin" +
           " --ood-feats " + out_prefix + "_ood_feats.bin" +
           " --ood-logits " + out_prefix + "_ood_logits.bin" +
           " --ood-class-ids " + out_prefix + "_ood_class_ids.bin";
}

}  // namespace

TEST_CASE("ingest: csv to binary round-trips") {
    TempDir dir;
    write_text(dir.file("m.csv"), "0.5,0.5\n1.0,0.0\n");
    write_text(dir.file("l.csv"), "1\n0\n");
    RunResult r = run("ingest --matrix " + dir.file("m.csv") + " " + dir.file("m.bin") +
                      " --labels " + dir.file("l.csv") + " " + dir.file("l.bin"));
    CHECK(r.exit_code == 0);
    auto m = uosr::load_matrix(dir.file("m.bin"), uosr::FileFormat::binary);
    CHECK(m.data == std::vector<double>{0.5, 0.5, 1.0, 0.0});
    auto l = uosr::load_labels(dir.file("l.bin"), uosr::FileFormat::binary);
    CHECK(l == uosr::LabelVector{1, 0});

    SUBCASE("idempotent") {
        RunResult again = run("ingest --matrix " + dir.file("m.csv") + " " + dir.file("m2.bin"));
        CHECK(again.exit_code == 0);
        CHECK(slurp(dir.file("m.bin")) == slurp(dir.file("m2.bin")));
    }
}

TEST_CASE("ingest error paths") {
    TempDir dir;
    SUBCASE("missing input file exits 1 and names the path") {
        RunResult r = run("ingest --matrix " + dir.file("absent.csv") + " " + dir.file("x.bin"));
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("absent.csv") != std::string::npos);
    }
    SUBCASE("ragged csv exits 2 and reports the line") {
        write_text(dir.file("bad.csv"), "1,2\n3\n");
        RunResult r = run("ingest --matrix " + dir.file("bad.csv") + " " + dir.file("x.bin"));
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("line 2") != std::string::npos);
    }
}

TEST_CASE("eval pipeline") {
    TempDir dir;
    std::string flags = make_bundle(dir, "b");

    SUBCASE("markdown report has the seven columns") {
        RunResult r = run("eval" + flags + " --scorer msp --format markdown --out " +
                          dir.file("report.md"));
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("Acc. ") != std::string::npos);
        std::string report = slurp(dir.file("report.md"));
        CHECK(report.find("| Acc. | AURC | UOSR | OSR | InC/InW | InC/OoD | InW/OoD |") !=
              std::string::npos);
    }
    SUBCASE("json report is written atomically and parses") {
        RunResult r = run("eval" + flags + " --scorer entropy --out " + dir.file("report.json"));
        CHECK(r.exit_code == 0);
        std::string body = slurp(dir.file("report.json"));
        CHECK(body.find("\"scorer\": \"entropy\"") != std::string::npos);
        CHECK_FALSE(fs::exists(dir.file("report.json.tmp")));
    }
    SUBCASE("deterministic stdout") {
        RunResult a = run("eval" + flags + " --scorer msp");
        RunResult b = run("eval" + flags + " --scorer msp");
        CHECK(a.output == b.output);
    }
    SUBCASE("knn scorer output is identical at any thread count") {
        RunResult one = run("eval" + flags + " --scorer knn --k 3 --threads 1 --out " +
                            dir.file("t1.json"));
        RunResult four = run("eval" + flags + " --scorer knn --k 3 --threads 4 --out " +
                             dir.file("t4.json"));
        CHECK(one.exit_code == 0);
        CHECK(four.exit_code == 0);
        CHECK(slurp(dir.file("t1.json")) == slurp(dir.file("t4.json")));
        CHECK(one.output == four.output);
    }
    SUBCASE("report matches the in-process pipeline on the same files") {
        RunResult r = run("eval" + flags + " --scorer msp --out " + dir.file("cli.json"));
        CHECK(r.exit_code == 0);

        auto load = [&](const char* suffix) {
            return uosr::load_matrix(dir.file(("b_" + std::string(suffix)).c_str()),
                                     uosr::FileFormat::binary);
        };
        uosr::FeatureMatrix logits = uosr::vstack(load("test_logits.bin"),
                                                  load("ood_logits.bin"));
        auto labels = uosr::load_labels(dir.file("b_test_labels.bin"),
                                        uosr::FileFormat::binary);
        auto preds = uosr::predictions_from_logits(load("test_logits.bin"));
        auto outcomes = uosr::classify_outcomes(preds, labels, load("ood_feats.bin").rows);
        auto scores = uosr::msp_score(logits);
        std::vector<double> confidence;
        for (double u : scores.scores) confidence.push_back(1.0 - u);
        uosr::EvaluateOptions opt;
        opt.confidence = &confidence;
        auto report = uosr::evaluate(scores, outcomes, opt);

        std::string body = slurp(dir.file("cli.json"));
        CHECK(body == uosr::report_to_json(report) + "\n");
    }
    SUBCASE("knn scorer without train features exits 2") {
        std::string no_train = flags;
        auto pos = no_train.find("--train-feats");
        auto end = no_train.find(" --test-feats");
        no_train.erase(pos, end - pos);
        RunResult r = run("eval " + no_train + " --scorer knn");
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("train features") != std::string::npos);
    }
    SUBCASE("config file provides defaults and flags win") {
        write_text(dir.file("cfg.json"), "{\"scorer\": \"msp\", \"temperature\": 2.0}");
        RunResult from_cfg = run("eval" + flags + " --config " + dir.file("cfg.json"));
        CHECK(from_cfg.exit_code == 0);
        RunResult overridden =
            run("eval" + flags + " --config " + dir.file("cfg.json") + " --scorer maxlogit");
        CHECK(overridden.exit_code == 0);
        CHECK(from_cfg.output != overridden.output);
    }
}

TEST_CASE("fewshot outputs") {
    TempDir dir;
    std::string flags = make_bundle(dir, "b");

    SUBCASE("same config twice gives byte-identical files") {
        RunResult a = run("fewshot" + flags + " --shots 5 --seed 9 --out " + dir.file("a.json"));
        RunResult b = run("fewshot" + flags + " --shots 5 --seed 9 --out " + dir.file("b.json"));
        CHECK(a.exit_code == 0);
        CHECK(b.exit_code == 0);
        CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));
    }
    SUBCASE("shots larger than the smallest class exits 2") {
        RunResult r = run("fewshot" + flags + " --shots 11");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("row filter restricts the table") {
        RunResult r = run("fewshot" + flags +
                          " --shots 5 --format csv --rows fsknns --out " + dir.file("t.csv"));
        CHECK(r.exit_code == 0);
        std::string table = slurp(dir.file("t.csv"));
        CHECK(table.find("fsknns") != std::string::npos);
        CHECK(table.find("knn,") == std::string::npos);
    }
}

TEST_CASE("sweep grid export") {
    TempDir dir;
    std::string flags = make_bundle(dir, "b");
    RunResult r = run("sweep" + flags + " --ks 3,5 --betas 0,1 --format csv --shots 5 --out " +
                      dir.file("grid.csv"));
    CHECK(r.exit_code == 0);
    std::string grid = slurp(dir.file("grid.csv"));
    CHECK(grid.rfind("k,alpha,beta,", 0) == 0);
    CHECK(std::count(grid.begin(), grid.end(), '\n') == 5);  // header + 4 cells
}

TEST_CASE("hist emits per-group counts over the pooled range") {
    TempDir dir;
    std::string flags = make_bundle(dir, "b");
    RunResult r = run("hist" + flags + " --scorer msp --bins 1 --out " + dir.file("h.csv"));
    CHECK(r.exit_code == 0);
    std::string csv = slurp(dir.file("h.csv"));
    // bins=1: one data line holding the full group sizes.
    CHECK(csv.rfind("bin_lo,bin_hi,inc,inw,ood\n", 0) == 0);
    auto line = csv.substr(csv.find('\n') + 1);
    CHECK(line.find(",20\n") != std::string::npos);  // all 20 OoD samples in the bin
}

TEST_CASE("synth calibration scenarios") {
    TempDir dir;
    RunResult r = run("synth --calibration-scenarios --seed 2 --out " + dir.file("cal"));
    CHECK(r.exit_code == 0);
    int n_conf = 0;
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        auto name = entry.path().filename().string();
        if (name.find("_confidence.bin") != std::string::npos) ++n_conf;
    }
    CHECK(n_conf == 5);
    CHECK(fs::exists(dir.file("cal_manifest.json")));

    SUBCASE("same seed, identical files") {
        RunResult again = run("synth --calibration-scenarios --seed 2 --out " + dir.file("cal2"));
        CHECK(again.exit_code == 0);
        CHECK(slurp(dir.file("cal_a_confidence.bin")) ==
              slurp(dir.file("cal2_a_confidence.bin")));
    }
}

TEST_CASE("synth bad spec exits 2") {
    TempDir dir;
    write_text(dir.file("bad.json"), "{\"kind\":\"nope\"}");
    RunResult r = run("synth --spec " + dir.file("bad.json") + " --out " + dir.file("x"));
    CHECK(r.exit_code == 2);
}
