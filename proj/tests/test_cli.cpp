// End-to-end checks of the installed command-line interface. Each case gets
// its own scratch directory and drives the real binary through the shell.
#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class Scratch {
  public:
    Scratch() {
        static int counter = 0;
        dir_ = fs::temp_directory_path() /
               ("apgp_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }
    const fs::path& dir() const { return dir_; }
    fs::path operator/(const std::string& leaf) const { return dir_ / leaf; }

  private:
    fs::path dir_;
};

RunResult run_cli(const Scratch& scratch, const std::string& args) {
    const fs::path out_file = scratch / "stdout.txt";
    const fs::path err_file = scratch / "stderr.txt";
    const std::string command = std::string("'") + APGP_CLI_PATH + "' " + args + " > '" +
                                out_file.string() + "' 2> '" + err_file.string() + "'";
    const int status = std::system(command.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

const char* tiny_sweep_config = R"({
  "dataset": {"L": 20, "N": 300, "test_size": 80, "min_class_support": 5, "seed": 11},
  "sweep": {"per_class_sizes": [1, 2], "repetitions": 2}
})";

}  // namespace

TEST_CASE("fold folds a literal sequence") {
    Scratch scratch;
    const RunResult r = run_cli(scratch, "fold GGGAAAACCC");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("sequence\tstructure\tshape\n", 0) == 0);
    CHECK(r.out.find("GGGAAAACCC\t(((....)))\t[]") != std::string::npos);
}

TEST_CASE("fold reads a file of sequences") {
    Scratch scratch;
    write_file(scratch / "seqs.txt", "GGGAAAACCC\nAAAA\n");
    const RunResult r = run_cli(scratch, "fold '" + (scratch / "seqs.txt").string() + "'");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("GGGAAAACCC\t(((....)))\t[]") != std::string::npos);
    CHECK(r.out.find("AAAA\t....\t_") != std::string::npos);
}

TEST_CASE("fold rejects junk sequences") {
    Scratch scratch;
    const RunResult r = run_cli(scratch, "fold GGXXCC");
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("error: invalid-sequence:", 0) == 0);
}

TEST_CASE("generate writes a dataset with the pinned header") {
    Scratch scratch;
    write_file(scratch / "cfg.json",
               R"({"dataset": {"L": 15, "N": 50, "test_size": 10, "min_class_support": 2, "seed": 3}})");
    const RunResult r = run_cli(scratch, "generate --config '" + (scratch / "cfg.json").string() +
                                             "' --out '" + (scratch / "out").string() + "'");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("N=50") != std::string::npos);
    CHECK(r.out.find("L=15") != std::string::npos);
    const std::string dataset = slurp(scratch / "out" / "dataset.csv");
    CHECK(dataset.rfind("sequence,structure,shape\n", 0) == 0);
    // header + 50 rows
    std::size_t lines = 0;
    for (const char c : dataset)
        if (c == '\n') ++lines;
    CHECK(lines == 51);
}

TEST_CASE("seed override changes the generated data") {
    Scratch scratch;
    write_file(scratch / "cfg.json",
               R"({"dataset": {"L": 15, "N": 30, "test_size": 5, "min_class_support": 2, "seed": 3}})");
    const std::string base = " --config '" + (scratch / "cfg.json").string() + "'";
    REQUIRE(run_cli(scratch, "generate" + base + " --out '" + (scratch / "a").string() + "'")
                .exit_code == 0);
    REQUIRE(run_cli(scratch, "generate" + base + " --out '" + (scratch / "b").string() +
                                 "' --seed 99")
                .exit_code == 0);
    REQUIRE(run_cli(scratch, "generate" + base + " --out '" + (scratch / "c").string() + "'")
                .exit_code == 0);
    const std::string a = slurp(scratch / "a" / "dataset.csv");
    CHECK(a != slurp(scratch / "b" / "dataset.csv"));
    CHECK(a == slurp(scratch / "c" / "dataset.csv"));
}

TEST_CASE("prior consumes a generated dataset") {
    Scratch scratch;
    write_file(scratch / "cfg.json",
               R"({"dataset": {"L": 20, "N": 300, "test_size": 50, "min_class_support": 5, "seed": 7}})");
    const std::string base = " --config '" + (scratch / "cfg.json").string() + "'";
    REQUIRE(run_cli(scratch, "generate" + base + " --out '" + (scratch / "out").string() + "'")
                .exit_code == 0);
    const RunResult r =
        run_cli(scratch, "prior '" + (scratch / "out" / "dataset.csv").string() + "'" + base +
                             " --out '" + (scratch / "out").string() + "'");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("classes=", 0) == 0);
    CHECK(r.out.find("sum_p_hat=") != std::string::npos);
    CHECK(r.out.find("pearson_log=") != std::string::npos);
    CHECK(slurp(scratch / "out" / "prior.csv").rfind("shape,k_raw,k_scaled,p_hat\n", 0) == 0);
    CHECK(slurp(scratch / "out" / "catalog.csv").rfind("shape,count,p_true\n", 0) == 0);
}

TEST_CASE("prior rejects a tampered dataset") {
    Scratch scratch;
    write_file(scratch / "bad.csv",
               "sequence,structure,shape\n"
               "GGGAAAACCC,(((....))),[][]\n");
    const RunResult r = run_cli(scratch, "prior '" + (scratch / "bad.csv").string() + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("error: ingest-inconsistent:", 0) == 0);
    CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("sweep refuses to clobber unless forced") {
    Scratch scratch;
    write_file(scratch / "cfg.json", tiny_sweep_config);
    const std::string base = " --config '" + (scratch / "cfg.json").string() + "' --out '" +
                             (scratch / "out").string() + "' --workers 2";
    const RunResult first = run_cli(scratch, "sweep" + base);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out.rfind("sweep ", 0) == 0);
    CHECK(first.out.find("cells=8") != std::string::npos);

    const std::string results = slurp(scratch / "out" / "results.csv");
    CHECK(results.rfind("n_train,prior_mode,repetition,accuracy,balanced_accuracy,pearson_r,seed\n",
                        0) == 0);
    CHECK(slurp(scratch / "out" / "summary.tsv")
              .rfind("n_per_class\tprior_mode\tn_train\tmean_accuracy\tmean_balanced_accuracy\n",
                     0) == 0);
    CHECK(fs::exists(scratch / "out" / "catalog.csv"));
    CHECK(fs::exists(scratch / "out" / "confusion" / "confusion_s1_r0_zero.csv"));
    CHECK(fs::exists(scratch / "out" / "confusion" / "confusion_s2_r1_ap_prior.csv"));

    const RunResult second = run_cli(scratch, "sweep" + base);
    CHECK(second.exit_code == 1);
    CHECK(second.err.rfind("error: config:", 0) == 0);
    CHECK(second.err.find("--force") != std::string::npos);

    const RunResult forced = run_cli(scratch, "sweep" + base + " --force");
    CHECK(forced.exit_code == 0);
    CHECK(slurp(scratch / "out" / "results.csv") == results);
}

TEST_CASE("report summarizes a results table") {
    Scratch scratch;
    write_file(scratch / "cfg.json", tiny_sweep_config);
    const std::string cfg = " --config '" + (scratch / "cfg.json").string() + "'";
    REQUIRE(run_cli(scratch, "sweep" + cfg + " --out '" + (scratch / "out").string() +
                                 "' --workers 2")
                .exit_code == 0);
    const RunResult r =
        run_cli(scratch, "report '" + (scratch / "out" / "results.csv").string() + "' --out '" +
                             (scratch / "rep").string() + "'");
    REQUIRE(r.exit_code == 0);
    const std::string table = slurp(scratch / "rep" / "accuracy_vs_size.tsv");
    CHECK(table.rfind("prior_mode\tn_train\tmean_accuracy\tmean_balanced_accuracy\trepetitions\n",
                      0) == 0);
    CHECK(table.find("ap_prior\t") != std::string::npos);
    CHECK(table.find("zero\t") != std::string::npos);
    CHECK_FALSE(fs::exists(scratch / "rep" / "correlation.tsv"));
}

TEST_CASE("report joins prior and catalog into a correlation table") {
    Scratch scratch;
    write_file(scratch / "cfg.json", tiny_sweep_config);
    const std::string cfg = " --config '" + (scratch / "cfg.json").string() + "'";
    const std::string out = (scratch / "out").string();
    const std::string data = (scratch / "data").string();
    REQUIRE(run_cli(scratch, "sweep" + cfg + " --out '" + out + "' --workers 2").exit_code == 0);
    REQUIRE(run_cli(scratch, "generate" + cfg + " --out '" + data + "'").exit_code == 0);
    REQUIRE(run_cli(scratch, "prior '" + data + "/dataset.csv'" + cfg + " --out '" + data + "'")
                .exit_code == 0);

    const RunResult r = run_cli(
        scratch, "report '" + out + "/results.csv' --prior '" + data + "/prior.csv' --catalog '" +
                     data + "/catalog.csv' --out '" + (scratch / "rep").string() + "'");
    REQUIRE(r.exit_code == 0);
    const std::string corr = slurp(scratch / "rep" / "correlation.tsv");
    CHECK(corr.rfind("shape\tlog10_p_hat\tlog10_p_true\n", 0) == 0);

    const RunResult lonely =
        run_cli(scratch, "report '" + out + "/results.csv' --prior '" + out +
                             "/prior.csv' --out '" + (scratch / "rep2").string() + "'");
    CHECK(lonely.exit_code == 1);
    CHECK(lonely.err.rfind("error: config:", 0) == 0);
}

TEST_CASE("unknown config keys are fatal") {
    Scratch scratch;
    write_file(scratch / "cfg.json", R"({"dataset": {"length": 20}})");
    const RunResult r =
        run_cli(scratch, "generate --config '" + (scratch / "cfg.json").string() + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("error: config:", 0) == 0);
    CHECK(r.err.find("'length'") != std::string::npos);
}

TEST_CASE("malformed config json is fatal") {
    Scratch scratch;
    write_file(scratch / "cfg.json", "{not json");
    const RunResult r =
        run_cli(scratch, "generate --config '" + (scratch / "cfg.json").string() + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("error: config:", 0) == 0);
}

TEST_CASE("missing subcommand is a usage error") {
    Scratch scratch;
    const RunResult r = run_cli(scratch, "");
    CHECK(r.exit_code != 0);
}
