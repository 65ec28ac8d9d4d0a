// apgp: build complexity-based class priors for RNA abstract shapes and
// evaluate them as Gaussian-process mean functions.
//
// Subcommands: generate, fold, prior, sweep, report. A JSON config file
// carries everything a sweep needs; --seed/--out/--workers override the
// matching scalar fields. Every run is fully determined by its config.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "apgp/apgp.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    apgp::DatasetConfig dataset;
    apgp::SweepConfig sweep;
    std::string out = "out";
    std::size_t workers = 0;  // 0 = hardware concurrency
};

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw apgp::ConfigError("unknown key '" + it.key() + "' in " + where + " section");
    }
}

void load_dataset_section(const json& j, apgp::DatasetConfig& cfg) {
    check_keys(j, {"L", "N", "test_size", "min_class_support", "seed", "min_loop", "ingest"},
               "dataset");
    if (j.contains("L")) cfg.L = j.at("L").get<int>();
    if (j.contains("N")) cfg.N = j.at("N").get<std::size_t>();
    if (j.contains("test_size")) cfg.test_size = j.at("test_size").get<std::size_t>();
    if (j.contains("min_class_support"))
        cfg.min_class_support = j.at("min_class_support").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("min_loop")) cfg.min_loop = j.at("min_loop").get<int>();
    if (j.contains("ingest") && !j.at("ingest").is_null())
        cfg.ingest_path = j.at("ingest").get<std::string>();
}

void load_prior_section(const json& j, apgp::PriorConfig& cfg) {
    check_keys(j, {"a", "b", "alpha", "m_log2", "smoothing"}, "prior");
    if (j.contains("a")) cfg.a = j.at("a").get<double>();
    if (j.contains("b")) cfg.b = j.at("b").get<double>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("m_log2") && !j.at("m_log2").is_null())
        cfg.m_log2 = j.at("m_log2").get<double>();
    if (j.contains("smoothing")) cfg.smoothing = j.at("smoothing").get<bool>();
}

void load_gp_section(const json& j, apgp::GpFitConfig& cfg) {
    check_keys(j,
               {"ell_lower_factor", "ell_upper_factor", "noise_lower", "noise_upper",
                "noise_init", "grid_points", "seeded_restarts", "restart_seed"},
               "gp");
    if (j.contains("ell_lower_factor")) cfg.ell_lower_factor = j.at("ell_lower_factor").get<double>();
    if (j.contains("ell_upper_factor")) cfg.ell_upper_factor = j.at("ell_upper_factor").get<double>();
    if (j.contains("noise_lower")) cfg.noise_lower = j.at("noise_lower").get<double>();
    if (j.contains("noise_upper")) cfg.noise_upper = j.at("noise_upper").get<double>();
    if (j.contains("noise_init")) cfg.noise_init = j.at("noise_init").get<double>();
    if (j.contains("grid_points")) cfg.grid_points = j.at("grid_points").get<int>();
    if (j.contains("seeded_restarts")) cfg.seeded_restarts = j.at("seeded_restarts").get<int>();
    if (j.contains("restart_seed")) cfg.restart_seed = j.at("restart_seed").get<std::uint64_t>();
}

void load_sweep_section(const json& j, apgp::SweepConfig& cfg) {
    check_keys(j, {"per_class_sizes", "repetitions", "prior_modes"}, "sweep");
    if (j.contains("per_class_sizes"))
        cfg.per_class_sizes = j.at("per_class_sizes").get<std::vector<std::size_t>>();
    if (j.contains("repetitions")) cfg.repetitions = j.at("repetitions").get<std::size_t>();
    if (j.contains("prior_modes")) {
        cfg.prior_modes.clear();
        for (const std::string name : j.at("prior_modes").get<std::vector<std::string>>())
            cfg.prior_modes.push_back(apgp::parse_prior_mode(name));
    }
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw apgp::IoError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
        check_keys(j, {"dataset", "sweep", "prior", "gp", "out", "workers"}, "top-level");
        if (j.contains("dataset")) load_dataset_section(j.at("dataset"), cfg.dataset);
        if (j.contains("sweep")) load_sweep_section(j.at("sweep"), cfg.sweep);
        if (j.contains("prior")) load_prior_section(j.at("prior"), cfg.sweep.prior);
        if (j.contains("gp")) load_gp_section(j.at("gp"), cfg.sweep.gp);
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
    } catch (const json::exception& e) {
        throw apgp::ConfigError("config file " + path + ": " + e.what());
    }
    return cfg;
}

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw apgp::IoError("cannot write " + path.string());
    return out;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

int cmd_generate(const RunConfig& cfg) {
    const std::vector<apgp::DatasetRecord> records =
        apgp::generate_dataset(cfg.dataset, resolve_workers(cfg.workers));
    fs::create_directories(cfg.out);
    const fs::path path = fs::path(cfg.out) / "dataset.csv";
    {
        std::ofstream out = open_output(path);
        apgp::write_dataset(out, records);
    }
    std::size_t classes = 0;
    try {
        classes = apgp::define_classes(records, cfg.dataset.min_class_support).first.size();
    } catch (const apgp::NoClasses&) {
        // classes stays 0: every shape fell below the support threshold
    }
    std::cout << "dataset " << path.string() << " N=" << records.size()
              << " L=" << records.front().sequence.size() << " classes=" << classes << '\n';
    return 0;
}

int cmd_fold(const std::string& input, int min_loop) {
    std::vector<std::string> letters;
    if (fs::exists(input)) {
        std::ifstream in(input);
        if (!in) throw apgp::IoError("cannot open sequence file " + input);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) letters.push_back(line);
        }
        if (letters.empty()) throw apgp::IoError("sequence file " + input + " is empty");
    } else {
        letters.push_back(input);
    }
    std::cout << "sequence\tstructure\tshape\n";
    for (const std::string& raw : letters) {
        const apgp::NucleotideSequence seq(raw);
        const apgp::DotBracketStructure structure = apgp::fold_surrogate(seq, min_loop);
        const apgp::AbstractShape shape = apgp::abstract_shape(apgp::parse_dotbracket(structure));
        std::cout << seq.str() << '\t' << structure.str() << '\t' << shape.str() << '\n';
    }
    return 0;
}

int cmd_prior(const RunConfig& cfg, const std::string& dataset_path) {
    const std::vector<apgp::DatasetRecord> records = apgp::ingest_dataset(dataset_path);
    if (records.empty()) throw apgp::IoError("dataset " + dataset_path + " has no rows");
    const auto [catalog, filtered] =
        apgp::define_classes(records, cfg.dataset.min_class_support);
    const apgp::PriorVector prior = apgp::build_prior(catalog, cfg.sweep.prior);

    fs::create_directories(cfg.out);
    {
        std::ofstream out = open_output(fs::path(cfg.out) / "prior.csv");
        apgp::write_prior_csv(out, catalog, prior);
    }
    {
        std::ofstream out = open_output(fs::path(cfg.out) / "catalog.csv");
        apgp::write_catalog_csv(out, catalog);
    }

    double r = std::numeric_limits<double>::quiet_NaN();
    try {
        r = apgp::pearson_log(prior.p_hat, catalog.p_true);
    } catch (const apgp::CorrelationUndefined&) {
        // reported as nan
    }
    std::cout.precision(17);
    std::cout << "classes=" << catalog.size() << " sum_p_hat=" << prior.sum_total
              << " pearson_log=" << r << '\n';
    return 0;
}

int cmd_sweep(const RunConfig& cfg, bool force) {
    const fs::path out_dir(cfg.out);
    if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force)
        throw apgp::ConfigError("output directory " + out_dir.string() +
                                " is not empty (pass --force to overwrite)");
    fs::create_directories(out_dir);

    const apgp::SweepResult result =
        apgp::sweep(cfg.dataset, cfg.sweep, resolve_workers(cfg.workers));

    {
        std::ofstream out = open_output(out_dir / "results.csv");
        apgp::write_results_csv(out, result);
    }
    {
        std::ofstream out = open_output(out_dir / "summary.tsv");
        apgp::write_summary_tsv(out, result);
    }
    {
        std::ofstream out = open_output(out_dir / "catalog.csv");
        apgp::write_catalog_csv(out, result.catalog);
    }
    fs::create_directories(out_dir / "confusion");
    for (const apgp::CellResult& cell : result.cells) {
        std::ostringstream name;
        name << "confusion_s" << cell.n_per_class << "_r" << cell.metrics.repetition << '_'
             << apgp::to_string(cell.metrics.prior_mode) << ".csv";
        std::ofstream out = open_output(out_dir / "confusion" / name.str());
        apgp::write_confusion_csv(out, cell.metrics.confusion);
    }
    std::cout << "sweep " << out_dir.string() << " cells=" << result.cells.size()
              << " classes=" << result.catalog.size() << " test_size=" << result.test_size
              << '\n';
    return 0;
}

struct ResultRow {
    std::size_t n_train = 0;
    std::string prior_mode;
    double accuracy = 0.0;
    double balanced_accuracy = 0.0;
};

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw apgp::IoError("cannot open results file " + path);
    std::string line;
    if (!std::getline(in, line)) throw apgp::IoError("results file " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expected = "n_train,prior_mode,repetition,accuracy,balanced_accuracy,pearson_r,seed";
    if (line != expected)
        throw apgp::IoError("results file " + path + ": unexpected header '" + line + "'");
    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split_fields(line, ',');
        if (f.size() != 7)
            throw apgp::IoError("results file " + path + " line " + std::to_string(lineno) +
                                ": expected 7 fields");
        try {
            rows.push_back(ResultRow{std::stoull(f[0]), f[1], std::stod(f[3]), std::stod(f[4])});
        } catch (const std::exception&) {
            throw apgp::IoError("results file " + path + " line " + std::to_string(lineno) +
                                ": malformed numeric field");
        }
    }
    if (rows.empty()) throw apgp::IoError("results file " + path + " has no data rows");
    return rows;
}

// Plot-ready tables: accuracy against training-set size per prior mode, and
// (when a prior and catalog are supplied) the log-log correlation scatter.
int cmd_report(const RunConfig& cfg, const std::string& results_path,
               const std::string& prior_path, const std::string& catalog_path) {
    const std::vector<ResultRow> rows = read_results_csv(results_path);
    fs::create_directories(cfg.out);

    std::map<std::pair<std::string, std::size_t>, std::pair<std::size_t, std::pair<double, double>>>
        groups;  // (mode, n_train) -> (reps, (sum acc, sum balanced))
    for (const ResultRow& r : rows) {
        auto& g = groups[{r.prior_mode, r.n_train}];
        g.first += 1;
        g.second.first += r.accuracy;
        g.second.second += r.balanced_accuracy;
    }
    {
        std::ofstream out = open_output(fs::path(cfg.out) / "accuracy_vs_size.tsv");
        out << "prior_mode\tn_train\tmean_accuracy\tmean_balanced_accuracy\trepetitions\n";
        out.precision(17);
        for (const auto& [key, g] : groups) {
            const double reps = static_cast<double>(g.first);
            out << key.first << '\t' << key.second << '\t' << g.second.first / reps << '\t'
                << g.second.second / reps << '\t' << g.first << '\n';
        }
    }

    if (!prior_path.empty() || !catalog_path.empty()) {
        if (prior_path.empty() || catalog_path.empty())
            throw apgp::ConfigError("report: --prior and --catalog must be given together");
        std::map<std::string, double> p_hat;
        {
            std::ifstream in(prior_path);
            if (!in) throw apgp::IoError("cannot open prior file " + prior_path);
            std::string line;
            if (!std::getline(in, line) || split_fields(line, ',').front() != "shape")
                throw apgp::IoError("prior file " + prior_path + ": unexpected header");
            while (std::getline(in, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty()) continue;
                const std::vector<std::string> f = split_fields(line, ',');
                if (f.size() != 4) throw apgp::IoError("prior file " + prior_path + ": bad row");
                p_hat[f[0]] = std::stod(f[3]);
            }
        }
        std::ofstream out = open_output(fs::path(cfg.out) / "correlation.tsv");
        out << "shape\tlog10_p_hat\tlog10_p_true\n";
        out.precision(17);
        std::ifstream in(catalog_path);
        if (!in) throw apgp::IoError("cannot open catalog file " + catalog_path);
        std::string line;
        if (!std::getline(in, line) || split_fields(line, ',').front() != "shape")
            throw apgp::IoError("catalog file " + catalog_path + ": unexpected header");
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const std::vector<std::string> f = split_fields(line, ',');
            if (f.size() != 3) throw apgp::IoError("catalog file " + catalog_path + ": bad row");
            const auto it = p_hat.find(f[0]);
            if (it == p_hat.end())
                throw apgp::IoError("catalog shape '" + f[0] + "' missing from prior file");
            out << f[0] << '\t' << std::log10(it->second) << '\t' << std::log10(std::stod(f[2]))
                << '\n';
        }
    }
    std::cout << "report " << cfg.out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complexity-derived class priors for GP shape classification"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed_override = 0;
    std::string out_override;
    std::size_t workers_override = 0;
    bool force = false;
    app.add_option("--config", config_path, "JSON configuration file");
    CLI::Option* seed_opt = app.add_option("--seed", seed_override, "Override dataset seed");
    CLI::Option* out_opt = app.add_option("--out", out_override, "Output directory");
    CLI::Option* workers_opt =
        app.add_option("--workers", workers_override, "Worker threads (default: all cores)");
    app.add_flag("--force", force, "Allow writing into a non-empty sweep output directory");

    CLI::App* generate = app.add_subcommand("generate", "Generate (or re-validate) a dataset file");
    CLI::App* fold = app.add_subcommand("fold", "Fold sequences and print structures + shapes");
    std::string fold_input;
    int fold_min_loop = 3;
    fold->add_option("input", fold_input, "Sequence literal or file of sequences")->required();
    fold->add_option("--min-loop", fold_min_loop, "Minimum hairpin loop length");
    CLI::App* prior = app.add_subcommand("prior", "Build the complexity prior for a dataset");
    std::string prior_dataset;
    prior->add_option("dataset", prior_dataset, "Dataset CSV file")->required();
    CLI::App* sweep = app.add_subcommand("sweep", "Run the training-size sweep");
    CLI::App* report = app.add_subcommand("report", "Produce plot-ready TSV tables");
    std::string report_results, report_prior, report_catalog;
    report->add_option("results", report_results, "results.csv from a sweep")->required();
    report->add_option("--prior", report_prior, "prior.csv for the correlation table");
    report->add_option("--catalog", report_catalog, "catalog.csv for the correlation table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (*seed_opt) cfg.dataset.seed = seed_override;
        if (*out_opt) cfg.out = out_override;
        if (*workers_opt) cfg.workers = workers_override;

        if (*generate) return cmd_generate(cfg);
        if (*fold) return cmd_fold(fold_input, fold_min_loop);
        if (*prior) return cmd_prior(cfg, prior_dataset);
        if (*sweep) return cmd_sweep(cfg, force);
        if (*report) return cmd_report(cfg, report_results, report_prior, report_catalog);
        return 1;
    } catch (const apgp::Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
}
