#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "apgp/catalog.hpp"
#include "apgp/errors.hpp"
#include "apgp/gp.hpp"
#include "apgp/prior.hpp"
#include "apgp/rna.hpp"
#include "apgp/rng.hpp"

namespace apgp {

enum class PriorMode { zero, ap_prior };

inline const char* to_string(PriorMode m) noexcept {
    return m == PriorMode::zero ? "zero" : "ap_prior";
}

inline PriorMode parse_prior_mode(const std::string& s) {
    if (s == "zero") return PriorMode::zero;
    if (s == "ap_prior") return PriorMode::ap_prior;
    throw ConfigError("unknown prior mode '" + s + "' (expected zero|ap_prior)");
}

// Dataset source: either N random sequences of length L folded by the
// surrogate, or an externally folded file.
struct DatasetConfig {
    int L = 100;
    std::size_t N = 10000;
    std::size_t test_size = 1000;
    std::size_t min_class_support = 10;
    std::uint64_t seed = 0;
    int min_loop = 3;
    std::optional<std::string> ingest_path;  // set = ingest mode

    void validate() const {
        if (L < 1) throw ConfigError("dataset: L must be >= 1");
        if (N < 2) throw ConfigError("dataset: N must be >= 2");
        if (test_size < 1 || test_size >= N)
            throw ConfigError("dataset: test_size must be in [1, N)");
        if (min_class_support < 1) throw ConfigError("dataset: min_class_support must be >= 1");
        if (min_loop < 0) throw ConfigError("dataset: min_loop must be >= 0");
    }
};

namespace detail {

// Index-sliced worker pool; task i writes only its own slot, so results are
// identical for any worker count.
template <typename Fn>
void run_parallel(std::size_t n_tasks, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = 1;
    workers = std::min(workers, n_tasks);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_tasks) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// N i.i.d. uniform sequences folded and abstracted, fully determined by the
// seed. In ingest mode the file contents stand in for generation.
inline std::vector<DatasetRecord> generate_dataset(const DatasetConfig& cfg,
                                                   std::size_t workers = 1) {
    cfg.validate();
    if (cfg.ingest_path) {
        std::vector<DatasetRecord> records = ingest_dataset(*cfg.ingest_path);
        if (records.empty()) throw IoError("ingested dataset has no rows");
        for (const DatasetRecord& r : records)
            if (r.sequence.size() != records.front().sequence.size())
                throw IoError("ingested dataset mixes sequence lengths");
        return records;
    }

    static constexpr char letters[4] = {'A', 'U', 'C', 'G'};
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::string> raw(cfg.N);
    for (std::string& s : raw) {
        s.resize(static_cast<std::size_t>(cfg.L));
        for (char& c : s) c = letters[rng() & 3];  // 2^64 % 4 == 0: unbiased
    }

    std::vector<std::optional<DatasetRecord>> slots(cfg.N);
    detail::run_parallel(cfg.N, workers, [&](std::size_t i) {
        NucleotideSequence seq(raw[i]);
        DotBracketStructure structure = fold_surrogate(seq, cfg.min_loop);
        AbstractShape shape = abstract_shape(parse_dotbracket(structure));
        slots[i] = DatasetRecord{std::move(seq), std::move(structure), std::move(shape)};
    });

    std::vector<DatasetRecord> records;
    records.reserve(cfg.N);
    for (std::optional<DatasetRecord>& s : slots) records.push_back(std::move(*s));
    return records;
}

// Classes are the shapes with at least min_support samples; their true
// probabilities keep the FULL sample count as denominator, so filtering
// leaves the catalog summing to less than 1.
inline std::pair<ClassCatalog, std::vector<DatasetRecord>> define_classes(
    const std::vector<DatasetRecord>& samples, std::size_t min_support) {
    if (samples.empty()) throw NoClasses("define_classes: no samples");
    std::map<std::string, std::size_t> counts;  // ordered: catalog comes out lexicographic
    for (const DatasetRecord& r : samples) ++counts[r.shape.str()];

    ClassCatalog catalog;
    catalog.n_total = samples.size();
    for (const auto& [shape, count] : counts) {
        if (count < min_support) continue;
        catalog.shapes.emplace_back(shape);
        catalog.counts.push_back(count);
        catalog.p_true.push_back(static_cast<double>(count) /
                                 static_cast<double>(samples.size()));
    }
    if (catalog.size() == 0)
        throw NoClasses("define_classes: every shape fell below the support threshold");

    std::vector<DatasetRecord> filtered;
    filtered.reserve(samples.size());
    for (const DatasetRecord& r : samples)
        if (catalog.index_of(r.shape)) filtered.push_back(r);
    return {std::move(catalog), std::move(filtered)};
}

// Seeded shuffle; the first test_size samples are test candidates, the rest
// the training pool. Candidates whose shape never occurs in the pool are
// dropped, so the final test set may come out slightly smaller.
inline std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split(
    const std::vector<DatasetRecord>& filtered, std::size_t test_size, std::uint64_t seed) {
    if (test_size >= filtered.size())
        throw ConfigError("split: test_size must be smaller than the filtered sample count");
    std::vector<std::size_t> order(filtered.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(seed, 0x59117u, 0));  // split stream, apart from cell seeds
    shuffle_inplace(order, rng);

    std::vector<DatasetRecord> pool;
    pool.reserve(filtered.size() - test_size);
    for (std::size_t i = test_size; i < order.size(); ++i) pool.push_back(filtered[order[i]]);

    std::set<std::string> pool_shapes;
    for (const DatasetRecord& r : pool) pool_shapes.insert(r.shape.str());

    std::vector<DatasetRecord> test;
    test.reserve(test_size);
    for (std::size_t i = 0; i < test_size; ++i) {
        const DatasetRecord& r = filtered[order[i]];
        if (pool_shapes.count(r.shape.str())) test.push_back(r);
    }
    return {std::move(pool), std::move(test)};
}

// Per class, a seeded uniform draw without replacement of up to n_per_class
// pool members; classes with fewer members contribute everything they have.
// Returns indices into the pool, grouped by class in catalog order.
inline std::vector<std::size_t> stratified_select(const std::vector<DatasetRecord>& pool,
                                                  const ClassCatalog& catalog,
                                                  std::size_t n_per_class, std::uint64_t seed) {
    if (n_per_class < 1) throw ConfigError("stratified_select: n_per_class must be >= 1");
    std::vector<std::vector<std::size_t>> members(catalog.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (const auto idx = catalog.index_of(pool[i].shape)) members[*idx].push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> chosen;
    for (const std::vector<std::size_t>& m : members) {
        if (m.empty()) continue;
        for (const std::size_t pick :
             sample_without_replacement(rng, m.size(), std::min(n_per_class, m.size())))
            chosen.push_back(m[pick]);
    }
    return chosen;
}

// Row/column labels are the union of shapes seen in either vector, sorted;
// rows are truth, columns predictions.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
        return t;
    }
    std::size_t trace() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
        return t;
    }
};

inline double accuracy(const std::vector<std::string>& y_true,
                       const std::vector<std::string>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch("accuracy: size mismatch");
    if (y_true.empty()) throw std::invalid_argument("accuracy: empty labels");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i)
        if (y_true[i] == y_pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

// Mean per-class recall over the classes that actually occur in y_true.
inline double balanced_accuracy(const std::vector<std::string>& y_true,
                                const std::vector<std::string>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch("balanced_accuracy: size mismatch");
    if (y_true.empty()) throw std::invalid_argument("balanced_accuracy: empty labels");
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // hits, total
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        auto& [hits, total] = per_class[y_true[i]];
        ++total;
        if (y_true[i] == y_pred[i]) ++hits;
    }
    double sum = 0.0;
    for (const auto& [label, ht] : per_class)
        sum += static_cast<double>(ht.first) / static_cast<double>(ht.second);
    return sum / static_cast<double>(per_class.size());
}

inline ConfusionMatrix confusion_matrix(const std::vector<std::string>& y_true,
                                        const std::vector<std::string>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch("confusion_matrix: size mismatch");
    std::set<std::string> label_set(y_true.begin(), y_true.end());
    label_set.insert(y_pred.begin(), y_pred.end());

    ConfusionMatrix cm;
    cm.labels.assign(label_set.begin(), label_set.end());
    cm.counts.assign(cm.labels.size(), std::vector<std::size_t>(cm.labels.size(), 0));
    const auto index = [&](const std::string& s) {
        return static_cast<std::size_t>(
            std::lower_bound(cm.labels.begin(), cm.labels.end(), s) - cm.labels.begin());
    };
    for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[index(y_true[i])][index(y_pred[i])];
    return cm;
}

// Pearson correlation between log10 predicted and log10 true class
// probabilities. Undefined below three classes or at zero variance.
inline double pearson_log(const std::vector<double>& p_hat, const std::vector<double>& p_true) {
    if (p_hat.size() != p_true.size()) throw LengthMismatch("pearson_log: size mismatch");
    const std::size_t c = p_hat.size();
    if (c < 3) throw CorrelationUndefined("pearson_log: needs at least 3 classes");
    std::vector<double> lx(c), ly(c);
    for (std::size_t i = 0; i < c; ++i) {
        if (p_hat[i] <= 0.0 || p_true[i] <= 0.0)
            throw CorrelationUndefined("pearson_log: probabilities must be positive");
        lx[i] = std::log10(p_hat[i]);
        ly[i] = std::log10(p_true[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(c);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(c);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw CorrelationUndefined("pearson_log: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

struct MetricsReport {
    double accuracy = 0.0;
    double balanced_accuracy = 0.0;
    ConfusionMatrix confusion;
    double pearson_r = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_train = 0;
    PriorMode prior_mode = PriorMode::zero;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline Eigen::MatrixXd encode_matrix(const std::vector<DatasetRecord>& records,
                                     const std::vector<std::size_t>& subset) {
    if (subset.empty()) return Eigen::MatrixXd(0, 0);
    const Eigen::Index dim = static_cast<Eigen::Index>(4 * records[subset[0]].sequence.size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(subset.size()), dim);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const std::vector<double> row = encode_onehot(records[subset[i]].sequence);
        for (Eigen::Index j = 0; j < dim; ++j) x(static_cast<Eigen::Index>(i), j) = row[j];
    }
    return x;
}

inline double mean_pairwise_distance(const std::vector<DatasetRecord>& records,
                                     const std::vector<std::size_t>& subset) {
    if (subset.size() < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j)
            sum += hamming(records[subset[i]].sequence, records[subset[j]].sequence);
    const double pairs = 0.5 * static_cast<double>(subset.size()) *
                         static_cast<double>(subset.size() - 1);
    return sum / pairs;
}

}  // namespace detail

// One experiment cell: build the requested prior, fit the GP on the
// training rows, classify the test rows, and score. The starting length
// scale is the mean pairwise training distance divided by the class count.
inline MetricsReport run_cell(const std::vector<DatasetRecord>& pool,
                              const std::vector<std::size_t>& train_indices,
                              const std::vector<DatasetRecord>& test, const ClassCatalog& catalog,
                              PriorMode mode, const PriorConfig& prior_cfg = {},
                              const GpFitConfig& gp_cfg = {}) {
    const std::size_t c = catalog.size();

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c));
    double pearson_r = std::numeric_limits<double>::quiet_NaN();
    if (mode == PriorMode::ap_prior) {
        const PriorVector prior = build_prior(catalog, prior_cfg);
        for (std::size_t i = 0; i < c; ++i) mean(static_cast<Eigen::Index>(i)) = prior.p_hat[i];
        try {
            pearson_r = pearson_log(prior.p_hat, catalog.p_true);
        } catch (const CorrelationUndefined&) {
            // left as NaN for degenerate catalogs
        }
    }

    GpModel model;
    if (train_indices.empty()) {
        const Eigen::Index dim =
            test.empty() ? 0 : static_cast<Eigen::Index>(4 * test.front().sequence.size());
        model = GpModel::prior_only(mean, dim);
    } else {
        const Eigen::MatrixXd x = detail::encode_matrix(pool, train_indices);
        std::vector<std::size_t> labels;
        labels.reserve(train_indices.size());
        for (const std::size_t i : train_indices) labels.push_back(*catalog.index_of(pool[i].shape));
        const Eigen::MatrixXd y = one_hot(labels, c);
        double ell0 = detail::mean_pairwise_distance(pool, train_indices) / static_cast<double>(c);
        if (ell0 <= 0.0) ell0 = 1.0;  // single-row training set
        model = fit(x, y, mean, ell0, gp_cfg);
    }

    std::vector<std::string> y_true, y_pred;
    y_true.reserve(test.size());
    y_pred.reserve(test.size());
    Eigen::VectorXd xrow;
    for (const DatasetRecord& r : test) {
        const std::vector<double> enc = encode_onehot(r.sequence);
        xrow = Eigen::Map<const Eigen::VectorXd>(enc.data(), static_cast<Eigen::Index>(enc.size()));
        y_true.push_back(r.shape.str());
        y_pred.push_back(catalog.shapes[predict_class(model, xrow)].str());
    }

    MetricsReport report;
    report.accuracy = accuracy(y_true, y_pred);
    report.balanced_accuracy = balanced_accuracy(y_true, y_pred);
    report.confusion = confusion_matrix(y_true, y_pred);
    report.pearson_r = pearson_r;
    report.n_train = train_indices.size();
    report.prior_mode = mode;
    return report;
}

struct SweepConfig {
    std::vector<std::size_t> per_class_sizes = {1,  2,   3,   5,   10,   20,   40,
                                                80, 160, 320, 640, 1280, 2560, 5120};
    std::size_t repetitions = 10;
    std::vector<PriorMode> prior_modes = {PriorMode::zero, PriorMode::ap_prior};
    PriorConfig prior;
    GpFitConfig gp;

    void validate() const {
        if (per_class_sizes.empty()) throw ConfigError("sweep: per_class_sizes is empty");
        for (std::size_t i = 0; i < per_class_sizes.size(); ++i) {
            if (per_class_sizes[i] < 1) throw ConfigError("sweep: sizes must be >= 1");
            if (i > 0 && per_class_sizes[i] <= per_class_sizes[i - 1])
                throw ConfigError("sweep: sizes must be strictly ascending");
        }
        if (repetitions < 1) throw ConfigError("sweep: repetitions must be >= 1");
        if (prior_modes.empty()) throw ConfigError("sweep: prior_modes is empty");
        prior.validate();
        gp.validate();
    }
};

struct CellResult {
    std::size_t n_per_class = 0;
    MetricsReport metrics;
};

struct SweepSummaryRow {
    std::size_t n_per_class = 0;
    PriorMode prior_mode = PriorMode::zero;
    std::size_t n_train = 0;
    double mean_accuracy = 0.0;
    double mean_balanced_accuracy = 0.0;
};

struct SweepResult {
    ClassCatalog catalog;
    std::size_t test_size = 0;
    std::vector<CellResult> cells;  // ordered by (size, mode, repetition)
    std::vector<SweepSummaryRow> summary;
};

// Full training-size sweep. Cells are independent tasks; each derives its
// own sub-seed from (seed, size, repetition), so the result table does not
// depend on worker count or completion order. Both prior modes of a
// (size, repetition) pair see the identical training draw.
inline SweepResult sweep(const DatasetConfig& dataset_cfg, const SweepConfig& sweep_cfg,
                         std::size_t workers = 1) {
    sweep_cfg.validate();
    const std::vector<DatasetRecord> samples = generate_dataset(dataset_cfg, workers);
    auto [catalog, filtered] = define_classes(samples, dataset_cfg.min_class_support);
    auto [pool, test] = split(filtered, dataset_cfg.test_size, dataset_cfg.seed);

    struct Task {
        std::size_t n_per_class;
        PriorMode mode;
        std::size_t repetition;
        std::uint64_t cell_seed;
    };
    std::vector<Task> tasks;
    for (const std::size_t size : sweep_cfg.per_class_sizes)
        for (const PriorMode mode : sweep_cfg.prior_modes)
            for (std::size_t rep = 0; rep < sweep_cfg.repetitions; ++rep)
                tasks.push_back(Task{size, mode, rep,
                                     mix_seed(dataset_cfg.seed, size, rep)});

    SweepResult result;
    result.catalog = catalog;
    result.test_size = test.size();
    result.cells.resize(tasks.size());
    detail::run_parallel(tasks.size(), workers, [&](std::size_t i) {
        const Task& t = tasks[i];
        const std::vector<std::size_t> train =
            stratified_select(pool, catalog, t.n_per_class, t.cell_seed);
        MetricsReport metrics = run_cell(pool, train, test, catalog, t.mode, sweep_cfg.prior,
                                         sweep_cfg.gp);
        metrics.repetition = t.repetition;
        metrics.seed = t.cell_seed;
        result.cells[i] = CellResult{t.n_per_class, std::move(metrics)};
    });

    for (const std::size_t size : sweep_cfg.per_class_sizes) {
        for (const PriorMode mode : sweep_cfg.prior_modes) {
            SweepSummaryRow row;
            row.n_per_class = size;
            row.prior_mode = mode;
            std::size_t n = 0;
            for (const CellResult& cell : result.cells) {
                if (cell.n_per_class != size || cell.metrics.prior_mode != mode) continue;
                row.n_train = cell.metrics.n_train;
                row.mean_accuracy += cell.metrics.accuracy;
                row.mean_balanced_accuracy += cell.metrics.balanced_accuracy;
                ++n;
            }
            row.mean_accuracy /= static_cast<double>(n);
            row.mean_balanced_accuracy /= static_cast<double>(n);
            result.summary.push_back(row);
        }
    }
    return result;
}

inline void write_catalog_csv(std::ostream& out, const ClassCatalog& catalog) {
    out << "shape,count,p_true\n";
    out.precision(17);
    for (std::size_t i = 0; i < catalog.size(); ++i)
        out << catalog.shapes[i].str() << ',' << catalog.counts[i] << ',' << catalog.p_true[i]
            << '\n';
}

inline void write_results_csv(std::ostream& out, const SweepResult& result) {
    out << "n_train,prior_mode,repetition,accuracy,balanced_accuracy,pearson_r,seed\n";
    out.precision(17);
    for (const CellResult& cell : result.cells) {
        const MetricsReport& m = cell.metrics;
        out << m.n_train << ',' << to_string(m.prior_mode) << ',' << m.repetition << ','
            << m.accuracy << ',' << m.balanced_accuracy << ',' << m.pearson_r << ',' << m.seed
            << '\n';
    }
}

inline void write_summary_tsv(std::ostream& out, const SweepResult& result) {
    out << "n_per_class\tprior_mode\tn_train\tmean_accuracy\tmean_balanced_accuracy\n";
    out.precision(17);
    for (const SweepSummaryRow& row : result.summary)
        out << row.n_per_class << '\t' << to_string(row.prior_mode) << '\t' << row.n_train << '\t'
            << row.mean_accuracy << '\t' << row.mean_balanced_accuracy << '\n';
}

inline void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
    out << "true\\pred";
    for (const std::string& l : cm.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        out << cm.labels[i];
        for (std::size_t j = 0; j < cm.labels.size(); ++j) out << ',' << cm.counts[i][j];
        out << '\n';
    }
}

}  // namespace apgp
