#include "bscp/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "bscp/error.hpp"
#include "parallel.hpp"

namespace bscp {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
std::vector<const T*> pointers(std::span<const T> items, std::span<const int> subset) {
    std::vector<const T*> out;
    out.reserve(subset.size());
    for (int i : subset) out.push_back(&items[i]);
    return out;
}

std::vector<int> pick(std::span<const int> values, std::span<const int> subset) {
    std::vector<int> out;
    out.reserve(subset.size());
    for (int i : subset) out.push_back(values[i]);
    return out;
}

void check_labels(std::span<const ShapeFeatures> features, std::span<const int> labels,
                  const std::vector<std::string>& classes) {
    if (features.size() != labels.size()) throw ConfigError("feature and label counts differ");
    for (int y : labels)
        if (y < 0 || y >= static_cast<int>(classes.size())) throw ConfigError("label out of range");
}

std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

std::uint64_t hash_rows(const DescriptorMatrix& rows) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    const std::uint64_t shape[2] = {static_cast<std::uint64_t>(rows.rows()), static_cast<std::uint64_t>(rows.cols())};
    mix(shape, sizeof shape);
    mix(rows.data(), sizeof(float) * rows.size());
    return h;
}

TrainedModel train_model(std::span<const ShapeFeatures* const> features, std::span<const int> labels,
                         const std::vector<std::string>& classes, const ExperimentConfig& config,
                         std::uint64_t seed) {
    config.validate();
    std::vector<const PartDescriptorSet*> sets;
    sets.reserve(features.size());
    for (const auto* f : features) sets.push_back(&f->descriptors);
    const auto sample = sample_training_descriptors(sets, config.per_shape_cap, seed);
    if (sample.rows.rows() < config.K)
        throw ConfigError("K = " + std::to_string(config.K) + " exceeds the " + std::to_string(sample.rows.rows()) +
                          " sampled training descriptors");

    TrainedModel trained;
    trained.kmeans_input_hash = hash_rows(sample.rows);
    for (const auto& id : sample.ids) trained.kmeans_shapes.push_back(id.shape);
    std::sort(trained.kmeans_shapes.begin(), trained.kmeans_shapes.end());
    trained.kmeans_shapes.erase(std::unique(trained.kmeans_shapes.begin(), trained.kmeans_shapes.end()),
                                trained.kmeans_shapes.end());

    auto& bundle = trained.bundle;
    bundle.config = config;
    KMeansOptions km;
    km.seed = seed;
    km.max_iterations = config.kmeans_max_iter;
    km.tolerance = config.kmeans_tol;
    bundle.codebook = kmeans(sample.rows, config.K, km).codebook;
    bundle.codebook.geometry_fingerprint = bundle.bins().fingerprint();
    bundle.codebook.validate(config.llc_k);

    const auto vectors = encode_all(features, bundle.codebook, config.llc_k, 1);
    std::vector<SparseVector> g;
    g.reserve(vectors.size());
    for (const auto& v : vectors) g.push_back(v.values);
    SvmOptions svm;
    svm.alpha = config.alpha;
    svm.seed = seed;
    svm.epochs = config.svm_epochs;
    bundle.svm = train_svm(g, labels, classes, svm);
    return trained;
}

int classify(const ModelBundle& bundle, const ShapeFeatures& features) {
    return predict(bundle.svm, encode_shape(features, bundle.codebook, bundle.config.llc_k).values);
}

void EvaluationReport::aggregate() {
    const auto n = static_cast<double>(accuracies.size());
    mean = accuracies.empty() ? 0.0 : std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : accuracies) ss += (a - mean) * (a - mean);
    stddev = accuracies.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

Split half_split(std::span<const int> labels, int classes, std::uint64_t seed) {
    std::vector<std::vector<int>> members(classes);
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) members[labels[i]].push_back(i);
    std::mt19937_64 rng(seed);
    Split split;
    for (auto& m : members) {
        if (m.size() < 2) throw ConfigError("every class needs at least two shapes for a half split");
        std::shuffle(m.begin(), m.end(), rng);
        const auto half = m.size() / 2;
        split.train.insert(split.train.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(half));
        split.test.insert(split.test.end(), m.begin() + static_cast<std::ptrdiff_t>(half), m.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

EvaluationReport run_half_split(std::span<const ShapeFeatures> features, std::span<const int> labels,
                                const std::vector<std::string>& classes, const ExperimentConfig& config) {
    config.validate();
    check_labels(features, labels, classes);
    const int L = static_cast<int>(classes.size());
    const int runs = config.seeds;
    std::vector<Split> splits;
    for (int r = 0; r < runs; ++r) splits.push_back(half_split(labels, L, config.seed + r));

    struct RunOutput {
        double accuracy = 0.0;
        double seconds = 0.0;
        std::uint64_t hash = 0;
        std::vector<Prediction> predictions;
    };
    std::vector<RunOutput> outputs(runs);
    detail::parallel_for(runs, config.threads, [&](std::size_t r) {
        const auto start = Clock::now();
        const auto& split = splits[r];
        const auto train_features = pointers(features, split.train);
        const auto train_labels = pick(labels, split.train);
        const auto trained = train_model(train_features, train_labels, classes, config, config.seed + r);
        auto& out = outputs[r];
        out.hash = trained.kmeans_input_hash;
        int correct = 0;
        for (int i : split.test) {
            const int predicted = classify(trained.bundle, features[i]);
            correct += predicted == labels[i];
            out.predictions.push_back({static_cast<int>(r), i, labels[i], predicted});
        }
        out.accuracy = static_cast<double>(correct) / static_cast<double>(split.test.size());
        out.seconds = seconds_since(start);
    });

    EvaluationReport report;
    report.protocol = Protocol::HalfSplit;
    report.classes = classes;
    report.confusion.assign(L, std::vector<int>(L, 0));
    for (int r = 0; r < runs; ++r) {
        report.seeds.push_back(config.seed + r);
        report.accuracies.push_back(outputs[r].accuracy);
        report.run_seconds.push_back(outputs[r].seconds);
        report.kmeans_input_hashes.push_back(outputs[r].hash);
        for (const auto& p : outputs[r].predictions) {
            ++report.confusion[p.truth][p.predicted];
            report.predictions.push_back(p);
        }
    }
    report.aggregate();
    return report;
}

EvaluationReport run_half_split(const LabeledShapes& shapes, const ExperimentConfig& config) {
    const auto start = Clock::now();
    const auto features = extract_all(shapes, config);
    const double extract = seconds_since(start);
    auto report = run_half_split(features, shapes.labels, shapes.classes, config);
    report.extract_seconds = extract;
    return report;
}

EvaluationReport run_leave_one_out(std::span<const ShapeFeatures> features, std::span<const int> labels,
                                   const std::vector<std::string>& classes, const ExperimentConfig& config) {
    config.validate();
    check_labels(features, labels, classes);
    const int n = static_cast<int>(features.size());
    if (n < 2) throw ConfigError("leave-one-out needs at least two shapes");
    const int L = static_cast<int>(classes.size());
    const auto start = Clock::now();

    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto all_features = pointers(features, all);
    const auto trained = train_model(all_features, labels, classes, config, config.seed);
    const auto vectors = encode_all(all_features, trained.bundle.codebook, config.llc_k, config.threads);

    std::vector<int> predicted(n, -1);
    detail::parallel_for(n, config.threads, [&](std::size_t held) {
        std::vector<SparseVector> g;
        std::vector<int> y;
        for (int i = 0; i < n; ++i) {
            if (i == static_cast<int>(held)) continue;
            g.push_back(vectors[i].values);
            y.push_back(labels[i]);
        }
        SvmOptions svm;
        svm.alpha = config.alpha;
        svm.seed = config.seed;
        svm.epochs = config.svm_epochs;
        const auto model = train_svm(g, y, classes, svm);
        predicted[held] = predict(model, vectors[held].values);
    });

    EvaluationReport report;
    report.protocol = Protocol::LeaveOneOut;
    report.classes = classes;
    report.seeds.push_back(config.seed);
    report.confusion.assign(L, std::vector<int>(L, 0));
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        correct += predicted[i] == labels[i];
        ++report.confusion[labels[i]][predicted[i]];
        report.predictions.push_back({0, i, labels[i], predicted[i]});
    }
    report.accuracies.push_back(static_cast<double>(correct) / n);
    report.kmeans_input_hashes.push_back(trained.kmeans_input_hash);
    report.run_seconds.push_back(seconds_since(start));
    report.aggregate();
    return report;
}

EvaluationReport run_leave_one_out(const LabeledShapes& shapes, const ExperimentConfig& config) {
    const auto start = Clock::now();
    const auto features = extract_all(shapes, config);
    const double extract = seconds_since(start);
    auto report = run_leave_one_out(features, shapes.labels, shapes.classes, config);
    report.extract_seconds = extract;
    return report;
}

std::string format_report(const EvaluationReport& r) {
    std::ostringstream s;
    s << "protocol: " << to_string(r.protocol) << "\n";
    s << "classes: " << r.classes.size() << "\n\n";
    s << std::left << std::setw(6) << "run" << std::setw(22) << "seed" << std::setw(12) << "accuracy"
      << "seconds\n";
    for (std::size_t i = 0; i < r.accuracies.size(); ++i) {
        s << std::setw(6) << i << std::setw(22) << r.seeds[i] << std::setw(12) << std::fixed << std::setprecision(4)
          << r.accuracies[i] << std::setprecision(2) << r.run_seconds[i] << "\n";
        s.unsetf(std::ios::fixed);
    }
    s << std::fixed << std::setprecision(2) << "\nmean accuracy: " << 100.0 * r.mean << "% +/- " << 100.0 * r.stddev
      << "%\n";
    s << "feature extraction: " << r.extract_seconds << " s\n\n";
    s.unsetf(std::ios::fixed);

    std::size_t width = 5;
    for (const auto& c : r.classes) width = std::max(width, c.size() + 1);
    s << "confusion (rows = truth, columns = prediction)\n" << std::setw(static_cast<int>(width)) << "";
    for (std::size_t j = 0; j < r.classes.size(); ++j) s << std::right << std::setw(6) << j;
    s << "\n";
    for (std::size_t i = 0; i < r.confusion.size(); ++i) {
        s << std::left << std::setw(static_cast<int>(width)) << r.classes[i] << std::right;
        for (int v : r.confusion[i]) s << std::setw(6) << v;
        s << "\n";
    }
    s << std::left;

    s << "\n[report]\n";
    s << "protocol = " << to_string(r.protocol) << "\n";
    s << "classes =";
    for (const auto& c : r.classes) s << " " << c;
    s << "\nruns = " << r.accuracies.size() << "\n";
    for (std::size_t i = 0; i < r.accuracies.size(); ++i) {
        s << "seed." << i << " = " << r.seeds[i] << "\n";
        s << "accuracy." << i << " = " << format_double(r.accuracies[i]) << "\n";
        s << "kmeans_hash." << i << " = " << r.kmeans_input_hashes[i] << "\n";
        s << "seconds." << i << " = " << format_double(r.run_seconds[i]) << "\n";
    }
    s << "mean = " << format_double(r.mean) << "\n";
    s << "std = " << format_double(r.stddev) << "\n";
    s << "extract_seconds = " << format_double(r.extract_seconds) << "\n";
    for (std::size_t i = 0; i < r.confusion.size(); ++i) {
        s << "confusion." << i << " =";
        for (int v : r.confusion[i]) s << " " << v;
        s << "\n";
    }
    return s.str();
}

EvaluationReport parse_report(std::string_view text) {
    const auto start = text.find("[report]\n");
    if (start == std::string_view::npos) throw FormatError("report block not found");
    std::istringstream in(std::string(text.substr(start + 9)));
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find(" =");
        if (eq == std::string::npos) throw FormatError("malformed report line: " + line);
        auto value = line.substr(eq + 2);
        if (!value.empty() && value.front() == ' ') value.erase(0, 1);
        kv[line.substr(0, eq)] = value;
    }
    auto field = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw FormatError("report lacks " + key);
        return it->second;
    };
    auto number = [&](const std::string& key) {
        try {
            return std::stod(field(key));
        } catch (const std::logic_error&) {
            throw FormatError("bad number for " + key);
        }
    };

    EvaluationReport r;
    try {
        r.protocol = parse_protocol(field("protocol"));
    } catch (const ConfigError& e) {
        throw FormatError(e.what());
    }
    std::istringstream classes(field("classes"));
    for (std::string c; classes >> c;) r.classes.push_back(c);
    const auto runs = static_cast<std::size_t>(number("runs"));
    for (std::size_t i = 0; i < runs; ++i) {
        const auto k = std::to_string(i);
        r.seeds.push_back(std::stoull(field("seed." + k)));
        r.accuracies.push_back(number("accuracy." + k));
        r.kmeans_input_hashes.push_back(std::stoull(field("kmeans_hash." + k)));
        r.run_seconds.push_back(number("seconds." + k));
    }
    r.mean = number("mean");
    r.stddev = number("std");
    r.extract_seconds = number("extract_seconds");
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        std::istringstream row(field("confusion." + std::to_string(i)));
        std::vector<int> values;
        for (int v; row >> v;) values.push_back(v);
        if (values.size() != r.classes.size()) throw FormatError("confusion row has the wrong length");
        r.confusion.push_back(std::move(values));
    }
    return r;
}

SweepTable sweep(const LabeledShapes& shapes, const ExperimentConfig& config, std::string_view parameter,
                 std::span<const double> values) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    if (parameter != "N_td" && parameter != "n_r" && parameter != "K")
        throw ConfigError("sweep parameter must be N_td, n_r or K");
    SweepTable table;
    table.parameter = std::string(parameter);
    std::vector<ShapeFeatures> cached;
    for (double v : values) {
        if (v != std::floor(v)) throw ConfigError("sweep values must be integers");
        auto c = config;
        set_config_value(c, parameter, std::to_string(static_cast<long long>(v)));
        c.validate();
        if (parameter != "K" || cached.empty()) cached = extract_all(shapes, c);
        const auto report = run_half_split(cached, shapes.labels, shapes.classes, c);
        table.rows.push_back({v, report.mean, report.stddev});
    }
    return table;
}

std::string format_sweep(const SweepTable& table) {
    std::ostringstream s;
    s << "# " << table.parameter << " mean std\n";
    for (const auto& row : table.rows)
        s << row.value << " " << format_double(row.mean) << " " << format_double(row.stddev) << "\n";
    return s.str();
}

}  // namespace bscp
