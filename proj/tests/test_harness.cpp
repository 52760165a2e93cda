#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bscp/config.hpp"
#include "bscp/dataset.hpp"
#include "bscp/error.hpp"
#include "bscp/evaluation.hpp"
#include "bscp/image_io.hpp"
#include "bscp/model_io.hpp"
#include "bscp/synth.hpp"
#include "oracles.hpp"

using namespace bscp;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.N_c = 128;
    c.T = 6;
    c.K = 40;
    c.seeds = 2;
    c.per_shape_cap = 10;
    c.svm_epochs = 30;
    c.threads = 1;
    return c;
}

struct Fixture {
    LabeledShapes shapes;
    std::vector<ShapeFeatures> features;
};

const Fixture& synthetic() {
    static const Fixture f = [] {
        Fixture out;
        out.shapes = synth_shapes({.seed = 5, .per_class = 4, .size = 80.0});
        out.features = extract_all(out.shapes, small_config());
        return out;
    }();
    return f;
}

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("bscp_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ModelBundle trained_bundle() {
    const auto& f = synthetic();
    std::vector<const ShapeFeatures*> ptrs;
    for (const auto& x : f.features) ptrs.push_back(&x);
    return train_model(ptrs, f.shapes.labels, f.shapes.classes, small_config(), 3).bundle;
}

}  // namespace

TEST(Config, DefaultsAndParsing) {
    std::istringstream in("# comment\nK = 500\n\nN_td=3\nprotocol = loo\nalpha = 2.5  # trailing\n");
    const auto c = parse_config(in);
    EXPECT_EQ(c.K, 500);
    EXPECT_EQ(c.N_td, 3);
    EXPECT_EQ(c.protocol, Protocol::LeaveOneOut);
    EXPECT_EQ(c.alpha, 2.5);
    EXPECT_EQ(c.n_r, 5);
    EXPECT_EQ(c.descriptor().dimension(), 5 * 5 * 12 * 3);
}

TEST(Config, DefaultHistogramHas300Bins) {
    const ExperimentConfig c;
    EXPECT_EQ(BinGeometry::from(c.descriptor()).bins(), 300);
    EXPECT_EQ(c.K, 2500);
    EXPECT_EQ(c.llc_k, 5);
    EXPECT_EQ(c.alpha, 10.0);
}

TEST(Config, Errors) {
    std::istringstream unknown("K = 5\ncodebook_size = 3\n");
    EXPECT_THROW(parse_config(unknown), ConfigError);
    std::istringstream malformed("K = five\n");
    EXPECT_THROW(parse_config(malformed), ConfigError);
    std::istringstream no_equals("K 5\n");
    EXPECT_THROW(parse_config(no_equals), ConfigError);
    ExperimentConfig c;
    c.N_td = 4;
    EXPECT_THROW(c.validate(), ConfigError);
    c.N_td = 5;
    c.K = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(parse_protocol("kfold"), ConfigError);
}

TEST(Config, FormatRoundTrip) {
    auto c = small_config();
    c.alpha = 0.1 + 0.2;
    c.prune_ratio = 1.0 / 3.0;
    c.seed = 123456789012345ull;
    c.protocol = Protocol::LeaveOneOut;
    std::istringstream in(format_config(c));
    EXPECT_EQ(format_config(parse_config(in)), format_config(c));
    std::istringstream again(format_config(c));
    EXPECT_EQ(parse_config(again).alpha, c.alpha);
}

TEST(Model, RoundTripIsBitIdentical) {
    const auto bundle = trained_bundle();
    std::stringstream buf;
    write_model(buf, bundle);
    const auto back = read_model(buf);
    EXPECT_TRUE(same_persisted(bundle, back));
    EXPECT_EQ(back.codebook.entries, bundle.codebook.entries);
    EXPECT_EQ(back.svm.weights, bundle.svm.weights);
    EXPECT_EQ(back.svm.class_labels, bundle.svm.class_labels);

    const auto dir = temp_dir("model");
    save_model(bundle, dir / "m.bscp");
    EXPECT_TRUE(same_persisted(bundle, load_model(dir / "m.bscp")));
    std::uint64_t label_bytes = 0;
    for (const auto& l : bundle.svm.class_labels) label_bytes += l.size();
    EXPECT_EQ(fs::file_size(dir / "m.bscp"),
              model_file_size(bundle.config.N_d, bundle.config.N_td, bundle.config.K, bundle.codebook.dimension(),
                              bundle.svm.classes(), label_bytes));
    fs::remove_all(dir);
}

TEST(Model, FileSizeArithmetic) {
    const std::uint64_t header = 4 + 2 + 11 * 4;
    const std::uint64_t edges = (6 + 6) * 8;
    const std::uint64_t codebook = 2500ull * 1500 * 4;
    const std::uint64_t weights = 20ull * 21 * 2500 * 4;
    const std::uint64_t trailer = 8 + 8 + 4 + 8 + 20 * 4 + 60;
    EXPECT_EQ(model_file_size(5, 5, 2500, 1500, 20, 60), header + edges + codebook + weights + trailer);
}

TEST(Model, CorruptMagicAndTruncation) {
    const auto bundle = trained_bundle();
    std::stringstream buf;
    write_model(buf, bundle);
    std::string bytes = buf.str();

    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream bad_in(bad);
    EXPECT_THROW(read_model(bad_in), FormatError);

    std::string version = bytes;
    version[4] = static_cast<char>(kModelVersion + 1);
    std::istringstream version_in(version);
    EXPECT_THROW(read_model(version_in), FormatError);

    for (std::size_t cut : {std::size_t{3}, std::size_t{30}, bytes.size() / 2, bytes.size() - 1}) {
        std::istringstream in(bytes.substr(0, cut));
        EXPECT_THROW(read_model(in), FormatError) << "cut at " << cut;
    }
}

TEST(Model, DimensionMismatchRejected) {
    auto bundle = trained_bundle();
    bundle.svm.weights.conservativeResize(bundle.svm.weights.rows(), bundle.svm.weights.cols() - 1);
    EXPECT_THROW(bundle.check_dimensions(), FormatError);
    std::stringstream buf;
    EXPECT_THROW(write_model(buf, bundle), FormatError);
}

TEST(Model, DescriptorMatrixRoundTrip) {
    DescriptorMatrix m(3, 4);
    m << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12.5f;
    std::stringstream buf;
    write_matrix(buf, m);
    EXPECT_EQ(buf.str().size(), 4u + 8u + 48u);
    EXPECT_EQ(read_matrix(buf), m);
}

TEST(Dataset, WriteAndScanRoundTrip) {
    const auto dir = temp_dir("dataset");
    LabeledShapes shapes;
    shapes.classes = {"apple", "bone"};
    shapes.add(canonicalize_mask(oracle::disc(10)), 0, "a1");
    shapes.add(canonicalize_mask(oracle::rectangle(30, 8)), 1, "b1");
    shapes.add(canonicalize_mask(oracle::disc(12)), 0, "a2");
    write_dataset(shapes, dir);
    std::ofstream(dir / "apple" / "notes.txt") << "ignored";
    const auto back = load_dataset(dir);
    EXPECT_EQ(back.classes, shapes.classes);
    EXPECT_EQ(back.size(), 3u);
    EXPECT_EQ(back.labels, (std::vector<int>{0, 0, 1}));
    EXPECT_EQ(back.class_counts(), (std::vector<int>{2, 1}));
    fs::remove_all(dir);
}

TEST(Dataset, FlatLayout) {
    const auto dir = temp_dir("flat");
    write_png(dir / "bat-1.png", mask_to_gray(canonicalize_mask(oracle::disc(8))));
    write_png(dir / "bat-2.png", mask_to_gray(canonicalize_mask(oracle::disc(9))));
    write_png(dir / "cup-1.png", mask_to_gray(canonicalize_mask(oracle::rectangle(20, 10))));
    const auto index = scan_dataset(dir);
    EXPECT_EQ(index.classes, (std::vector<std::string>{"bat", "cup"}));
    EXPECT_EQ(index.labels, (std::vector<int>{0, 0, 1}));
    fs::remove_all(dir);
    fs::create_directories(dir);
    EXPECT_THROW(scan_dataset(dir), ShapeError);
    fs::remove_all(dir);
}

TEST(Protocol, HalfSplitIsStratified) {
    const std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2, 2};
    const auto s = half_split(labels, 3, 9);
    EXPECT_EQ(s.train.size() + s.test.size(), labels.size());
    std::vector<int> per_class(3, 0);
    for (int i : s.train) ++per_class[labels[i]];
    EXPECT_EQ(per_class, (std::vector<int>{2, 1, 3}));
    std::vector<int> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (int i = 0; i < static_cast<int>(all.size()); ++i) EXPECT_EQ(all[i], i);
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    const auto again = half_split(labels, 3, 9);
    EXPECT_EQ(again.train, s.train);
}

TEST(Protocol, HalfSplitRequiresTwoPerClass) {
    LabeledShapes shapes;
    shapes.classes = {"a", "b"};
    shapes.add(canonicalize_mask(oracle::disc(10)), 0, "a1");
    shapes.add(canonicalize_mask(oracle::disc(11)), 0, "a2");
    shapes.add(canonicalize_mask(oracle::rectangle(30, 8)), 1, "b1");
    EXPECT_THROW(run_half_split(shapes, small_config()), ConfigError);
}

TEST(Protocol, HalfSplitReportIsDeterministicAndLeakFree) {
    const auto& f = synthetic();
    const auto config = small_config();
    const auto a = run_half_split(f.features, f.shapes.labels, f.shapes.classes, config);
    const auto b = run_half_split(f.features, f.shapes.labels, f.shapes.classes, config);
    ASSERT_EQ(a.accuracies.size(), 2u);
    EXPECT_EQ(a.accuracies, b.accuracies);
    EXPECT_EQ(a.kmeans_input_hashes, b.kmeans_input_hashes);
    EXPECT_EQ(a.predictions.size(), 2u * 8u);
    for (double acc : a.accuracies) {
        EXPECT_GE(acc, 0.0);
        EXPECT_LE(acc, 1.0);
    }

    for (int r = 0; r < 2; ++r) {
        const auto split = half_split(f.shapes.labels, 4, config.seed + r);
        std::vector<const PartDescriptorSet*> train_sets;
        for (int i : split.train) train_sets.push_back(&f.features[i].descriptors);
        const auto sample = sample_training_descriptors(train_sets, config.per_shape_cap, config.seed + r);
        EXPECT_EQ(a.kmeans_input_hashes[r], hash_rows(sample.rows));
        for (const auto& p : a.predictions)
            if (p.run == r) EXPECT_TRUE(std::binary_search(split.test.begin(), split.test.end(), p.shape));
    }
}

TEST(Protocol, LeaveOneOutTrivial) {
    LabeledShapes shapes;
    shapes.classes = {"disc", "bar"};
    shapes.add(canonicalize_mask(oracle::disc(30)), 0, "d1");
    shapes.add(canonicalize_mask(oracle::disc(30)), 0, "d2");
    shapes.add(canonicalize_mask(oracle::rectangle(120, 20)), 1, "b1");
    shapes.add(canonicalize_mask(oracle::rectangle(120, 20)), 1, "b2");
    auto config = small_config();
    config.K = 10;
    config.protocol = Protocol::LeaveOneOut;
    const auto report = run_leave_one_out(shapes, config);
    ASSERT_EQ(report.accuracies.size(), 1u);
    EXPECT_EQ(report.accuracies[0], 1.0);
    EXPECT_EQ(report.stddev, 0.0);
    EXPECT_EQ(report.predictions.size(), 4u);
}

TEST(Report, ParseRecoversAggregates) {
    const auto& f = synthetic();
    const auto report = run_half_split(f.features, f.shapes.labels, f.shapes.classes, small_config());
    const auto text = format_report(report);
    const auto back = parse_report(text);
    EXPECT_EQ(back.accuracies, report.accuracies);
    EXPECT_EQ(back.mean, report.mean);
    EXPECT_EQ(back.stddev, report.stddev);
    EXPECT_EQ(back.confusion, report.confusion);
    EXPECT_EQ(back.classes, report.classes);
    EXPECT_EQ(back.seeds, report.seeds);

    EvaluationReport manual;
    manual.accuracies = {0.5, 0.75, 1.0};
    manual.aggregate();
    EXPECT_DOUBLE_EQ(manual.mean, 0.75);
    EXPECT_DOUBLE_EQ(manual.stddev, 0.25);
}

TEST(Sweep, OneRowPerValueAndDeterministic) {
    const auto& f = synthetic();
    auto config = small_config();
    config.seeds = 1;
    const std::vector<double> values{1, 3};
    const auto a = sweep(f.shapes, config, "N_td", values);
    const auto b = sweep(f.shapes, config, "N_td", values);
    ASSERT_EQ(a.rows.size(), 2u);
    EXPECT_EQ(a.rows[0].value, 1.0);
    EXPECT_EQ(a.rows[1].value, 3.0);
    EXPECT_EQ(format_sweep(a), format_sweep(b));
    EXPECT_THROW(sweep(f.shapes, config, "T", values), ConfigError);
    EXPECT_THROW(sweep(f.shapes, config, "N_td", {}), ConfigError);
}
