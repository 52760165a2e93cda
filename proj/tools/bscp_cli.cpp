#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bscp/config.hpp"
#include "bscp/dataset.hpp"
#include "bscp/error.hpp"
#include "bscp/evaluation.hpp"
#include "bscp/model_io.hpp"
#include "bscp/pipeline.hpp"
#include "bscp/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string data;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_data) {
    auto* data = cmd->add_option("--data", f.data, "dataset directory or image file");
    if (needs_data) data->required();
    cmd->add_option("--config", f.config, "key = value config file");
    cmd->add_option("--out", f.out, "output path");
    cmd->add_option("--seed", f.seed, "base seed")->each([&f](const std::string&) { f.seed_set = true; });
    cmd->add_option("--set", f.overrides, "override a config key, key=value (repeatable)");
}

bscp::ExperimentConfig make_config(const CommonFlags& f) {
    auto config = f.config.empty() ? bscp::ExperimentConfig{} : bscp::load_config(f.config);
    for (const auto& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw bscp::ConfigError("--set expects key=value, got '" + kv + "'");
        bscp::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!f.data.empty()) config.data = f.data;
    if (!f.out.empty()) config.out = f.out;
    if (f.seed_set) config.seed = f.seed;
    config.validate();
    return config;
}

void emit(const std::string& text, const fs::path& out) {
    std::cout << text;
    if (out.empty()) return;
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::ofstream file(out);
    if (!file) throw bscp::Error("cannot write " + out.string());
    file << text;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream s(text);
    for (std::string item; std::getline(s, item, ',');) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw bscp::ConfigError("bad sweep value '" + item + "'");
        }
    }
    return values;
}

int run_train(const CommonFlags& f) {
    const auto config = make_config(f);
    if (config.out.empty()) throw bscp::ConfigError("train needs --out <model file>");
    const auto shapes = bscp::load_dataset(config.data);
    const auto features = bscp::extract_all(shapes, config);
    std::vector<const bscp::ShapeFeatures*> ptrs;
    for (const auto& x : features) ptrs.push_back(&x);
    const auto trained = bscp::train_model(ptrs, shapes.labels, shapes.classes, config, config.seed);
    bscp::save_model(trained.bundle, config.out);
    int correct = 0;
    for (std::size_t i = 0; i < features.size(); ++i)
        correct += bscp::classify(trained.bundle, features[i]) == shapes.labels[i];
    std::printf("trained on %zu shapes, %zu classes; training accuracy %.4f; objective %.6g\n", shapes.size(),
                shapes.classes.size(), static_cast<double>(correct) / shapes.size(), trained.bundle.svm.final_objective);
    std::printf("model written to %s\n", config.out.string().c_str());
    return 0;
}

int run_eval(const CommonFlags& f, const std::string& protocol) {
    auto config = make_config(f);
    if (!protocol.empty()) config.protocol = bscp::parse_protocol(protocol);
    const auto shapes = bscp::load_dataset(config.data);
    const auto report = config.protocol == bscp::Protocol::HalfSplit ? bscp::run_half_split(shapes, config)
                                                                     : bscp::run_leave_one_out(shapes, config);
    emit(bscp::format_report(report), config.out);
    return 0;
}

int run_predict(const CommonFlags& f, const std::string& model_path, const std::vector<std::string>& images) {
    const auto bundle = bscp::load_model(model_path);
    std::vector<fs::path> files(images.begin(), images.end());
    if (!f.data.empty()) {
        if (fs::is_directory(f.data)) {
            const auto index = bscp::scan_dataset(f.data);
            files.insert(files.end(), index.files.begin(), index.files.end());
        } else {
            files.emplace_back(f.data);
        }
    }
    if (files.empty()) throw bscp::ConfigError("predict needs --data or image arguments");
    std::ostringstream out;
    for (const auto& file : files) {
        const auto features = bscp::extract_features(bscp::load_mask(file), bundle.config);
        out << file.string() << " " << bundle.svm.class_labels[bscp::classify(bundle, features)] << "\n";
    }
    emit(out.str(), f.out);
    return 0;
}

int run_extract(const CommonFlags& f, bool debug) {
    const auto config = make_config(f);
    if (config.out.empty()) throw bscp::ConfigError("extract needs --out <directory>");
    std::vector<fs::path> files;
    if (fs::is_directory(config.data)) files = bscp::scan_dataset(config.data).files;
    else files.push_back(config.data);
    fs::create_directories(config.out);
    const auto bins = bscp::BinGeometry::from(config.descriptor());
    for (const auto& file : files) {
        const auto analysis = bscp::analyze_shape(bscp::load_mask(file), config);
        const auto features = bscp::describe_shape(analysis, bins);
        const auto stem = file.stem().string();
        {
            std::ofstream bin(config.out / (stem + ".bscd"), std::ios::binary);
            bscp::write_matrix(bin, features.descriptors.parts);
            std::ofstream mirrors(config.out / (stem + ".mirror.bscd"), std::ios::binary);
            bscp::write_matrix(mirrors, features.descriptors.mirrors);
        }
        std::ofstream meta(config.out / (stem + ".parts.txt"));
        meta << "# row i j median_x median_y\n";
        for (std::size_t r = 0; r < analysis.parts.size(); ++r) {
            const auto& p = analysis.parts[r];
            meta << r << " " << p.first << " " << p.second << " " << p.median_position.x << " "
                 << p.median_position.y << "\n";
        }
        if (debug) {
            bscp::write_skeleton_overlay(config.out / (stem + ".skeleton.pgm"), analysis.normalized.mask,
                                         analysis.skeleton);
            std::ofstream table(config.out / (stem + ".thickness.txt"));
            bscp::write_thickness_table(table, analysis.contour);
        }
        std::printf("%s: %zu parts x %ld dims\n", file.string().c_str(), analysis.parts.size(),
                    static_cast<long>(features.descriptors.parts.cols()));
    }
    return 0;
}

int run_sweep(const CommonFlags& f, const std::string& param, const std::string& values) {
    const auto config = make_config(f);
    const auto shapes = bscp::load_dataset(config.data);
    const auto v = parse_values(values);
    emit(bscp::format_sweep(bscp::sweep(shapes, config, param, v)), config.out);
    return 0;
}

int run_synth(const CommonFlags& f, const std::string& kind, int count, double taper) {
    if (f.out.empty()) throw bscp::ConfigError("synth needs --out <directory>");
    bscp::SynthOptions options;
    options.seed = f.seed;
    options.per_class = count;
    options.taper = taper;
    bscp::LabeledShapes shapes;
    if (kind == "shapes") shapes = bscp::synth_shapes(options);
    else if (kind == "thickness") shapes = bscp::synth_thickness(options);
    else throw bscp::ConfigError("unknown synth kind '" + kind + "' (shapes or thickness)");
    bscp::write_dataset(shapes, f.out);
    std::printf("%zu shapes in %zu classes written to %s\n", shapes.size(), shapes.classes.size(), f.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shape classification with bags of skeleton-associated contour parts"};
    app.require_subcommand(1);

    CommonFlags train_flags, eval_flags, predict_flags, extract_flags, sweep_flags, synth_flags;
    std::string protocol, model_path, param, values, kind = "shapes";
    std::vector<std::string> images;
    bool debug = false;
    int count = 40;
    double taper = 0.1;

    auto* train = app.add_subcommand("train", "train a model on a whole dataset");
    add_common(train, train_flags, true);

    auto* eval = app.add_subcommand("eval", "evaluate with random half splits or leave-one-out");
    add_common(eval, eval_flags, true);
    eval->add_option("--protocol", protocol, "half-split or loo")
        ->check(CLI::IsMember({"half-split", "loo", "leave-one-out"}));

    auto* pred = app.add_subcommand("predict", "classify images with a trained model");
    add_common(pred, predict_flags, false);
    pred->add_option("--model", model_path, "model file")->required();
    pred->add_option("images", images, "image files");

    auto* extract = app.add_subcommand("extract", "dump part descriptors per shape");
    add_common(extract, extract_flags, true);
    extract->add_flag("--debug", debug, "also write skeleton overlays and thickness tables");

    auto* sw = app.add_subcommand("sweep", "half-split accuracy over values of one parameter");
    add_common(sw, sweep_flags, true);
    sw->add_option("--param", param, "N_td, n_r or K")->required()->check(CLI::IsMember({"N_td", "n_r", "K"}));
    sw->add_option("--values", values, "comma separated values")->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--out", synth_flags.out, "output directory")->required();
    synth->add_option("--seed", synth_flags.seed, "generator seed");
    synth->add_option("--kind", kind, "shapes (4 classes) or thickness (2 classes)")
        ->check(CLI::IsMember({"shapes", "thickness"}));
    synth->add_option("--count", count, "shapes per class")->check(CLI::PositiveNumber);
    synth->add_option("--taper", taper, "relative width change of tapered ribbons")->check(CLI::Range(0.0, 0.9));

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return run_train(train_flags);
        if (eval->parsed()) return run_eval(eval_flags, protocol);
        if (pred->parsed()) return run_predict(predict_flags, model_path, images);
        if (extract->parsed()) return run_extract(extract_flags, debug);
        if (sw->parsed()) return run_sweep(sweep_flags, param, values);
        if (synth->parsed()) return run_synth(synth_flags, kind, count, taper);
    } catch (const bscp::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
