#include "bscp/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "bscp/error.hpp"

namespace bscp {
namespace {

bool is_image(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".pgm" || ext == ".pnm";
}

std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<int> LabeledShapes::class_counts() const {
    std::vector<int> counts(classes.size(), 0);
    for (int y : labels) ++counts[y];
    return counts;
}

void LabeledShapes::add(BinaryMask mask, int label, std::string name) {
    masks.push_back(std::move(mask));
    labels.push_back(label);
    names.push_back(std::move(name));
}

DatasetIndex scan_dataset(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root)) throw ShapeError("not a directory: " + root.string());
    DatasetIndex index;
    const auto entries = sorted_entries(root);
    const bool nested = std::any_of(entries.begin(), entries.end(),
                                    [](const auto& p) { return std::filesystem::is_directory(p); });
    if (nested) {
        for (const auto& dir : entries) {
            if (!std::filesystem::is_directory(dir)) continue;
            std::vector<std::filesystem::path> files;
            for (const auto& f : sorted_entries(dir))
                if (std::filesystem::is_regular_file(f) && is_image(f)) files.push_back(f);
            if (files.empty()) continue;
            const int label = static_cast<int>(index.classes.size());
            index.classes.push_back(dir.filename().string());
            for (auto& f : files) {
                index.files.push_back(std::move(f));
                index.labels.push_back(label);
            }
        }
    } else {
        std::map<std::string, std::vector<std::filesystem::path>> groups;
        for (const auto& f : entries) {
            if (!std::filesystem::is_regular_file(f) || !is_image(f)) continue;
            const auto stem = f.stem().string();
            const auto dash = stem.rfind('-');
            groups[dash == std::string::npos ? stem : stem.substr(0, dash)].push_back(f);
        }
        for (auto& [name, files] : groups) {
            const int label = static_cast<int>(index.classes.size());
            index.classes.push_back(name);
            for (auto& f : files) {
                index.files.push_back(std::move(f));
                index.labels.push_back(label);
            }
        }
    }
    if (index.files.empty()) throw ShapeError("no images found under " + root.string());
    return index;
}

LabeledShapes load_dataset(const std::filesystem::path& root) {
    const auto index = scan_dataset(root);
    LabeledShapes shapes;
    shapes.classes = index.classes;
    for (std::size_t i = 0; i < index.files.size(); ++i) {
        shapes.add(load_mask(index.files[i]), index.labels[i], index.files[i].stem().string());
    }
    return shapes;
}

void write_dataset(const LabeledShapes& shapes, const std::filesystem::path& root) {
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto dir = root / shapes.classes[shapes.labels[i]];
        std::filesystem::create_directories(dir);
        write_png(dir / (shapes.names[i] + ".png"), mask_to_gray(shapes.masks[i]));
    }
}

}  // namespace bscp
