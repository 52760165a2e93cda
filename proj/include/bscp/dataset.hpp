#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bscp/shape_io.hpp"

namespace bscp {

/// Shapes with class ids indexing `classes`.
struct LabeledShapes {
    std::vector<std::string> classes;
    std::vector<BinaryMask> masks;
    std::vector<int> labels;
    std::vector<std::string> names;

    std::size_t size() const { return masks.size(); }
    std::vector<int> class_counts() const;
    void add(BinaryMask mask, int label, std::string name);
};

/// Image files of a dataset directory, sorted by class then file name.
///
/// Two layouts are recognised: one sub-directory per class holding the
/// images, or a flat directory of `<class>-<n>.<ext>` files. Extensions
/// .png, .pgm and .pnm are read; everything else is ignored.
/// Throws ShapeError when the directory holds no images.
struct DatasetIndex {
    std::vector<std::string> classes;
    std::vector<std::filesystem::path> files;
    std::vector<int> labels;
};

DatasetIndex scan_dataset(const std::filesystem::path& root);
LabeledShapes load_dataset(const std::filesystem::path& root);

/// Writes `<root>/<class>/<name>.png` for every shape.
void write_dataset(const LabeledShapes& shapes, const std::filesystem::path& root);

}  // namespace bscp
