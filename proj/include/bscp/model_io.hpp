#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "bscp/classifier.hpp"
#include "bscp/codebook.hpp"
#include "bscp/config.hpp"
#include "bscp/descriptor.hpp"

namespace bscp {

inline constexpr std::uint16_t kModelVersion = 1;

/// Everything needed to classify new shapes.
struct ModelBundle {
    ExperimentConfig config;
    Codebook codebook;
    SvmModel svm;

    BinGeometry bins() const { return BinGeometry::from(config.descriptor()); }
    /// Throws FormatError when config, codebook and weights disagree.
    void check_dimensions() const;
};

/// Equality of every persisted field (config parameters, codebook, weights,
/// labels, alpha, training metadata), compared bitwise.
bool same_persisted(const ModelBundle& a, const ModelBundle& b);

/// "BSCP", u16 version, eleven u32 (N_c, T, n_s, n_r, N_d, N_o, N_td, K,
/// llc_k, L, D), f64 distance and thickness edges, f32 codebook (K x D) and
/// weights (L x 21K) row-major, then a trailer: f64 prune_ratio, f64 alpha,
/// u32 epochs, f64 final objective and L labels as u32 length + bytes.
/// Everything little-endian.
void write_model(std::ostream& out, const ModelBundle& bundle);
ModelBundle read_model(std::istream& in);

void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

/// Byte size of a model file with the given dimensions and label bytes.
std::uint64_t model_file_size(int N_d, int N_td, int K, int D, int L, std::uint64_t label_bytes);

/// Descriptor dump: "BSCD", u32 rows, u32 cols, f32 row-major.
void write_matrix(std::ostream& out, const DescriptorMatrix& m);
DescriptorMatrix read_matrix(std::istream& in);

}  // namespace bscp
