#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "bscp/descriptor.hpp"

namespace bscp {

enum class Protocol { HalfSplit, LeaveOneOut };

std::string_view to_string(Protocol protocol);
/// Accepts "half-split", "leave-one-out" and "loo".
Protocol parse_protocol(std::string_view text);

struct ExperimentConfig {
    int N_c = 256;
    int T = 10;
    int n_s = 50;
    int n_r = 5;
    int N_d = 5;
    int N_o = 12;
    int N_td = 5;
    int K = 2500;
    int llc_k = 5;
    double alpha = 10.0;
    double prune_ratio = 0.08;
    int seeds = 10;               ///< number of half-split repetitions
    std::uint64_t seed = 0;       ///< repetition r uses seed + r
    Protocol protocol = Protocol::HalfSplit;
    int per_shape_cap = 30;       ///< parts per shape fed to k-means
    int kmeans_max_iter = 100;
    double kmeans_tol = 1e-4;
    int svm_epochs = 200;
    int threads = 0;              ///< 0 = hardware concurrency
    std::filesystem::path data;
    std::filesystem::path out;

    DescriptorConfig descriptor() const;
    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

/// Sets one field from its textual value. Throws ConfigError for an unknown
/// key or a malformed value.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// `key = value` lines; `#` starts a comment, blank lines are ignored.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every field as `key = value`, parseable by parse_config.
std::string format_config(const ExperimentConfig& config);

}  // namespace bscp
