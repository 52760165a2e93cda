#include "bscp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bscp/error.hpp"

namespace bscp {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(text) + "'");
    return value;
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

std::string_view to_string(Protocol protocol) {
    return protocol == Protocol::HalfSplit ? "half-split" : "leave-one-out";
}

Protocol parse_protocol(std::string_view text) {
    if (text == "half-split") return Protocol::HalfSplit;
    if (text == "leave-one-out" || text == "loo") return Protocol::LeaveOneOut;
    throw ConfigError("unknown protocol '" + std::string(text) + "'");
}

DescriptorConfig ExperimentConfig::descriptor() const {
    DescriptorConfig d;
    d.critical_points = T;
    d.sample_points = n_s;
    d.reference_points = n_r;
    d.distance_bins = N_d;
    d.orientation_bins = N_o;
    d.thickness_bins = N_td;
    return d;
}

void ExperimentConfig::validate() const {
    auto positive = [](int v, const char* name) {
        if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(N_c, "N_c");
    positive(n_s, "n_s");
    positive(n_r, "n_r");
    positive(N_d, "N_d");
    positive(N_o, "N_o");
    positive(N_td, "N_td");
    positive(K, "K");
    positive(llc_k, "llc_k");
    positive(seeds, "seeds");
    positive(per_shape_cap, "per_shape_cap");
    positive(kmeans_max_iter, "kmeans_max_iter");
    positive(svm_epochs, "svm_epochs");
    if (T < 3) throw ConfigError("T must be at least 3");
    if (N_c < T) throw ConfigError("N_c must be at least T");
    if (N_td % 2 == 0) throw ConfigError("N_td must be odd");
    if (n_r > n_s) throw ConfigError("n_r must not exceed n_s");
    if (llc_k > K) throw ConfigError("llc_k must not exceed K");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
    if (!(prune_ratio >= 0.0 && prune_ratio < 1.0)) throw ConfigError("prune_ratio must lie in [0, 1)");
    if (!(kmeans_tol >= 0.0)) throw ConfigError("kmeans_tol must be non-negative");
    if (threads < 0) throw ConfigError("threads must be non-negative");
    descriptor().validate();
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
    auto integer = [&](int& field) { field = parse_number<int>(key, value); };
    auto real = [&](double& field) { field = parse_number<double>(key, value); };
    if (key == "N_c") integer(c.N_c);
    else if (key == "T") integer(c.T);
    else if (key == "n_s") integer(c.n_s);
    else if (key == "n_r") integer(c.n_r);
    else if (key == "N_d") integer(c.N_d);
    else if (key == "N_o") integer(c.N_o);
    else if (key == "N_td") integer(c.N_td);
    else if (key == "K") integer(c.K);
    else if (key == "llc_k") integer(c.llc_k);
    else if (key == "alpha") real(c.alpha);
    else if (key == "prune_ratio") real(c.prune_ratio);
    else if (key == "seeds") integer(c.seeds);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "protocol") c.protocol = parse_protocol(value);
    else if (key == "per_shape_cap") integer(c.per_shape_cap);
    else if (key == "kmeans_max_iter") integer(c.kmeans_max_iter);
    else if (key == "kmeans_tol") real(c.kmeans_tol);
    else if (key == "svm_epochs") integer(c.svm_epochs);
    else if (key == "threads") integer(c.threads);
    else if (key == "data") c.data = std::string(value);
    else if (key == "out") c.out = std::string(value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig config;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
        const auto key = trim(view.substr(0, eq));
        const auto value = trim(view.substr(eq + 1));
        try {
            set_config_value(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in);
}

std::string format_config(const ExperimentConfig& c) {
    std::ostringstream s;
    s << "N_c = " << c.N_c << "\n"
      << "T = " << c.T << "\n"
      << "n_s = " << c.n_s << "\n"
      << "n_r = " << c.n_r << "\n"
      << "N_d = " << c.N_d << "\n"
      << "N_o = " << c.N_o << "\n"
      << "N_td = " << c.N_td << "\n"
      << "K = " << c.K << "\n"
      << "llc_k = " << c.llc_k << "\n"
      << "alpha = " << format_double(c.alpha) << "\n"
      << "prune_ratio = " << format_double(c.prune_ratio) << "\n"
      << "seeds = " << c.seeds << "\n"
      << "seed = " << c.seed << "\n"
      << "protocol = " << to_string(c.protocol) << "\n"
      << "per_shape_cap = " << c.per_shape_cap << "\n"
      << "kmeans_max_iter = " << c.kmeans_max_iter << "\n"
      << "kmeans_tol = " << format_double(c.kmeans_tol) << "\n"
      << "svm_epochs = " << c.svm_epochs << "\n"
      << "threads = " << c.threads << "\n";
    if (!c.data.empty()) s << "data = " << c.data.string() << "\n";
    if (!c.out.empty()) s << "out = " << c.out.string() << "\n";
    return s.str();
}

}  // namespace bscp
