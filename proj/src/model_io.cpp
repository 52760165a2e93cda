#include "bscp/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "bscp/encoding.hpp"
#include "bscp/error.hpp"

namespace bscp {
namespace {

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

constexpr std::array<char, 4> kModelMagic{'B', 'S', 'C', 'P'};
constexpr std::array<char, 4> kMatrixMagic{'B', 'S', 'C', 'D'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated file");
    return v;
}

void put_floats(std::ostream& out, const float* data, std::size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(float)));
}

void get_floats(std::istream& in, float* data, std::size_t n) {
    if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(float))))
        throw FormatError("truncated file");
}

std::uint32_t checked_u32(int v) {
    if (v < 0) throw FormatError("negative dimension");
    return static_cast<std::uint32_t>(v);
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

template <typename M>
bool same_matrix(const M& a, const M& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(typename M::Scalar) * a.size()) == 0;
}

}  // namespace

void ModelBundle::check_dimensions() const {
    const auto d = config.descriptor();
    if (codebook.size() != config.K) throw FormatError("codebook size differs from K");
    if (codebook.dimension() != d.dimension()) throw FormatError("codebook dimension differs from descriptor size");
    if (svm.dimension() != kPyramidRegions * config.K) throw FormatError("SVM weights do not span 21K dimensions");
    if (svm.classes() < 2 || static_cast<int>(svm.class_labels.size()) != svm.classes())
        throw FormatError("SVM label count mismatch");
}

bool same_persisted(const ModelBundle& a, const ModelBundle& b) {
    const auto& x = a.config;
    const auto& y = b.config;
    return x.N_c == y.N_c && x.T == y.T && x.n_s == y.n_s && x.n_r == y.n_r && x.N_d == y.N_d && x.N_o == y.N_o &&
           x.N_td == y.N_td && x.K == y.K && x.llc_k == y.llc_k && same_bits(x.prune_ratio, y.prune_ratio) &&
           same_bits(x.alpha, y.alpha) && same_matrix(a.codebook.entries, b.codebook.entries) &&
           same_matrix(a.svm.weights, b.svm.weights) && a.svm.class_labels == b.svm.class_labels &&
           same_bits(a.svm.alpha, b.svm.alpha) && a.svm.epochs == b.svm.epochs &&
           same_bits(a.svm.final_objective, b.svm.final_objective);
}

void write_model(std::ostream& out, const ModelBundle& b) {
    b.check_dimensions();
    const auto& c = b.config;
    const auto bins = b.bins();
    out.write(kModelMagic.data(), kModelMagic.size());
    put<std::uint16_t>(out, kModelVersion);
    for (int v : {c.N_c, c.T, c.n_s, c.n_r, c.N_d, c.N_o, c.N_td, c.K, c.llc_k, b.svm.classes(),
                  b.codebook.dimension()})
        put(out, checked_u32(v));
    for (double e : bins.distance_edges) put(out, e);
    for (double e : bins.thickness_edges) put(out, e);
    put_floats(out, b.codebook.entries.data(), b.codebook.entries.size());
    put_floats(out, b.svm.weights.data(), b.svm.weights.size());
    put(out, c.prune_ratio);
    put(out, b.svm.alpha);
    put(out, checked_u32(b.svm.epochs));
    put(out, b.svm.final_objective);
    for (const auto& label : b.svm.class_labels) {
        put(out, static_cast<std::uint32_t>(label.size()));
        out.write(label.data(), static_cast<std::streamsize>(label.size()));
    }
    if (!out) throw FormatError("failed to write model");
}

ModelBundle read_model(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size())) throw FormatError("truncated file");
    if (magic != kModelMagic) throw FormatError("not a BSCP model (bad magic): version mismatch");
    if (const auto version = get<std::uint16_t>(in); version != kModelVersion)
        throw FormatError("unsupported model version " + std::to_string(version));

    std::array<std::uint32_t, 11> h{};
    for (auto& v : h) v = get<std::uint32_t>(in);
    for (auto v : h)
        if (v == 0 || v > (1u << 28)) throw FormatError("implausible header dimension");

    ModelBundle b;
    auto& c = b.config;
    c.N_c = static_cast<int>(h[0]);
    c.T = static_cast<int>(h[1]);
    c.n_s = static_cast<int>(h[2]);
    c.n_r = static_cast<int>(h[3]);
    c.N_d = static_cast<int>(h[4]);
    c.N_o = static_cast<int>(h[5]);
    c.N_td = static_cast<int>(h[6]);
    c.K = static_cast<int>(h[7]);
    c.llc_k = static_cast<int>(h[8]);
    const auto L = static_cast<Eigen::Index>(h[9]);
    const auto D = static_cast<Eigen::Index>(h[10]);
    if (D != c.descriptor().dimension()) throw FormatError("descriptor dimension inconsistent with header");

    BinGeometry expected;
    try {
        expected = BinGeometry::from(c.descriptor());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("invalid header: ") + e.what());
    }
    for (double e : expected.distance_edges)
        if (!same_bits(get<double>(in), e)) throw FormatError("distance bin edges inconsistent with header");
    for (double e : expected.thickness_edges)
        if (!same_bits(get<double>(in), e)) throw FormatError("thickness bin edges inconsistent with header");

    b.codebook.entries.resize(c.K, D);
    get_floats(in, b.codebook.entries.data(), b.codebook.entries.size());
    b.codebook.geometry_fingerprint = expected.fingerprint();
    b.svm.weights.resize(L, static_cast<Eigen::Index>(kPyramidRegions) * c.K);
    get_floats(in, b.svm.weights.data(), b.svm.weights.size());

    c.prune_ratio = get<double>(in);
    c.alpha = get<double>(in);
    b.svm.alpha = c.alpha;
    b.svm.epochs = static_cast<int>(get<std::uint32_t>(in));
    b.svm.final_objective = get<double>(in);
    for (Eigen::Index l = 0; l < L; ++l) {
        const auto n = get<std::uint32_t>(in);
        if (n > 4096) throw FormatError("implausible label length");
        std::string label(n, '\0');
        if (!in.read(label.data(), n)) throw FormatError("truncated file");
        b.svm.class_labels.push_back(std::move(label));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after model");
    b.check_dimensions();
    return b;
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    write_model(out, bundle);
}

ModelBundle load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return read_model(in);
}

std::uint64_t model_file_size(int N_d, int N_td, int K, int D, int L, std::uint64_t label_bytes) {
    const std::uint64_t header = 4 + 2 + 11 * 4;
    const std::uint64_t edges = 8ull * (N_d + 1 + N_td + 1);
    const std::uint64_t payload = 4ull * K * D + 4ull * L * kPyramidRegions * K;
    const std::uint64_t trailer = 8 + 8 + 4 + 8 + 4ull * L + label_bytes;
    return header + edges + payload + trailer;
}

void write_matrix(std::ostream& out, const DescriptorMatrix& m) {
    out.write(kMatrixMagic.data(), kMatrixMagic.size());
    put(out, static_cast<std::uint32_t>(m.rows()));
    put(out, static_cast<std::uint32_t>(m.cols()));
    put_floats(out, m.data(), m.size());
    if (!out) throw FormatError("failed to write matrix");
}

DescriptorMatrix read_matrix(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMatrixMagic) throw FormatError("bad descriptor magic");
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    DescriptorMatrix m(rows, cols);
    get_floats(in, m.data(), m.size());
    return m;
}

}  // namespace bscp
