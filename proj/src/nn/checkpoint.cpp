#include "tow/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tow::nn {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'O', 'W', 'M', 'L', 'P', '\0', '\0'};
constexpr std::uint32_t kMaxLayers = 64;
constexpr std::uint32_t kMaxWidth = 1u << 16;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  std::string finish() {
    const std::uint64_t sum = fnv1a(buf_);
    bytes(&sum, sizeof sum);
    return std::move(buf_);
  }
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  void bytes(void* p, std::size_t n) {
    if (data_.size() - pos_ < n) throw std::runtime_error("checkpoint: truncated stream");
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, sizeof v);
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string save_params_to_string(const Mlp& net) {
  Writer w;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(net.spec().output));
  w.u32(static_cast<std::uint32_t>(net.spec().layer_sizes.size()));
  for (int n : net.spec().layer_sizes) w.u32(static_cast<std::uint32_t>(n));
  for (const auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.f64(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.f64(l.bias(r));
  }
  return w.finish();
}

Mlp load_params_from_string(const std::string& bytes) {
  if (bytes.size() < kMagic.size() + sizeof(std::uint64_t)) throw std::runtime_error("checkpoint: truncated stream");
  const std::string_view body(bytes.data(), bytes.size() - sizeof(std::uint64_t));
  Reader r(bytes);

  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw std::runtime_error("checkpoint: bad magic header");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t activation = r.u32();
  if (activation > static_cast<std::uint32_t>(OutputActivation::Softmax)) {
    throw std::runtime_error("checkpoint: unknown output activation");
  }
  const std::uint32_t count = r.u32();
  if (count < 2 || count > kMaxLayers) throw std::runtime_error("checkpoint: bad layer count");
  MlpSpec spec;
  spec.output = static_cast<OutputActivation>(activation);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t n = r.u32();
    if (n == 0 || n > kMaxWidth) throw std::runtime_error("checkpoint: bad layer size");
    spec.layer_sizes.push_back(static_cast<int>(n));
  }
  std::vector<DenseLayer> layers;
  for (std::uint32_t i = 0; i + 1 < count; ++i) {
    DenseLayer l{Eigen::MatrixXd(spec.layer_sizes[i + 1], spec.layer_sizes[i]),
                 Eigen::VectorXd(spec.layer_sizes[i + 1])};
    for (Eigen::Index row = 0; row < l.weight.rows(); ++row) {
      for (Eigen::Index col = 0; col < l.weight.cols(); ++col) l.weight(row, col) = r.f64();
    }
    for (Eigen::Index row = 0; row < l.bias.size(); ++row) l.bias(row) = r.f64();
    layers.push_back(std::move(l));
  }
  if (r.pos() != body.size()) throw std::runtime_error("checkpoint: trailing or missing bytes");
  std::uint64_t stored = 0;
  r.bytes(&stored, sizeof stored);
  if (stored != Writer::fnv1a(body)) throw std::runtime_error("checkpoint: checksum mismatch");
  Mlp net(std::move(spec), std::move(layers));
  if (!net.all_finite()) throw std::runtime_error("checkpoint: non-finite parameters");
  return net;
}

void save_params(const Mlp& net, std::ostream& out) {
  const std::string bytes = save_params_to_string(net);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

Mlp load_params(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_params_from_string(buf.str());
}

void save_params_file(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  save_params(net, out);
}

Mlp load_params_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return load_params(in);
}

}  // namespace tow::nn
