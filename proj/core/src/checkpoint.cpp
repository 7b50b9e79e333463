#include "irsrl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "irsrl/error.hpp"

namespace irsrl::checkpoint {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  bool at_end() const { return pos_ == bytes_.size(); }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw IoError(fmt::format("checkpoint truncated while reading {} at byte {}", what, pos_));
    }
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  void copy(void* dst, std::size_t n, const char* what) {
    need(n, what);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::size_t element_count(const std::vector<std::uint32_t>& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

}  // namespace

std::vector<std::uint8_t> encode(const std::vector<Tensor>& tensors) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  for (const auto& t : tensors) {
    if (element_count(t.dims) != t.data.size()) {
      throw DimensionError(fmt::format("tensor '{}' dims do not match its data", t.name));
    }
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) put_u32(out, d);
    const auto* raw = reinterpret_cast<const std::uint8_t*>(t.data.data());
    out.insert(out.end(), raw, raw + t.data.size() * sizeof(float));
  }
  return out;
}

std::vector<Tensor> decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw IoError("not a checkpoint file (bad magic)");
  }
  const std::vector<std::uint8_t> body(bytes.begin() + static_cast<long>(kMagic.size()),
                                       bytes.end());
  Reader in(body);
  std::vector<Tensor> tensors;
  while (!in.at_end()) {
    Tensor t;
    const auto name_len = in.u32("name length");
    in.need(name_len, "name");
    t.name.resize(name_len);
    in.copy(t.name.data(), name_len, "name");
    const auto rank = in.u32("rank");
    if (rank > 8) throw IoError(fmt::format("tensor '{}' has implausible rank {}", t.name, rank));
    for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(in.u32("dims"));
    const std::size_t n = element_count(t.dims);
    in.need(n * sizeof(float), "tensor data");
    t.data.resize(n);
    in.copy(t.data.data(), n * sizeof(float), "tensor data");
    tensors.push_back(std::move(t));
  }
  return tensors;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<Tensor>& tensors) {
  const auto bytes = encode(tensors);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", tmp.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot move checkpoint into '{}': {}", path.string(), ec.message()));
}

std::vector<Tensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open checkpoint '{}'", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode(bytes);
}

Tensor matrix_tensor(const std::string& name, const nn::Matrix<float>& m) {
  Tensor t{name, {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())}, {}};
  t.data.resize(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      t.data.data(), m.rows(), m.cols()) = m;
  return t;
}

nn::Matrix<float> tensor_matrix(const Tensor& t) {
  if (t.dims.size() != 2) throw IoError(fmt::format("tensor '{}' is not a matrix", t.name));
  return Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      t.data.data(), t.dims[0], t.dims[1]);
}

const Tensor* find(const std::vector<Tensor>& tensors, std::string_view name) {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void append_params(std::vector<Tensor>& out, const std::string& prefix,
                   const nn::MlpParams<float>& params) {
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    out.push_back(matrix_tensor(fmt::format("{}.w{}", prefix, l), params.weights[l]));
    const auto& b = params.biases[l];
    out.push_back(Tensor{fmt::format("{}.b{}", prefix, l),
                         {static_cast<std::uint32_t>(b.size())},
                         std::vector<float>(b.data(), b.data() + b.size())});
  }
}

void read_params(const std::vector<Tensor>& tensors, const std::string& prefix,
                 nn::MlpParams<float>& params) {
  nn::MlpParams<float> loaded = params;
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    const auto wname = fmt::format("{}.w{}", prefix, l);
    const auto bname = fmt::format("{}.b{}", prefix, l);
    const Tensor* w = find(tensors, wname);
    const Tensor* b = find(tensors, bname);
    if (!w || !b) throw IoError(fmt::format("checkpoint is missing '{}'", w ? bname : wname));
    auto& dst_w = loaded.weights[l];
    auto& dst_b = loaded.biases[l];
    if (w->dims != std::vector<std::uint32_t>{static_cast<std::uint32_t>(dst_w.rows()),
                                              static_cast<std::uint32_t>(dst_w.cols())} ||
        b->dims != std::vector<std::uint32_t>{static_cast<std::uint32_t>(dst_b.size())}) {
      throw IoError(fmt::format("checkpoint tensor shapes for '{}' layer {} do not match", prefix, l));
    }
    dst_w = tensor_matrix(*w);
    dst_b = Eigen::Map<const nn::Vector<float>>(b->data.data(), dst_b.size());
  }
  params = std::move(loaded);
}

}  // namespace irsrl::checkpoint
