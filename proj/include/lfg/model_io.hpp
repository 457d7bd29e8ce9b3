#pragma once

// Model file layout, version 1 (all integers and floats little-endian):
//
//   offset  size  field
//   0       4     magic "LFGM"
//   4       4     u32 format version (1)
//   8       4     u32 scalar width in bytes (4 = float, 8 = double)
//   12      4     u32 factor count k
//   16      8     u64 user count U
//   24      8     u64 item count I
//   32      8     f64 global mean
//   40      8·U   i64 external user ids, by internal index
//   ..      8·I   i64 external item ids, by internal index
//   ..      s·U   user biases
//   ..      s·I   item biases
//   ..      s·U·k user factors, row-major
//   ..      s·I·k item factors, row-major

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "lfg/error.hpp"
#include "lfg/factorization.hpp"

namespace lfg {

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr char kModelMagic[4] = {'L', 'F', 'G', 'M'};

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

namespace detail {

class ByteWriter {
 public:
  template <typename T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    out_.append(p, sizeof(T));
  }
  void put_raw(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}

  template <typename T>
  T get() {
    T v;
    get_raw(&v, sizeof(T));
    return v;
  }
  void get_raw(void* dst, std::size_t n) {
    if (in_.size() - pos_ < n) throw Error("truncated_model", "model payload truncated at byte " + std::to_string(pos_));
    std::memcpy(dst, in_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const noexcept { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

template <typename Scalar>
std::string save_model(const BasicFactorModel<Scalar>& m) {
  detail::ByteWriter w;
  w.put_raw(kModelMagic, sizeof kModelMagic);
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint32_t>(sizeof(Scalar));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.factor_count()));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(m.user_count()));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(m.item_count()));
  w.put<double>(static_cast<double>(m.global_mean));
  for (ExternalId id : m.users.externals()) w.put<std::int64_t>(id);
  for (ExternalId id : m.items.externals()) w.put<std::int64_t>(id);
  w.put_raw(m.user_bias.data(), sizeof(Scalar) * static_cast<std::size_t>(m.user_bias.size()));
  w.put_raw(m.item_bias.data(), sizeof(Scalar) * static_cast<std::size_t>(m.item_bias.size()));
  w.put_raw(m.user_factors.data(), sizeof(Scalar) * static_cast<std::size_t>(m.user_factors.size()));
  w.put_raw(m.item_factors.data(), sizeof(Scalar) * static_cast<std::size_t>(m.item_factors.size()));
  return w.take();
}

struct ModelHeader {
  std::uint32_t version = 0;
  std::uint32_t scalar_bytes = 0;
  std::uint32_t factor_count = 0;
  std::uint64_t user_count = 0;
  std::uint64_t item_count = 0;
  double global_mean = 0;
};

inline ModelHeader read_model_header(std::string_view bytes) {
  detail::ByteReader r(bytes);
  char magic[4];
  r.get_raw(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) throw Error("bad_model", "not a model file (bad magic)");
  ModelHeader h;
  h.version = r.get<std::uint32_t>();
  if (h.version != kModelFormatVersion)
    throw Error("model_version", "unsupported model format version " + std::to_string(h.version));
  h.scalar_bytes = r.get<std::uint32_t>();
  h.factor_count = r.get<std::uint32_t>();
  h.user_count = r.get<std::uint64_t>();
  h.item_count = r.get<std::uint64_t>();
  h.global_mean = r.get<double>();
  return h;
}

template <typename Scalar = double>
BasicFactorModel<Scalar> load_model(std::string_view bytes) {
  const ModelHeader h = read_model_header(bytes);
  if (h.scalar_bytes != sizeof(Scalar))
    throw Error("model_version", "model stores " + std::to_string(h.scalar_bytes) + "-byte scalars");
  detail::ByteReader r(bytes);
  char skip[40];  // fixed-size header, already validated
  r.get_raw(skip, sizeof skip);

  // Reject impossible counts before allocating.
  const std::uint64_t per_user = 8 + sizeof(Scalar) * (1 + std::uint64_t{h.factor_count});
  const std::uint64_t per_item = per_user;
  if (h.user_count > bytes.size() / per_user || h.item_count > bytes.size() / per_item)
    throw Error("truncated_model", "model payload shorter than its header claims");

  const auto users = static_cast<Eigen::Index>(h.user_count);
  const auto items = static_cast<Eigen::Index>(h.item_count);
  BasicFactorModel<Scalar> m(users, items, static_cast<Eigen::Index>(h.factor_count));
  m.global_mean = static_cast<Scalar>(h.global_mean);

  std::vector<ExternalId> ext(static_cast<std::size_t>(users));
  r.get_raw(ext.data(), ext.size() * sizeof(ExternalId));
  m.users = IdMap::from_externals(std::move(ext));
  ext.assign(static_cast<std::size_t>(items), 0);
  r.get_raw(ext.data(), ext.size() * sizeof(ExternalId));
  m.items = IdMap::from_externals(std::move(ext));

  r.get_raw(m.user_bias.data(), sizeof(Scalar) * static_cast<std::size_t>(m.user_bias.size()));
  r.get_raw(m.item_bias.data(), sizeof(Scalar) * static_cast<std::size_t>(m.item_bias.size()));
  r.get_raw(m.user_factors.data(), sizeof(Scalar) * static_cast<std::size_t>(m.user_factors.size()));
  r.get_raw(m.item_factors.data(), sizeof(Scalar) * static_cast<std::size_t>(m.item_factors.size()));
  if (!r.at_end()) throw Error("bad_model", "trailing bytes after model payload");
  return m;
}

template <typename Scalar>
void save_model_file(const BasicFactorModel<Scalar>& m, const std::filesystem::path& path) {
  const std::string bytes = save_model(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("io", "cannot write model file " + path.string());
}

template <typename Scalar = double>
BasicFactorModel<Scalar> load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open model file " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_model<Scalar>(bytes);
}

}  // namespace lfg
