#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "advtrain/model.hpp"
#include "advtrain/optimizer.hpp"

namespace advtrain {

// Versioned binary checkpoint: model structure, 64-bit little-endian parameter
// payload, optional optimizer state, base RNG seed, free-text provenance note,
// FNV-1a checksum trailer.
struct Checkpoint {
  std::uint32_t version = 1;
  Model model = Model::mlp_classifier(1, 2, {}, 0);
  std::optional<Optimizer::Snapshot> optimizer;
  std::uint64_t rng_seed = 0;
  std::string note;
};

namespace ckpt_detail {

constexpr char kMagic[4] = {'A', 'T', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

inline std::uint64_t fnv1a(const std::uint8_t* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(std::uint8_t(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void tensor(const Tensor& t) {
    u8(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t i = 0; i < t.rank(); ++i) u64(t.dim(i));
    for (std::size_t i = 0; i < t.size(); ++i) f64(t[i]);
  }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(std::vector<std::uint8_t> bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const std::uint8_t* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const std::uint8_t* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    const std::uint32_t len = u32();
    const std::uint8_t* p = take(len);
    return std::string(reinterpret_cast<const char*>(p), len);
  }
  Tensor tensor() {
    const std::uint8_t rank = u8();
    Shape shape(rank);
    for (std::uint8_t i = 0; i < rank; ++i) shape[i] = u64();
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = f64();
    return t;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::uint8_t* raw() const { return bytes_.data(); }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(path_ + ": truncated at offset " + std::to_string(pos_));
    }
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::vector<std::uint8_t> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace ckpt_detail

inline void save_checkpoint(const Checkpoint& ck,
                            const std::filesystem::path& path) {
  using namespace ckpt_detail;
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kVersion);

  const ModelDesc& desc = ck.model.describe();
  w.u32(static_cast<std::uint32_t>(desc.layers.size()));
  for (const LayerDesc& l : desc.layers) {
    w.u8(static_cast<std::uint8_t>(l.kind));
    w.u64(l.in);
    w.u64(l.out);
  }
  w.u64(desc.input_dim);
  w.u64(desc.num_classes);
  w.u64(desc.geom.channels);
  w.u64(desc.geom.height);
  w.u64(desc.geom.width);

  w.u32(static_cast<std::uint32_t>(ck.model.params().size()));
  for (const Tensor& p : ck.model.params()) w.tensor(p);

  w.u8(ck.optimizer ? 1 : 0);
  if (ck.optimizer) {
    const Optimizer::Snapshot& s = *ck.optimizer;
    w.u8(static_cast<std::uint8_t>(s.cfg.kind));
    if (s.cfg.kind == OptimizerConfig::Kind::Sgd) {
      w.f64(s.cfg.momentum);
      w.f64(s.cfg.weight_decay);
    } else {
      w.f64(s.cfg.beta1);
      w.f64(s.cfg.beta2);
      w.f64(s.cfg.adam_eps);
    }
    w.u64(static_cast<std::uint64_t>(s.step));
    w.u32(static_cast<std::uint32_t>(s.buffers.size()));
    for (const Tensor& b : s.buffers) w.tensor(b);
  }

  w.u64(ck.rng_seed);
  w.str(ck.note);

  const std::uint64_t checksum =
      fnv1a(w.bytes().data(), w.bytes().size());
  Writer trailer;
  trailer.u64(checksum);

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FormatError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  out.write(reinterpret_cast<const char*>(trailer.bytes().data()), 8);
  if (!out) throw FormatError(path.string() + ": write failed");
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  using namespace ckpt_detail;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 16)
    throw FormatError(path.string() + ": too short to be a checkpoint");

  // Verify the checksum over everything but the 8-byte trailer.
  const std::size_t body = bytes.size() - 8;
  const std::uint64_t expect = fnv1a(bytes.data(), body);
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i)
    stored |= std::uint64_t(bytes[body + i]) << (8 * i);
  if (stored != expect) {
    throw FormatError(path.string() + ": checksum mismatch (stored " +
                      std::to_string(stored) + ", computed " +
                      std::to_string(expect) + ")");
  }

  bytes.resize(body);
  Reader r(std::move(bytes), path.string());
  for (char c : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(c))
      throw FormatError(path.string() + ": bad magic at offset " +
                        std::to_string(r.pos() - 1));
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw FormatError(path.string() + ": unsupported version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kVersion) + ")");
  }

  ModelDesc desc;
  const std::uint32_t nlayers = r.u32();
  desc.layers.resize(nlayers);
  for (std::uint32_t i = 0; i < nlayers; ++i) {
    desc.layers[i].kind = static_cast<LayerKind>(r.u8());
    desc.layers[i].in = r.u64();
    desc.layers[i].out = r.u64();
  }
  desc.input_dim = r.u64();
  desc.num_classes = r.u64();
  desc.geom.channels = r.u64();
  desc.geom.height = r.u64();
  desc.geom.width = r.u64();

  const std::uint32_t nparams = r.u32();
  std::vector<Tensor> params;
  params.reserve(nparams);
  for (std::uint32_t i = 0; i < nparams; ++i) params.push_back(r.tensor());

  Checkpoint ck;
  ck.version = version;
  ck.model = Model::from_description(std::move(desc), std::move(params));

  if (r.u8()) {
    Optimizer::Snapshot s;
    s.cfg.kind = static_cast<OptimizerConfig::Kind>(r.u8());
    if (s.cfg.kind == OptimizerConfig::Kind::Sgd) {
      s.cfg.momentum = r.f64();
      s.cfg.weight_decay = r.f64();
    } else {
      s.cfg.beta1 = r.f64();
      s.cfg.beta2 = r.f64();
      s.cfg.adam_eps = r.f64();
    }
    s.step = static_cast<std::int64_t>(r.u64());
    const std::uint32_t nbuf = r.u32();
    for (std::uint32_t i = 0; i < nbuf; ++i) s.buffers.push_back(r.tensor());
    ck.optimizer = std::move(s);
  }

  ck.rng_seed = r.u64();
  ck.note = r.str();
  return ck;
}

}  // namespace advtrain
