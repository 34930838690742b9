// Copyright 2026 The handrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "handrl/ppo/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "handrl/errors.hpp"

namespace handrl::ppo {
namespace {

constexpr std::string_view kMagic = "HANDRLCK";

class Writer {
 public:
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u64(std::uint64_t v) { little_endian(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void little_endian(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  std::uint64_t u64() { return little_endian(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw ContractError("checkpoint is truncated");
  }
  std::uint64_t little_endian(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const PolicyParams& params) {
  const ParamLayout& layout = params.layout;
  if (params.values.size() != layout.size || params.adam.m.size() != layout.size ||
      params.adam.v.size() != layout.size) {
    throw ContractError("policy parameters do not match their layout");
  }
  Writer w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(layout.obs_dim));
  w.u32(static_cast<std::uint32_t>(layout.act_dim));
  w.u32(static_cast<std::uint32_t>(layout.hidden.size()));
  for (int h : layout.hidden) w.u32(static_cast<std::uint32_t>(h));
  w.u64(static_cast<std::uint64_t>(params.adam.step));
  w.u64(layout.size);
  for (double v : params.values) w.f64(v);
  for (double v : params.adam.m) w.f64(v);
  for (double v : params.adam.v) w.f64(v);
  return w.take();
}

PolicyParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.bytes(kMagic.size()) != kMagic) throw ContractError("not a checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw ContractError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto obs_dim = static_cast<int>(r.u32());
  const auto act_dim = static_cast<int>(r.u32());
  const std::uint32_t layers = r.u32();
  if (layers > 64) throw ContractError("checkpoint declares too many hidden layers");
  std::vector<int> hidden;
  for (std::uint32_t i = 0; i < layers; ++i) {
    const std::uint32_t width = r.u32();
    if (width == 0 || width > (1u << 20)) throw ContractError("checkpoint layer width out of range");
    hidden.push_back(static_cast<int>(width));
  }
  PolicyParams p;
  p.layout = ParamLayout::make(obs_dim, act_dim, hidden);
  p.adam.step = static_cast<std::int64_t>(r.u64());
  if (r.u64() != p.layout.size) throw ContractError("checkpoint parameter count mismatch");
  const auto read_block = [&](std::vector<double>& out) {
    out.resize(p.layout.size);
    for (double& v : out) v = r.f64();
  };
  read_block(p.values);
  read_block(p.adam.m);
  read_block(p.adam.v);
  if (!r.done()) throw ContractError("checkpoint has trailing bytes");
  return p;
}

void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing", path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint", path);
}

PolicyParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint", path);
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  try {
    return decode_checkpoint(bytes);
  } catch (const ContractError& e) {
    throw IoError(std::string("malformed checkpoint (") + e.what() + ")", path);
  }
}

}  // namespace handrl::ppo
