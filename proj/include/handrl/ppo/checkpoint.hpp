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

// Policy checkpoint file. Integers and floats are little-endian.
//
//   offset  type        field
//   0       char[8]     magic "HANDRLCK"
//   8       u32         format version (1)
//   12      u32         obs_dim
//   16      u32         act_dim
//   20      u32         hidden layer count H
//   24      u32 x H     hidden layer widths
//   ..      u64         Adam step counter
//   ..      u64         parameter count P
//   ..      f64 x P     parameters: actor layers, critic layers, log_std;
//                       each layer is weights [out][in] then biases
//   ..      f64 x P     Adam first moments (same order)
//   ..      f64 x P     Adam second moments (same order)

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "handrl/ppo/policy.hpp"

namespace handrl::ppo {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const PolicyParams& params);
// Throws ContractError on a malformed buffer.
PolicyParams decode_checkpoint(std::span<const std::uint8_t> bytes);

// Throw IoError (with the path) on I/O failure or a malformed file.
void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_checkpoint(const std::filesystem::path& path);

}  // namespace handrl::ppo
