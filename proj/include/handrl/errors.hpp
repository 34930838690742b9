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

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace handrl {

// Invalid parameters or configuration values. `key()` names the offending
// setting when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, std::string key = {})
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A caller broke a precondition (length mismatch, index out of range, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The physics state became non-finite.
class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(const std::string& message, std::int64_t step_index)
      : std::runtime_error(message + " (step " + std::to_string(step_index) + ")"),
        step_index_(step_index) {}
  std::int64_t step_index() const noexcept { return step_index_; }

 private:
  std::int64_t step_index_;
};

// Non-finite network output, loss or gradient. `index` is the minibatch
// index for loss errors and -1 otherwise.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& message, std::int64_t index = -1)
      : std::runtime_error(index >= 0 ? message + " (minibatch " + std::to_string(index) + ")"
                                      : message),
        index_(index) {}
  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& message, const std::filesystem::path& path)
      : std::runtime_error(message + ": " + path.string()), path_(path) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace handrl
