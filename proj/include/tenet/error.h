// Copyright 2026 The TENet Authors. All Rights Reserved.
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

#ifndef TENET_ERROR_H_
#define TENET_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tenet {

// Base class of every error raised by the library. Errors are fatal to the
// operation that raised them unless a narrower subclass says otherwise.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown config keys, out-of-range hyperparameters,
// unknown backbone names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data files.
class DataError : public Error {
 public:
  using Error::Error;
};

// A single image could not be read or decoded. Callers may skip the sample.
class ImageDecodeError : public DataError {
 public:
  using DataError::DataError;
};

// Tensor shape contract violated.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Training produced a NaN or infinite loss.
class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(int epoch, std::int64_t batch_index, double value)
      : Error("non-finite loss " + std::to_string(value) + " at epoch " +
              std::to_string(epoch) + ", batch " +
              std::to_string(batch_index)),
        epoch_(epoch),
        batch_index_(batch_index) {}

  int epoch() const { return epoch_; }
  std::int64_t batch_index() const { return batch_index_; }

 private:
  int epoch_;
  std::int64_t batch_index_;
};

}  // namespace tenet

#endif  // TENET_ERROR_H_
