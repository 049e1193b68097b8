// Copyright 2026 The dpopt Authors.
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
#include <stdexcept>
#include <string>

namespace dpopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph fails a reachability requirement (disconnected, no spanning tree).
class ConnectivityError : public Error {
 public:
  using Error::Error;
};

/// Coupling matrix violates a spectral requirement (contraction >= 1).
class SpectralError : public Error {
 public:
  using Error::Error;
};

/// Degenerate structure, e.g. a null space of dimension > 1.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Singular normal equations.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A schedule precondition (summability, limit) does not hold.
class ConditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::string variant, std::int64_t iteration)
      : Error("divergence in " + variant + " at k=" + std::to_string(iteration)),
        variant_(std::move(variant)),
        iteration_(iteration) {}

  const std::string& variant() const { return variant_; }
  std::int64_t iteration() const { return iteration_; }

 private:
  std::string variant_;
  std::int64_t iteration_;
};

}  // namespace dpopt
