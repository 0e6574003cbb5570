/* Copyright 2026 The Cyclotrack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef CYCLOTRACK_ERROR_HPP_
#define CYCLOTRACK_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cyclotrack {

// Broad failure families. The CLI maps these onto exit codes.
enum class ErrorKind {
  kConfig,    // bad flags, bad config file, invalid arguments
  kData,      // malformed or inconsistent input data
  kInternal,  // invariant broken inside the engine
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& message)
      : std::runtime_error(message), kind_(kind), name_(std::move(name)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Short machine-readable tag, e.g. "OutOfGrid".
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg)
      : Error(ErrorKind::kConfig, "ConfigError", msg) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg)
      : Error(ErrorKind::kConfig, "InvalidArgument", msg) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg)
      : Error(ErrorKind::kData, "FormatError", msg) {}
};

class OutOfGridError : public Error {
 public:
  explicit OutOfGridError(const std::string& msg)
      : Error(ErrorKind::kData, "OutOfGrid", msg) {}
};

class CoverageError : public Error {
 public:
  explicit CoverageError(const std::string& msg)
      : Error(ErrorKind::kData, "CoverageError", msg) {}
};

class OutOfWindowError : public Error {
 public:
  explicit OutOfWindowError(const std::string& msg)
      : Error(ErrorKind::kData, "OutOfWindow", msg) {}
};

class InsufficientCandidatesError : public Error {
 public:
  InsufficientCandidatesError(std::size_t available, std::size_t requested)
      : Error(ErrorKind::kData, "InsufficientCandidates",
              "only " + std::to_string(available) +
                  " eligible timestamps for " + std::to_string(requested) +
                  " requested samples"),
        available_(available),
        requested_(requested) {}

  std::size_t available() const noexcept { return available_; }
  std::size_t requested() const noexcept { return requested_; }

 private:
  std::size_t available_;
  std::size_t requested_;
};

class EmptyOverlapError : public Error {
 public:
  explicit EmptyOverlapError(const std::string& msg)
      : Error(ErrorKind::kData, "EmptyOverlap", msg) {}
};

// Raised by the network executor. `layer()` is the zero-based index of the
// offending layer, or -1 for the declared input.
class ShapeError : public Error {
 public:
  ShapeError(int layer, const std::string& msg)
      : Error(ErrorKind::kData, "ShapeError",
              "layer " + std::to_string(layer) + ": " + msg),
        layer_(layer) {}

  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

}  // namespace cyclotrack

#endif  // CYCLOTRACK_ERROR_HPP_
