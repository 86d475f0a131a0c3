/*
 * Copyright 2026 The beamshift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BEAMSHIFT_ERROR_HPP
#define BEAMSHIFT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace beamshift {

// Broken precondition or type invariant: a programming error on the caller's
// side.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Input data that cannot be used (bad files, too little data, diverging
// training). The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MalformedRow : public DataError {
public:
  MalformedRow(std::size_t line, const std::string &what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class OutOfBounds : public DataError {
public:
  using DataError::DataError;
};

class NonMonotonicTime : public DataError {
public:
  using DataError::DataError;
};

class EmptyFilterResult : public DataError {
public:
  using DataError::DataError;
};

class NotEnoughVisibleBeams : public DataError {
public:
  using DataError::DataError;
};

class TooFewSamples : public DataError {
public:
  using DataError::DataError;
};

class NonFiniteLoss : public DataError {
public:
  using DataError::DataError;
};

class CorruptModelFile : public DataError {
public:
  using DataError::DataError;
};

// Bad configuration value; the message starts with the offending key path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &key, const std::string &what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string &key() const { return key_; }

private:
  std::string key_;
};

inline void expects(bool condition, const char *message) {
  if (!condition) {
    throw ContractViolation(message);
  }
}

} // namespace beamshift

#endif // BEAMSHIFT_ERROR_HPP
