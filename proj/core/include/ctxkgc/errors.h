/*
 * Copyright 2026 The ctxkgc Authors.
 *
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

#ifndef CTXKGC_ERRORS_H_
#define CTXKGC_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctxkgc {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset content is unusable (missing mentions, empty train split, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// A dataset or snapshot file could not be parsed.
class ParseError : public DataError {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what);

  const std::string& path() const { return path_; }
  // 1-based; 0 when the error is not tied to a line (binary snapshots).
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

// Triples reference ids for which a mention file has no entry.
class MissingMentionError : public DataError {
 public:
  MissingMentionError(std::string kind, std::vector<std::string> ids);

  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// Base class for failures talking to a sequence-model backend.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Connection could not be established or was dropped. Retryable.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

// The backend answered with a non-2xx status.
class HttpStatusError : public BackendError {
 public:
  HttpStatusError(int status, const std::string& message);

  int status() const { return status_; }

 private:
  int status_;
};

// The backend answered 2xx but the payload violates the wire contract.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace ctxkgc

#endif  // CTXKGC_ERRORS_H_
