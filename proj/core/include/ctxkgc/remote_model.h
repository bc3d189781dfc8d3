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

#ifndef CTXKGC_REMOTE_MODEL_H_
#define CTXKGC_REMOTE_MODEL_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxkgc/model.h"

namespace ctxkgc {

struct RemoteModelOptions {
  // "http://host:port", optionally with a path prefix.
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
  // Largest number of outputs per /v1/score request and samples per
  // /v1/sample request.
  std::size_t max_batch = 256;
  std::size_t max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::size_t max_connections = 8;
};

struct HealthStatus {
  std::string status;
  std::string model;
};

// SequenceModel over the JSON/HTTP wire protocol:
//
//   POST /v1/sample   {"input", "n", "max_new_tokens", "seed"?}
//                     -> {"samples": [{"text", "logprob"}]}
//   POST /v1/score    {"input", "outputs": [str]} -> {"logprobs": [float]}
//   POST /v1/tokenize {"text"} -> {"count": int}
//   GET  /v1/health   -> {"status": "ok", "model": str}
//
// Non-2xx responses carry {"error": str}. Transport failures and 5xx
// responses are retried with exponential backoff; other failures are not.
// Throws TimeoutError, TransportError, HttpStatusError or ProtocolError.
class RemoteModel final : public SequenceModel {
 public:
  explicit RemoteModel(RemoteModelOptions options);
  ~RemoteModel() override;

  std::vector<Sample> DrawSamples(std::string_view input, std::size_t n,
                                  std::size_t max_new_tokens,
                                  std::optional<std::uint64_t> seed) override;
  std::vector<double> ScoreOutputs(
      std::string_view input, std::span<const std::string> outputs) override;
  std::size_t CountTokens(std::string_view text) override;
  std::string name() const override;

  HealthStatus Health();

  // Requests issued so far, including retries.
  std::size_t requests_sent() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ctxkgc

#endif  // CTXKGC_REMOTE_MODEL_H_
