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

#include "ctxkgc/remote_model.h"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <utility>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "ctxkgc/errors.h"

namespace ctxkgc {

using json = nlohmann::json;

class RemoteModel::Impl {
 public:
  explicit Impl(RemoteModelOptions options) : options_(std::move(options)) {
    if (options_.max_batch == 0) throw ConfigError("max_batch must be at least 1");
    if (options_.max_attempts == 0) options_.max_attempts = 1;
    if (options_.max_connections == 0) options_.max_connections = 1;
    const auto scheme = options_.endpoint.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto path_start = options_.endpoint.find('/', host_start);
    if (path_start == std::string::npos) {
      base_ = options_.endpoint;
    } else {
      base_ = options_.endpoint.substr(0, path_start);
      prefix_ = options_.endpoint.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
    if (base_.empty() || host_start == base_.size()) {
      throw ConfigError(fmt::format("invalid backend endpoint '{}'", options_.endpoint));
    }
  }

  json Call(const std::string& method, const std::string& path, const json* body) {
    const std::string url = prefix_ + path;
    const std::string payload = body ? body->dump() : std::string();
    for (std::size_t attempt = 1;; ++attempt) {
      try {
        return CallOnce(method, url, payload);
      } catch (const TransportError&) {
        if (attempt >= options_.max_attempts) throw;
      } catch (const HttpStatusError& e) {
        if (e.status() < 500 || attempt >= options_.max_attempts) throw;
      }
      std::this_thread::sleep_for(options_.initial_backoff * (1LL << (attempt - 1)));
    }
  }

  const RemoteModelOptions& options() const { return options_; }
  std::size_t requests_sent() const { return requests_.load(); }

 private:
  struct Lease {
    Impl* pool;
    std::unique_ptr<httplib::Client> client;
    ~Lease() { pool->Release(std::move(client)); }
  };

  Lease Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !idle_.empty() || created_ < options_.max_connections; });
    if (!idle_.empty()) {
      auto client = std::move(idle_.back());
      idle_.pop_back();
      return Lease{this, std::move(client)};
    }
    ++created_;
    lock.unlock();
    auto client = MakeClient();
    return Lease{this, std::move(client)};
  }

  std::unique_ptr<httplib::Client> MakeClient() const {
    auto client = std::make_unique<httplib::Client>(base_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
        options_.timeout - seconds);
    client->set_connection_timeout(seconds.count(), micros.count());
    client->set_read_timeout(seconds.count(), micros.count());
    client->set_write_timeout(seconds.count(), micros.count());
    client->set_keep_alive(true);
    client->set_tcp_nodelay(true);
    return client;
  }

  void Release(std::unique_ptr<httplib::Client> client) {
    {
      std::lock_guard lock(mu_);
      idle_.push_back(std::move(client));
    }
    cv_.notify_one();
  }

  json CallOnce(const std::string& method, const std::string& url,
                const std::string& payload) {
    Lease lease = Acquire();
    ++requests_;
    const auto start = std::chrono::steady_clock::now();
    httplib::Result res = method == "GET"
                              ? lease.client->Get(url)
                              : lease.client->Post(url, payload, "application/json");
    if (!res) {
      const auto err = res.error();
      const auto elapsed = std::chrono::steady_clock::now() - start;
      const bool timed_out =
          err == httplib::Error::ConnectionTimeout ||
          ((err == httplib::Error::Read || err == httplib::Error::Write) &&
           elapsed >= options_.timeout * 9 / 10);
      // Drop the connection; it may be half-open.
      lease.client = MakeClient();
      const std::string what = fmt::format("{} {}{}: {}", method, base_, url,
                                           httplib::to_string(err));
      if (timed_out) throw TimeoutError("timeout: " + what);
      throw TransportError(what);
    }
    if (res->status < 200 || res->status >= 300) {
      std::string message = res->body;
      const json parsed = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
      if (parsed.is_object() && parsed.contains("error") && parsed["error"].is_string()) {
        message = parsed["error"].get<std::string>();
      }
      throw HttpStatusError(res->status, message);
    }
    json parsed = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      throw ProtocolError(fmt::format("{}: response is not a JSON object", url));
    }
    return parsed;
  }

  RemoteModelOptions options_;
  std::string base_;
  std::string prefix_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<httplib::Client>> idle_;
  std::size_t created_ = 0;
  std::atomic<std::size_t> requests_{0};
};

namespace {

const json& Field(const json& obj, const char* key, json::value_t type,
                  std::string_view endpoint) {
  const auto it = obj.find(key);
  const bool ok = it != obj.end() &&
                  (it->type() == type ||
                   (type == json::value_t::number_float && it->is_number()) ||
                   (type == json::value_t::number_integer && it->is_number_integer()));
  if (!ok) {
    throw ProtocolError(fmt::format("{}: missing or mistyped field '{}'", endpoint, key));
  }
  return *it;
}

double CheckedLogprob(const json& value, std::string_view endpoint) {
  if (!value.is_number()) {
    throw ProtocolError(fmt::format("{}: logprob is not a number", endpoint));
  }
  const double lp = value.get<double>();
  if (std::isnan(lp) || lp > 0.0) {
    throw ProtocolError(fmt::format("{}: logprob {} is not <= 0", endpoint, lp));
  }
  return lp;
}

}  // namespace

RemoteModel::RemoteModel(RemoteModelOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

RemoteModel::~RemoteModel() = default;

std::vector<Sample> RemoteModel::DrawSamples(std::string_view input, std::size_t n,
                                             std::size_t max_new_tokens,
                                             std::optional<std::uint64_t> seed) {
  constexpr std::string_view kEndpoint = "/v1/sample";
  const std::size_t batch = impl_->options().max_batch;
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t chunk = 0, done = 0; done < n; ++chunk) {
    const std::size_t count = std::min(batch, n - done);
    json body = {{"input", input}, {"n", count}, {"max_new_tokens", max_new_tokens}};
    if (seed) body["seed"] = *seed + chunk;
    const json res = impl_->Call("POST", std::string(kEndpoint), &body);
    const json& samples = Field(res, "samples", json::value_t::array, kEndpoint);
    if (samples.size() != count) {
      throw ProtocolError(fmt::format("{}: expected {} samples, got {}", kEndpoint,
                                      count, samples.size()));
    }
    for (const json& s : samples) {
      if (!s.is_object()) throw ProtocolError("/v1/sample: sample is not an object");
      const json& text = Field(s, "text", json::value_t::string, kEndpoint);
      const json& logprob = Field(s, "logprob", json::value_t::number_float, kEndpoint);
      out.push_back(Sample{text.get<std::string>(), CheckedLogprob(logprob, kEndpoint)});
    }
    done += count;
  }
  return out;
}

std::vector<double> RemoteModel::ScoreOutputs(std::string_view input,
                                              std::span<const std::string> outputs) {
  constexpr std::string_view kEndpoint = "/v1/score";
  const std::size_t batch = impl_->options().max_batch;
  std::vector<double> out;
  out.reserve(outputs.size());
  for (std::size_t done = 0; done < outputs.size();) {
    const std::size_t count = std::min(batch, outputs.size() - done);
    json body = {{"input", input},
                 {"outputs", std::vector<std::string>(outputs.begin() + done,
                                                      outputs.begin() + done + count)}};
    const json res = impl_->Call("POST", std::string(kEndpoint), &body);
    const json& logprobs = Field(res, "logprobs", json::value_t::array, kEndpoint);
    if (logprobs.size() != count) {
      throw ProtocolError(fmt::format("{}: expected {} logprobs, got {}", kEndpoint,
                                      count, logprobs.size()));
    }
    for (const json& lp : logprobs) out.push_back(CheckedLogprob(lp, kEndpoint));
    done += count;
  }
  return out;
}

std::size_t RemoteModel::CountTokens(std::string_view text) {
  constexpr std::string_view kEndpoint = "/v1/tokenize";
  const json body = {{"text", text}};
  const json res = impl_->Call("POST", std::string(kEndpoint), &body);
  const json& count = Field(res, "count", json::value_t::number_integer, kEndpoint);
  if (count.get<std::int64_t>() < 0) {
    throw ProtocolError("/v1/tokenize: negative token count");
  }
  return count.get<std::size_t>();
}

std::string RemoteModel::name() const {
  return "remote:" + impl_->options().endpoint;
}

HealthStatus RemoteModel::Health() {
  constexpr std::string_view kEndpoint = "/v1/health";
  const json res = impl_->Call("GET", std::string(kEndpoint), nullptr);
  HealthStatus status;
  status.status = Field(res, "status", json::value_t::string, kEndpoint).get<std::string>();
  if (const auto it = res.find("model"); it != res.end() && it->is_string()) {
    status.model = it->get<std::string>();
  }
  return status;
}

std::size_t RemoteModel::requests_sent() const { return impl_->requests_sent(); }

}  // namespace ctxkgc
