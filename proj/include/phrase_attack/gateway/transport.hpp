//
// Copyright 2026 The phrase-attack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "phrase_attack/gateway/protocol.hpp"

namespace phrase_attack {

// Request/response transport carrying protocol bodies.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual protocol::Json Post(std::string_view path,
                              const protocol::Json& body) = 0;
  virtual protocol::Json Get(std::string_view path) = 0;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  double multiplier = 2.0;
};

// HTTP transport to "http://host:port". Transport failures and 5xx answers
// are retried with exponential backoff and end in kBackendUnavailable; error
// envelopes on 4xx are rethrown as the Error they carry. `timeout` bounds
// reads and writes (model calls can be slow); connecting has its own, shorter
// limit so a dead host fails fast.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(
      std::string base_url, RetryPolicy retry = {},
      std::chrono::seconds timeout = std::chrono::seconds(120),
      std::chrono::seconds connect_timeout = std::chrono::seconds(5));

  protocol::Json Post(std::string_view path,
                      const protocol::Json& body) override;
  protocol::Json Get(std::string_view path) override;

  const std::string& base_url() const { return base_url_; }

 private:
  protocol::Json Send(std::string_view method, std::string_view path,
                      const protocol::Json* body);

  std::string base_url_;
  RetryPolicy retry_;
  std::chrono::seconds timeout_;
  std::chrono::seconds connect_timeout_;
};

// Content-addressed response store, safe under concurrent readers and
// writers. With a directory, entries are appended to `responses.jsonl` as
// they arrive and reloaded on construction, so an interrupted run resumes
// from where it stopped.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(const std::filesystem::path& directory);

  // SHA-256 hex digest of "path\n" + canonical body.
  static std::string Key(std::string_view path, const protocol::Json& body);

  std::optional<protocol::Json> Lookup(const std::string& key) const;
  void Insert(const std::string& key, const protocol::Json& response);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, protocol::Json> entries_;
  std::optional<std::ofstream> journal_;
};

// Memoizes POST bodies through a ResponseCache; disabled means pass-through.
class CachingTransport : public Transport {
 public:
  CachingTransport(std::shared_ptr<Transport> inner,
                   std::shared_ptr<ResponseCache> cache, bool enabled = true);

  protocol::Json Post(std::string_view path,
                      const protocol::Json& body) override;
  protocol::Json Get(std::string_view path) override;

  std::size_t hits() const { return hits_.load(); }

 private:
  std::shared_ptr<Transport> inner_;
  std::shared_ptr<ResponseCache> cache_;
  bool enabled_;
  std::atomic<std::size_t> hits_{0};
};

// Counts requests that reach the wrapped transport.
class CountingTransport : public Transport {
 public:
  explicit CountingTransport(std::shared_ptr<Transport> inner)
      : inner_(std::move(inner)) {}

  protocol::Json Post(std::string_view path,
                      const protocol::Json& body) override;
  protocol::Json Get(std::string_view path) override;

  std::size_t requests() const { return requests_.load(); }
  std::size_t requests(std::string_view path) const;

 private:
  std::shared_ptr<Transport> inner_;
  std::atomic<std::size_t> requests_{0};
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::size_t> per_path_;
};

}  // namespace phrase_attack
