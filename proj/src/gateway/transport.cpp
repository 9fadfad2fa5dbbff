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

#include "phrase_attack/gateway/transport.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <thread>

#include "httplib.h"

namespace phrase_attack {

using protocol::Json;

HttpTransport::HttpTransport(std::string base_url, RetryPolicy retry,
                             std::chrono::seconds timeout,
                             std::chrono::seconds connect_timeout)
    : base_url_(std::move(base_url)),
      retry_(retry),
      timeout_(timeout),
      connect_timeout_(connect_timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

Json HttpTransport::Post(std::string_view path, const Json& body) {
  return Send("POST", path, &body);
}

Json HttpTransport::Get(std::string_view path) {
  return Send("GET", path, nullptr);
}

Json HttpTransport::Send(std::string_view method, std::string_view path,
                         const Json* body) {
  std::string last_failure = "no attempt made";
  auto backoff = retry_.initial_backoff;
  const int attempts = std::max(1, retry_.attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(backoff.count()) * retry_.multiplier));
    }
    // One client per request: httplib clients are not safe to share between
    // threads.
    httplib::Client client(base_url_);
    client.set_connection_timeout(connect_timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    const std::string target(path);
    httplib::Result result =
        method == "GET"
            ? client.Get(target)
            : client.Post(target, body->dump(), "application/json");
    if (!result) {
      last_failure = httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    Json parsed = Json::parse(result->body, nullptr, /*allow_exceptions=*/false);
    if (status >= 500) {
      last_failure = "HTTP " + std::to_string(status);
      if (!parsed.is_discarded()) {
        const Error carried = protocol::DecodeError(parsed, last_failure);
        // Envelopes naming a non-transient failure are not retried.
        if (carried.code() != ErrorCode::kBackendUnavailable &&
            carried.code() != ErrorCode::kProtocolError) {
          throw carried;
        }
        last_failure = carried.what();
      }
      continue;
    }
    if (parsed.is_discarded()) {
      throw Error(ErrorCode::kProtocolError,
                  base_url_ + target + " answered with invalid JSON");
    }
    if (status != 200) {
      throw protocol::DecodeError(
          parsed, base_url_ + target + " answered HTTP " +
                      std::to_string(status));
    }
    return parsed;
  }
  throw Error(ErrorCode::kBackendUnavailable,
              base_url_ + std::string(path) + " after " +
                  std::to_string(attempts) + " attempts: " + last_failure);
}

ResponseCache::ResponseCache(const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const auto file = directory / "responses.jsonl";
  {
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
      Json entry = Json::parse(line, nullptr, /*allow_exceptions=*/false);
      // A torn final line from an interrupted run is skipped.
      if (entry.is_discarded() || !entry.contains("key") ||
          !entry.contains("response")) {
        continue;
      }
      entries_.emplace(entry["key"].get<std::string>(), entry["response"]);
    }
  }
  journal_.emplace(file, std::ios::app);
}

std::string ResponseCache::Key(std::string_view path, const Json& body) {
  const std::string canonical = std::string(path) + "\n" + body.dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_Digest(canonical.data(), canonical.size(), digest.data(), &length,
             EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(length * 2);
  char buffer[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buffer, sizeof(buffer), "%02x", digest[i]);
    hex += buffer;
  }
  return hex;
}

std::optional<Json> ResponseCache::Lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::Insert(const std::string& key, const Json& response) {
  std::unique_lock lock(mutex_);
  if (!entries_.emplace(key, response).second) return;
  if (journal_) {
    *journal_ << Json{{"key", key}, {"response", response}}.dump() << '\n';
    journal_->flush();
  }
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

CachingTransport::CachingTransport(std::shared_ptr<Transport> inner,
                                   std::shared_ptr<ResponseCache> cache,
                                   bool enabled)
    : inner_(std::move(inner)), cache_(std::move(cache)), enabled_(enabled) {}

Json CachingTransport::Post(std::string_view path, const Json& body) {
  if (!enabled_ || !cache_) return inner_->Post(path, body);
  const std::string key = ResponseCache::Key(path, body);
  if (auto hit = cache_->Lookup(key)) {
    ++hits_;
    return *std::move(hit);
  }
  Json response = inner_->Post(path, body);
  cache_->Insert(key, response);
  return response;
}

Json CachingTransport::Get(std::string_view path) { return inner_->Get(path); }

Json CountingTransport::Post(std::string_view path, const Json& body) {
  ++requests_;
  {
    std::lock_guard lock(mutex_);
    ++per_path_[std::string(path)];
  }
  return inner_->Post(path, body);
}

Json CountingTransport::Get(std::string_view path) {
  return inner_->Get(path);
}

std::size_t CountingTransport::requests(std::string_view path) const {
  std::lock_guard lock(mutex_);
  const auto it = per_path_.find(std::string(path));
  return it == per_path_.end() ? 0 : it->second;
}

}  // namespace phrase_attack
