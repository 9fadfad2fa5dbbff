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

#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include "phrase_attack/gateway/backends.hpp"
#include "phrase_attack/gateway/transport.hpp"

namespace phrase_attack {

// Server side of the v1 protocol: decodes a request body, dispatches to the
// backend for the endpoint and encodes the answer. Unconfigured endpoints
// and unknown paths throw kInvalidArgument.
class ProtocolRouter {
 public:
  explicit ProtocolRouter(BackendSet backends)
      : backends_(std::move(backends)) {}

  protocol::Json Handle(std::string_view path, const protocol::Json& body);
  protocol::Json Health() const;

 private:
  protocol::Json HandleClassify(const protocol::Json& body);
  protocol::Json HandleCmlm(const protocol::Json& body);

  BackendSet backends_;
};

// Calls a router directly, without sockets. Errors propagate as thrown.
class InProcessTransport : public Transport {
 public:
  explicit InProcessTransport(std::shared_ptr<ProtocolRouter> router)
      : router_(std::move(router)) {}

  protocol::Json Post(std::string_view path,
                      const protocol::Json& body) override;
  protocol::Json Get(std::string_view path) override;

 private:
  std::shared_ptr<ProtocolRouter> router_;
};

// HTTP front end for a router (used by `mock-serve` and integration tests).
class ProtocolHttpServer {
 public:
  explicit ProtocolHttpServer(std::shared_ptr<ProtocolRouter> router);
  ~ProtocolHttpServer();
  ProtocolHttpServer(const ProtocolHttpServer&) = delete;
  ProtocolHttpServer& operator=(const ProtocolHttpServer&) = delete;

  // port 0 binds an ephemeral port. Returns the bound port.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Listen();
  // Runs Listen() on a background thread and waits until it is ready.
  void Start();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace phrase_attack
