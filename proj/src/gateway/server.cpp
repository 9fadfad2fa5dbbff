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

#include "phrase_attack/gateway/server.hpp"

#include "httplib.h"

namespace phrase_attack {

using protocol::Json;

namespace {

template <typename T>
T& Require(const std::shared_ptr<T>& backend, std::string_view path) {
  if (!backend) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint " + std::string(path) + " is not configured");
  }
  return *backend;
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBackendUnavailable: return 503;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kProtocolError:
    case ErrorCode::kEmptyText:
    case ErrorCode::kSpanOutOfRange:
    case ErrorCode::kParseError:
      return 400;
    default:
      return 500;
  }
}

}  // namespace

Json ProtocolRouter::Health() const {
  return {{"status", "ok"}, {"labels", backends_.labels.ids()}};
}

Json ProtocolRouter::Handle(std::string_view path, const Json& body) {
  if (path == protocol::kClassifyPath) return HandleClassify(body);
  if (path == protocol::kCmlmPath) return HandleCmlm(body);
  if (path == protocol::kInfillPath) {
    const InfillRequest request = protocol::DecodeInfillRequest(body);
    request.Validate();
    return protocol::Encode(Require(backends_.infiller, path).Infill(request));
  }
  if (path == protocol::kParsePath) {
    const auto tokens = protocol::DecodeTokens(body.value("tokens", Json()));
    return {{"tree", Require(backends_.parser, path).Parse(tokens)}};
  }
  if (path == protocol::kPerplexityPath) {
    const auto tokens = protocol::DecodeTokens(body.value("tokens", Json()));
    return {{"perplexity",
             Require(backends_.perplexity, path).Perplexity(tokens)}};
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown endpoint " + std::string(path));
}

Json ProtocolRouter::HandleClassify(const Json& body) {
  auto& victim = Require(backends_.victim, protocol::kClassifyPath);
  if (body.is_object() && body.contains("batch")) {
    std::vector<ClassifyRequest> requests;
    for (const auto& item : body["batch"]) {
      requests.push_back(protocol::DecodeClassifyRequest(item));
    }
    Json results = Json::array();
    for (const auto& distribution : victim.ClassifyBatch(requests)) {
      results.push_back(protocol::Encode(distribution));
    }
    return {{"results", results}};
  }
  return protocol::Encode(
      victim.Classify(protocol::DecodeClassifyRequest(body)));
}

Json ProtocolRouter::HandleCmlm(const Json& body) {
  auto& cmlm = Require(backends_.cmlm, protocol::kCmlmPath);
  if (body.is_object() && body.contains("batch")) {
    std::vector<CmlmQuery> queries;
    for (const auto& item : body["batch"]) {
      queries.push_back(protocol::DecodeCmlmQuery(item));
    }
    Json results = Json::array();
    for (const auto& likelihood : cmlm.TokenProbBatch(queries)) {
      results.push_back(protocol::Encode(likelihood));
    }
    return {{"results", results}};
  }
  return protocol::Encode(cmlm.TokenProb(protocol::DecodeCmlmQuery(body)));
}

Json InProcessTransport::Post(std::string_view path, const Json& body) {
  return router_->Handle(path, body);
}

Json InProcessTransport::Get(std::string_view path) {
  if (path != protocol::kHealthPath) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown endpoint " + std::string(path));
  }
  return router_->Health();
}

struct ProtocolHttpServer::Impl {
  std::shared_ptr<ProtocolRouter> router;
  httplib::Server server;
};

ProtocolHttpServer::ProtocolHttpServer(std::shared_ptr<ProtocolRouter> router)
    : impl_(std::make_unique<Impl>()) {
  impl_->router = std::move(router);
  auto reply = [](httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  impl_->server.Get(std::string(protocol::kHealthPath),
                    [this, reply](const httplib::Request&,
                                  httplib::Response& res) {
                      reply(res, 200, impl_->router->Health());
                    });
  impl_->server.Post(
      R"(/v1/(\w+))",
      [this, reply](const httplib::Request& req, httplib::Response& res) {
        Json body = Json::parse(req.body, nullptr, /*allow_exceptions=*/false);
        if (body.is_discarded()) {
          reply(res, 400,
                protocol::EncodeError(
                    Error(ErrorCode::kProtocolError, "body is not JSON")));
          return;
        }
        try {
          reply(res, 200, impl_->router->Handle(req.path, body));
        } catch (const Error& e) {
          const int status = e.code() == ErrorCode::kInvalidArgument &&
                                     e.detail().rfind("unknown endpoint", 0) == 0
                                 ? 404
                                 : StatusFor(e.code());
          reply(res, status, protocol::EncodeError(e));
        } catch (const std::exception& e) {
          reply(res, 500,
                protocol::EncodeError(Error(ErrorCode::kProtocolError, e.what())));
        }
      });
}

ProtocolHttpServer::~ProtocolHttpServer() { Stop(); }

int ProtocolHttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kBackendUnavailable,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void ProtocolHttpServer::Listen() { impl_->server.listen_after_bind(); }

void ProtocolHttpServer::Start() {
  thread_ = std::thread([this] { Listen(); });
  impl_->server.wait_until_ready();
}

void ProtocolHttpServer::Stop() {
  if (impl_) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace phrase_attack
