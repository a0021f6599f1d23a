#pragma once

// HTTP annotation service. Request handling is a pure function of the
// loaded model and the request body, so the handlers are usable (and
// tested) without a socket.
//
//   POST /v1/propose  {"schema_version":1,"tokens":[{"form":..,"pos":..}],
//                      "spans":[[begin,end],...]}
//   GET  /v1/model
//   GET  /v1/health

#include <memory>
#include <optional>
#include <string>

#include "chunktag/markov.h"

namespace chunktag {

inline constexpr int kSchemaVersion = 1;

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

class AnnotationService {
 public:
  explicit AnnotationService(std::optional<ChunkModel> model,
                             UnknownPosPolicy policy = UnknownPosPolicy::kUniform);

  // 400 malformed body or spans, 422 unknown POS under the strict policy,
  // 503 without a model.
  HttpResponse propose(const std::string& body) const;
  HttpResponse model_info() const;
  HttpResponse health() const;

 private:
  std::optional<ChunkModel> model_;
  UnknownPosPolicy policy_;
};

// Serves an AnnotationService; the service must outlive the server.
class HttpServer {
 public:
  explicit HttpServer(const AnnotationService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chunktag
