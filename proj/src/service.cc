#include "chunktag/service.h"

#include <httplib.h>

#include <json.hpp>

#include "chunktag/chunker.h"
#include "chunktag/error.h"

namespace chunktag {

using nlohmann::json;

namespace {

HttpResponse error_response(int status, const std::string& code, const std::string& message) {
  json j = {{"schema_version", kSchemaVersion},
            {"error", {{"code", code}, {"message", message}}}};
  return {status, j.dump()};
}

json node_json(const Node& n, const Sentence& s, const std::vector<StructuralTag>& tags) {
  if (n.is_leaf()) {
    const Token& t = s.tokens[n.token];
    return {{"token", n.token}, {"form", t.form}, {"pos", t.pos}, {"tag", render(tags[n.token])}};
  }
  json kids = json::array();
  for (const Node& c : n.children) kids.push_back(node_json(c, s, tags));
  Span sp = n.span();
  return {{"label", n.label}, {"span", {sp.begin, sp.end}}, {"children", std::move(kids)}};
}

json spans_json(const std::vector<Span>& spans) {
  json out = json::array();
  for (const Span& s : spans) out.push_back({s.begin, s.end});
  return out;
}

struct BadRequest {
  std::string message;
};

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw BadRequest{std::string("missing field '") + key + "'"};
  return *it;
}

std::vector<Token> read_tokens(const json& j) {
  if (!j.is_array()) throw BadRequest{"'tokens' must be an array"};
  std::vector<Token> out;
  for (const json& t : j) {
    if (!t.is_object()) throw BadRequest{"token must be an object"};
    const json& form = field(t, "form");
    const json& pos = field(t, "pos");
    if (!form.is_string() || !pos.is_string() || pos.get<std::string>().empty())
      throw BadRequest{"token form and pos must be strings, pos non-empty"};
    out.push_back({form.get<std::string>(), pos.get<std::string>()});
  }
  return out;
}

BoundarySpec read_spans(const json& j) {
  if (!j.is_array()) throw BadRequest{"'spans' must be an array"};
  BoundarySpec spec;
  for (const json& s : j) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() ||
        !s[1].is_number_integer())
      throw BadRequest{"span must be [begin, end]"};
    spec.spans.push_back({s[0].get<int>(), s[1].get<int>()});
  }
  return spec;
}

}  // namespace

AnnotationService::AnnotationService(std::optional<ChunkModel> model, UnknownPosPolicy policy)
    : model_(std::move(model)), policy_(policy) {}

HttpResponse AnnotationService::propose(const std::string& body) const {
  if (!model_) return error_response(503, "no_model", "no model loaded");
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object())
    return error_response(400, "bad_request", "body is not a JSON object");
  try {
    const json& version = field(req, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
      throw BadRequest{"unsupported schema_version"};
    std::vector<Token> tokens = read_tokens(field(req, "tokens"));
    BoundarySpec spans = req.contains("spans") ? read_spans(req["spans"]) : BoundarySpec{};
    spans.checked(static_cast<int>(tokens.size()));

    TagResult r = tag_interactive(*model_, tokens, spans, policy_);
    json forest = json::array();
    for (const Node& n : r.sentence.forest) forest.push_back(node_json(n, r.sentence, r.tags));
    json tags = json::array();
    for (const StructuralTag& t : r.tags) tags.push_back(render(t));
    json out = {{"schema_version", kSchemaVersion},
                {"forest", std::move(forest)},
                {"tags", std::move(tags)},
                {"bracketed", serialize_sentence(r.sentence)},
                {"repair_count", r.repairs},
                {"chunk_scores", r.chunk_scores},
                {"log_score", r.log_score},
                {"infeasible_spans", spans_json(r.infeasible_spans)},
                {"unknown_positions", r.unknown_positions}};
    return {200, out.dump()};
  } catch (const BadRequest& e) {
    return error_response(400, "bad_request", e.message);
  } catch (const UnknownPosError& e) {
    return error_response(422, "unknown_pos", e.what());
  } catch (const DataError& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const InfeasibleError& e) {
    return error_response(422, "infeasible", e.what());
  }
}

HttpResponse AnnotationService::model_info() const {
  if (!model_) return error_response(503, "no_model", "no model loaded");
  const InterpolationWeights& w = model_->weights();
  json out = {{"schema_version", kSchemaVersion},
              {"dims", model_->scheme().dims()},
              {"depth", model_->scheme().depth},
              {"order", model_->order()},
              {"tagset_size", model_->alphabet().size()},
              {"lambda", {w.unigram, w.bigram, w.trigram}},
              {"pos_alphabet_size", model_->pos_alphabet().size()},
              {"training", {{"sentences", model_->info().sentences},
                            {"tokens", model_->info().tokens}}}};
  return {200, out.dump()};
}

HttpResponse AnnotationService::health() const {
  json out = {{"schema_version", kSchemaVersion},
              {"status", "ok"},
              {"model_loaded", model_.has_value()}};
  return {200, out.dump()};
}

struct HttpServer::Impl {
  const AnnotationService& service;
  httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

HttpServer::HttpServer(const AnnotationService& service)
    : impl_(new Impl{service, {}}) {
  const AnnotationService& s = impl_->service;
  impl_->server.Post("/v1/propose", [&s](const httplib::Request& req, httplib::Response& res) {
    reply(res, s.propose(req.body));
  });
  impl_->server.Get("/v1/model", [&s](const httplib::Request&, httplib::Response& res) {
    reply(res, s.model_info());
  });
  impl_->server.Get("/v1/health", [&s](const httplib::Request&, httplib::Response& res) {
    reply(res, s.health());
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace chunktag
