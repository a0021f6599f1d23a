// chunktag-server: HTTP annotation service over a trained model.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

#include "chunktag/error.h"
#include "chunktag/service.h"

using namespace chunktag;

namespace {

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chunk annotation service"};
  std::string model_path, host = "127.0.0.1", unknown = "uniform";
  int port = 8080;
  app.add_option("--model", model_path, "trained model (omit to serve 503s)");
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port, "0 picks a free port")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  app.add_option("--unknown-pos", unknown)
      ->check(CLI::IsMember({"unk", "uniform"}))
      ->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::optional<ChunkModel> model;
  if (!model_path.empty()) {
    std::ifstream in(model_path);
    if (!in) {
      std::cerr << "chunktag-server: cannot read " << model_path << "\n";
      return 3;
    }
    try {
      model = ChunkModel::load(in);
    } catch (const Error& e) {
      std::cerr << "chunktag-server: " << e.what() << "\n";
      return 3;
    }
  }
  AnnotationService service(std::move(model), unknown == "unk" ? UnknownPosPolicy::kUnk
                                                                : UnknownPosPolicy::kUniform);
  HttpServer server(service);
  int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "chunktag-server: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ":" << bound << std::endl;
  server.listen();
  return 0;
}
