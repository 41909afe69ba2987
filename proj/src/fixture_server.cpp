#include <mutex>
#include <thread>

#include "httplib.h"
#include "walt/fixture.hpp"

namespace walt::fixture {

struct FixtureServer::Impl {
  explicit Impl(FixtureOptions options) : site(options) {}

  void handle(const httplib::Request& req, httplib::Response& res, const std::string& method) {
    Request r;
    r.method = method;
    r.path = req.path;
    auto q = req.target.find('?');
    if (q != std::string::npos) r.query = parse_query(req.target.substr(q + 1));
    if (method == "POST") r.form = parse_query(req.body);
    auto cookie_header = req.get_header_value("Cookie");
    const auto& cookie_text = cookie_header;
    std::size_t start = 0;
    while (start < cookie_text.size()) {
      auto end = cookie_text.find(';', start);
      if (end == std::string::npos) end = cookie_text.size();
      auto pair = cookie_text.substr(start, end - start);
      auto b = pair.find_first_not_of(' ');
      auto eq = pair.find('=');
      if (b != std::string::npos && eq != std::string::npos && eq > b) {
        r.cookies[pair.substr(b, eq - b)] = url_decode(pair.substr(eq + 1));
      }
      start = end + 1;
    }
    Response out;
    {
      std::lock_guard lock(mutex);
      out = site.handle(r);
    }
    res.status = out.status;
    if (out.status == 303) {
      res.set_header("Location", out.location);
      return;
    }
    res.set_content(out.page.serialize(), "text/html; charset=utf-8");
  }

  FixtureSite site;
  std::mutex mutex;
  httplib::Server server;
  std::thread thread;
};

FixtureServer::FixtureServer(FixtureOptions options) : impl_(std::make_unique<Impl>(options)) {
  auto* impl = impl_.get();
  impl->server.Get(".*", [impl](const httplib::Request& req, httplib::Response& res) { impl->handle(req, res, "GET"); });
  impl->server.Post(".*", [impl](const httplib::Request& req, httplib::Response& res) { impl->handle(req, res, "POST"); });
}

FixtureServer::~FixtureServer() { stop(); }

int FixtureServer::start(int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port("127.0.0.1")
                        : (impl_->server.bind_to_port("127.0.0.1", port) ? port : -1);
  if (bound < 0) return -1;
  impl_->thread = std::thread([impl = impl_.get()] { impl->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool FixtureServer::listen(int port) { return impl_->server.listen("127.0.0.1", port); }

void FixtureServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace walt::fixture
