#include "lfg/server/transport.hpp"

#include <charconv>
#include <chrono>
#include <iostream>
#include <map>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "lfg/analysis.hpp"
#include "lfg/error.hpp"

namespace lfg::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

Millis system_clock_now() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::map<std::string, std::string, std::less<>> parse_query(std::string_view q) {
  std::map<std::string, std::string, std::less<>> out;
  while (!q.empty()) {
    const auto amp = q.find('&');
    const std::string_view pair = q.substr(0, amp);
    const auto eq = pair.find('=');
    out[std::string(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : std::string(pair.substr(eq + 1));
    q = amp == std::string_view::npos ? std::string_view{} : q.substr(amp + 1);
  }
  return out;
}

HttpResponse http_error(unsigned status, std::string_view code, std::string_view message) {
  return {status, error_message(code, message)};
}

}  // namespace

HttpResponse route_http(const GameServer& server, PipelineRunner* runner, const PipelineConfig* pipeline_base,
                        std::string_view method, std::string_view target, std::string_view body) {
  const auto qpos = target.find('?');
  const std::string_view path = target.substr(0, qpos);
  const auto query = parse_query(qpos == std::string_view::npos ? std::string_view{} : target.substr(qpos + 1));
  const bool get = method == "GET";

  if (path == "/health" && get) {
    const auto content = server.content();
    json j = {{"status", "ok"},
              {"active_games", server.active_games()},
              {"queued", server.queue_size()},
              {"events", server.log().events().size()}};
    j["content_version"] = content ? json(content->version) : json(nullptr);
    return {200, j};
  }

  if (path == "/leaderboard" && get) {
    long top = 10;
    if (auto it = query.find("top"); it != query.end()) {
      const auto v = parse_long(it->second);
      if (!v || *v < 0) return http_error(400, "bad_request", "top must be a non-negative integer");
      top = *v;
    }
    json list = json::array();
    for (const auto& p : server.leaderboard(static_cast<std::size_t>(top))) list.push_back(to_json(p));
    return {200, list};
  }

  constexpr std::string_view factors_prefix = "/factors/";
  constexpr std::string_view description_suffix = "/description";
  if (get && path.starts_with(factors_prefix) && path.ends_with(description_suffix) &&
      path.size() > factors_prefix.size() + description_suffix.size()) {
    const auto id = parse_long(
        path.substr(factors_prefix.size(), path.size() - factors_prefix.size() - description_suffix.size()));
    if (!id) return http_error(400, "bad_request", "factor id must be an integer");
    AnalysisConfig cfg;
    if (auto it = query.find("threshold"); it != query.end()) {
      const auto v = parse_long(it->second);
      if (!v || *v < 1) return http_error(400, "bad_request", "threshold must be a positive integer");
      cfg.good_label_threshold = static_cast<int>(*v);
    }
    if (const auto content = server.content())
      cfg.factor_count = static_cast<int>(content->representatives.factor_count());
    try {
      const AnalysisReport r = report(server.log().events(), cfg);
      return {200, factor_description_json(r, static_cast<int>(*id))};
    } catch (const Error& e) {
      return http_error(e.code() == "unknown_factor" ? 404 : 400, e.code(), e.what());
    }
  }

  if (path == "/admin/pipeline") {
    if (!runner || !pipeline_base) return http_error(503, "unavailable", "no pipeline configured");
    if (get) return {200, runner->status()};
    if (method != "POST") return http_error(405, "method_not_allowed", "use GET or POST");
    try {
      const json j = body.empty() ? json::object() : json::parse(body);
      PipelineConfig cfg = pipeline_config_from_json(j, *pipeline_base);
      if (!runner->start(std::move(cfg))) return http_error(409, "busy", "a pipeline run is already in progress");
      return {202, runner->status()};
    } catch (const json::exception& e) {
      return http_error(400, "bad_config", e.what());
    } catch (const Error& e) {
      return http_error(400, e.code(), e.what());
    }
  }

  return http_error(404, "not_found", "no route for " + std::string(method) + " " + std::string(path));
}

struct Transport::Impl {
  class WsSession;

  Impl(GameServer& s, PipelineRunner* r, std::optional<PipelineConfig> base, Clock c, TransportOptions o)
      : server(s), runner(r), pipeline_base(std::move(base)), clock(std::move(c)), options(std::move(o)),
        acceptor(io), timer(io) {
    const tcp::endpoint ep(asio::ip::make_address(options.address), options.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
    do_accept();
    schedule_tick();
  }

  void deliver(const std::vector<Outbound>& out);
  void do_accept();
  void schedule_tick();
  void handle_http(tcp::socket socket);

  GameServer& server;
  PipelineRunner* runner;
  std::optional<PipelineConfig> pipeline_base;
  Clock clock;
  TransportOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::steady_timer timer;
  std::thread thread;
  ConnectionId next_id = 1;
  std::map<ConnectionId, std::weak_ptr<WsSession>> sessions;
};

class Transport::Impl::WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(Impl& impl, tcp::socket socket, ConnectionId id) : impl_(impl), ws_(std::move(socket)), id_(id) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->impl_.sessions[self->id_] = self;
      self->read();
    });
  }

  void send(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write_next();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      auto& impl = self->impl_;
      if (ec) {
        impl.sessions.erase(self->id_);
        impl.deliver(impl.server.handle_disconnect(self->id_, impl.clock()));
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      impl.deliver(impl.server.route_message(self->id_, text, impl.clock()));
      self->read();
    });
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;  // the read side notices the broken connection
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write_next();
    });
  }

  Impl& impl_;
  websocket::stream<tcp::socket> ws_;
  ConnectionId id_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
};

void Transport::Impl::deliver(const std::vector<Outbound>& out) {
  for (const auto& o : out)
    if (auto it = sessions.find(o.to); it != sessions.end())
      if (auto s = it->second.lock()) s->send(o.message.dump());
}

void Transport::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    handle_http(std::move(socket));
    do_accept();
  });
}

void Transport::Impl::schedule_tick() {
  timer.expires_after(std::chrono::milliseconds(options.tick_interval_ms));
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    deliver(server.tick(clock()));
    schedule_tick();
  });
}

// One HTTP exchange per connection (Connection: close), or a WebSocket upgrade.
void Transport::Impl::handle_http(tcp::socket socket) {
  struct Exchange {
    beast::tcp_stream stream;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::response<http::string_body> res;
  };
  auto ex = std::make_shared<Exchange>(Exchange{beast::tcp_stream(std::move(socket)), {}, {}, {}});
  ex->stream.expires_after(std::chrono::seconds(30));
  http::async_read(ex->stream, ex->buffer, ex->req, [this, ex](beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(ex->req)) {
      if (ex->req.target() != "/ws") return;  // dropping the socket closes it
      ex->stream.expires_never();
      auto ws = std::make_shared<WsSession>(*this, ex->stream.release_socket(), next_id++);
      ws->start(std::move(ex->req));
      return;
    }
    const HttpResponse r =
        route_http(server, runner, pipeline_base ? &*pipeline_base : nullptr, std::string(ex->req.method_string()),
                   std::string(ex->req.target()), ex->req.body());
    ex->res.version(ex->req.version());
    ex->res.result(r.status);
    ex->res.set(http::field::content_type, "application/json");
    ex->res.keep_alive(false);
    ex->res.body() = r.body.dump();
    ex->res.prepare_payload();
    http::async_write(ex->stream, ex->res, [ex](beast::error_code, std::size_t) {
      beast::error_code ignored;
      ex->stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  });
}

Transport::Transport(GameServer& server, PipelineRunner* runner, std::optional<PipelineConfig> pipeline_base,
                     Clock clock, TransportOptions options)
    : impl_(std::make_unique<Impl>(server, runner, std::move(pipeline_base), std::move(clock), std::move(options))) {}

Transport::~Transport() { stop(); }

unsigned short Transport::port() const { return impl_->acceptor.local_endpoint().port(); }

void Transport::run() { impl_->io.run(); }

void Transport::start() {
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void Transport::stop() {
  asio::post(impl_->io, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
    impl_->timer.cancel();
    impl_->io.stop();
  });
  if (impl_->thread.joinable() && impl_->thread.get_id() != std::this_thread::get_id()) impl_->thread.join();
}

}  // namespace lfg::server
