#include "beamlab/bridge.hpp"

#include <chrono>
#include <deque>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "beamlab/bus.hpp"
#include "beamlab/error.hpp"

namespace beamlab {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

std::vector<std::string> split_topics(std::string_view target) {
  std::vector<std::string> out;
  const auto q = target.find("topics=");
  if (q == std::string_view::npos) return out;
  auto list = target.substr(q + 7);
  list = list.substr(0, list.find('&'));
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

constexpr std::chrono::seconds handshake_timeout{5};

std::string error_frame(const std::string& what) {
  return nlohmann::json{{"error", what}}.dump();
}

class session : public std::enable_shared_from_this<session> {
 public:
  session(tcp::socket socket, broker& bus) : ws_(std::move(socket)), bus_(bus) {}

  void start(std::function<void(session*)> on_close) {
    on_close_ = std::move(on_close);
    ws_.next_layer().expires_after(handshake_timeout);
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       self->on_request(ec);
                     });
  }

  // Thread-safe; called from publisher threads via the broker.
  void forward(const bus_message& msg) {
    net::post(ws_.get_executor(), [self = shared_from_this(), msg] {
      if (!self->open_) return;
      for (const auto& p : self->patterns_)
        if (topic_matches(p, msg.topic)) {
          self->send(to_wire(msg));
          return;
        }
    });
  }

  // Only safe once the io thread has stopped.
  void detach() {
    if (sub_) bus_.unsubscribe(sub_);
    sub_.reset();
  }

  // Sends a close frame once pending writes are out; sockets that never
  // upgraded are dropped.
  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->finished_ || self->closing_) return;
      self->closing_ = true;
      if (!self->open_) {
        beast::error_code ec;
        self->ws_.next_layer().socket().close(ec);
        return;
      }
      if (self->outbox_.empty()) self->close_now();
    });
  }

 private:
  void on_request(beast::error_code ec) {
    if (ec || !websocket::is_upgrade(request_)) return finish();
    const auto target = request_.target();
    for (auto& t : split_topics(std::string_view(target.data(), target.size())))
      if (valid_pattern(t)) patterns_.push_back(std::move(t));
    ws_.next_layer().expires_never();
    ws_.set_option(websocket::stream_base::timeout{handshake_timeout, websocket::stream_base::none(),
                                                   false});
    ws_.text(true);
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->finish();
      self->open_ = true;
      std::weak_ptr<session> weak = self;
      self->sub_ = self->bus_.subscribe("*", [weak](const bus_message& m) {
        if (auto s = weak.lock()) s->forward(m);
      });
      self->read();
    });
  }

  void read() {
    ws_.async_read(inbound_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      const std::string text = beast::buffers_to_string(self->inbound_.data());
      self->inbound_.consume(self->inbound_.size());
      self->handle(text);
      self->read();
    });
  }

  void handle(const std::string& text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("subscribe")) {
      const auto& list = j["subscribe"];
      if (!list.is_array()) return send(error_frame("subscribe expects an array of patterns"));
      for (const auto& p : list) {
        if (!p.is_string() || !valid_pattern(p.get<std::string>()))
          return send(error_frame("malformed pattern " + p.dump()));
      }
      for (const auto& p : list) patterns_.push_back(p.get<std::string>());
      return;
    }
    try {
      bus_.publish(from_wire(text));
    } catch (const error& e) {
      send(error_frame(e.what()));
    }
  }

  void send(std::string text) {
    if (closing_) return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write_next();
  }

  void write_next() {
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return self->finish();
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty())
                        self->write_next();
                      else if (self->closing_)
                        self->close_now();
                    });
  }

  void close_now() {
    ws_.async_close(websocket::close_code::going_away,
                    [self = shared_from_this()](beast::error_code) { self->finish(); });
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    open_ = false;
    if (sub_) bus_.unsubscribe(sub_);
    sub_.reset();
    if (on_close_) on_close_(this);
  }

  websocket::stream<beast::tcp_stream> ws_;
  broker& bus_;
  beast::flat_buffer buffer_;
  beast::flat_buffer inbound_;
  http::request<http::string_body> request_;
  std::vector<std::string> patterns_;
  std::deque<std::string> outbox_;
  subscription_ptr sub_;
  std::function<void(session*)> on_close_;
  bool open_ = false;
  bool closing_ = false;
  bool finished_ = false;
};

}  // namespace

struct ws_bridge::impl {
  broker& bus;
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::thread worker;
  mutable std::mutex mutex;
  std::set<std::shared_ptr<session>> sessions;
  bool stopped = false;

  explicit impl(broker& b) : bus(b) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto s = std::make_shared<session>(std::move(socket), bus);
      {
        std::lock_guard lock(mutex);
        sessions.insert(s);
      }
      s->start([this](session* done) {
        std::lock_guard lock(mutex);
        std::erase_if(sessions, [&](const auto& p) { return p.get() == done; });
      });
      accept();
    });
  }
};

ws_bridge::ws_bridge(broker& bus, std::uint16_t port, const std::string& address)
    : impl_(std::make_unique<impl>(bus)) {
  try {
    const tcp::endpoint ep{net::ip::make_address(address), port};
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw error(errc::startup, "bridge cannot listen on " + address + ":" + std::to_string(port) +
                                   ": " + e.what());
  }
  impl_->accept();
  impl_->worker = std::thread([this] { impl_->ioc.run(); });
}

ws_bridge::~ws_bridge() { stop(); }

std::uint16_t ws_bridge::port() const noexcept {
  beast::error_code ec;
  const auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? 0 : ep.port();
}

std::size_t ws_bridge::client_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->sessions.size();
}

void ws_bridge::stop() {
  if (!impl_ || impl_->stopped) return;
  impl_->stopped = true;
  std::vector<std::shared_ptr<session>> live;
  {
    std::lock_guard lock(impl_->mutex);
    live.assign(impl_->sessions.begin(), impl_->sessions.end());
  }
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
  });
  for (auto& s : live) s->close();
  // run() returns once every session has finished its close handshake or timed out.
  if (impl_->worker.joinable()) impl_->worker.join();
  // Sessions whose close handler never ran still hold broker subscriptions.
  std::lock_guard lock(impl_->mutex);
  for (const auto& s : impl_->sessions) s->detach();
  impl_->sessions.clear();
}

std::unique_ptr<ws_bridge> bridge_serve(broker& bus, std::uint16_t port) {
  return std::make_unique<ws_bridge>(bus, port);
}

}  // namespace beamlab
