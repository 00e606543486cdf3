#include "carebot/service.hpp"

#include <deque>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace carebot {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

nlohmann::json envelope(std::string_view type, nlohmann::json payload) {
  return {{"type", type}, {"schema_version", kProtocolVersion}, {"payload", std::move(payload)}};
}

}  // namespace

nlohmann::json hello_message(const Controller& controller) {
  nlohmann::json behaviors = nlohmann::json::array();
  for (const auto& [tag, def] : controller.config().library.behaviors()) behaviors.push_back(tag);
  nlohmann::json kinds = nlohmann::json::array();
  for (const auto& k : kCommandNames) kinds.push_back(k.name);
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : kModeNames) modes.push_back(m.name);
  return envelope("hello", {{"robot_id", controller.robot().robot_id},
                            {"scenarios", controller.scenario_ids()},
                            {"behaviors", behaviors},
                            {"command_kinds", kinds},
                            {"modes", modes}});
}

nlohmann::json snapshot_message(const SessionRecord& record, const Controller& controller) {
  return envelope("snapshot", snapshot_json(record, controller));
}

nlohmann::json ack_message(const Acknowledgment& ack) { return envelope("ack", to_json(ack)); }

nlohmann::json error_message(const std::string& reason, const std::optional<std::string>& correlation_id) {
  nlohmann::json payload{{"reason", reason}};
  payload["correlation_id"] = correlation_id ? nlohmann::json(*correlation_id) : nlohmann::json(nullptr);
  return envelope("error", payload);
}

SupervisionCommand parse_command_message(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("message must be an object");
  if (j.value("type", std::string()) != "command") throw std::invalid_argument("type must be 'command'");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kProtocolVersion) {
    throw std::invalid_argument("unsupported schema_version");
  }
  if (!j.contains("payload")) throw std::invalid_argument("missing payload");
  const auto& payload = j["payload"];
  if (!payload.is_object()) throw std::invalid_argument("payload must be an object");
  nlohmann::json command{{"kind", payload.value("kind", nlohmann::json())}, {"payload", payload}};
  command["payload"].erase("kind");
  auto c = command_from_json(command);
  if (j.contains("correlation_id")) {
    if (!j["correlation_id"].is_string()) throw std::invalid_argument("correlation_id must be a string");
    c.correlation_id = j["correlation_id"].get<std::string>();
  }
  return c;
}

// ---------------------------------------------------------------------------
// Transport

namespace {

class Client : public std::enable_shared_from_this<Client> {
 public:
  using Handler = std::function<void(const std::shared_ptr<Client>&, const std::string&)>;
  using Closer = std::function<void(const std::shared_ptr<Client>&)>;

  Client(tcp::socket socket, Handler on_message, Closer on_close)
      : ws_(std::move(socket)), on_message_(std::move(on_message)), on_close_(std::move(on_close)) {}

  void open(std::string greeting) {
    ws_.async_accept([self = shared_from_this(), greeting = std::move(greeting)](beast::error_code ec) {
      if (ec) return self->close();
      self->send(greeting);
      self->read();
    });
  }

  // Must run on the io thread.
  void send(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const auto text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->on_message_(self, text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    on_close_(shared_from_this());
  }

  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  Handler on_message_;
  Closer on_close_;
  bool closed_ = false;
};

}  // namespace

struct SupervisionService::Impl {
  Impl(Controller& c, const std::string& address, unsigned short port)
      : controller(c), greeting(hello_message(c).dump()), acceptor(io, {asio::ip::make_address(address), port}) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto client = std::make_shared<Client>(
          std::move(socket), [this](const std::shared_ptr<Client>& from, const std::string& text) { receive(from, text); },
          [this](const std::shared_ptr<Client>& gone) { clients.erase(gone); });
      clients.insert(client);
      client->open(greeting);
      accept();
    });
  }

  void receive(const std::shared_ptr<Client>& from, const std::string& text) {
    std::optional<std::string> correlation;
    try {
      auto j = nlohmann::json::parse(text, nullptr, false);
      if (j.is_object() && j.contains("correlation_id") && j["correlation_id"].is_string()) {
        correlation = j["correlation_id"].get<std::string>();
      }
      controller.submit(parse_command_message(text));
    } catch (const std::invalid_argument& e) {
      from->send(error_message(e.what(), correlation).dump());
    }
  }

  Controller& controller;
  std::string greeting;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::set<std::shared_ptr<Client>> clients;
  std::thread thread;
};

SupervisionService::SupervisionService(Controller& controller, const std::string& address, unsigned short port)
    : impl_(std::make_unique<Impl>(controller, address, port)) {
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

SupervisionService::~SupervisionService() { shutdown(); }

unsigned short SupervisionService::port() const { return impl_->acceptor.local_endpoint().port(); }

void SupervisionService::broadcast(const nlohmann::json& message) {
  asio::post(impl_->io, [impl = impl_.get(), text = message.dump()] {
    for (const auto& c : impl->clients) c->send(text);
  });
}

void SupervisionService::shutdown() {
  if (!impl_ || !impl_->thread.joinable()) return;
  asio::post(impl_->io, [impl = impl_.get()] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    impl->clients.clear();
    impl->io.stop();
  });
  impl_->thread.join();
}

}  // namespace carebot
