#include <doctest.h>

#include <chrono>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "carebot/service.hpp"
#include "support.hpp"

using namespace carebot;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string command_text(const nlohmann::json& payload, std::optional<std::string> corr = std::nullopt) {
  nlohmann::json j{{"type", "command"}, {"schema_version", 1}, {"payload", payload}};
  if (corr) j["correlation_id"] = *corr;
  return j.dump();
}

std::string rejection(const std::string& text) {
  try {
    parse_command_message(text);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

class TestClient {
 public:
  explicit TestClient(unsigned short port) : ws_(io_) {
    tcp::resolver resolver(io_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }
  nlohmann::json read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return nlohmann::json::parse(beast::buffers_to_string(buf.data()));
  }
  void send(const std::string& text) {
    ws_.text(true);
    ws_.write(asio::buffer(text));
  }
  // Reads until a message of `type` arrives.
  nlohmann::json read_type(const std::string& type) {
    for (;;) {
      auto m = read();
      if (m["type"] == type) return m;
    }
  }

 private:
  asio::io_context io_;
  websocket::stream<tcp::socket> ws_;
};

}  // namespace

TEST_CASE("every command kind parses from its wire form") {
  const std::vector<std::pair<nlohmann::json, SupervisionCommand>> cases{
      {{{"kind", "select_scenario"}, {"scenario_id", "imitation"}}, SupervisionCommand::select_scenario("imitation")},
      {{{"kind", "start"}}, SupervisionCommand::simple(CommandKind::Start)},
      {{{"kind", "pause"}}, SupervisionCommand::simple(CommandKind::Pause)},
      {{{"kind", "resume"}}, SupervisionCommand::simple(CommandKind::Resume)},
      {{{"kind", "stop"}}, SupervisionCommand::simple(CommandKind::Stop)},
      {{{"kind", "set_mode"}, {"mode", "approval"}}, SupervisionCommand::set_mode(ControllerMode::Approval)},
      {{{"kind", "approve"}, {"behavior_id", 4}}, SupervisionCommand::approve(4)},
      {{{"kind", "deny"}, {"behavior_id", 5}}, SupervisionCommand::deny(5)},
      {{{"kind", "override_behavior"}, {"tag", "praise"}}, SupervisionCommand::override_behavior("praise")},
      {{{"kind", "set_difficulty"}, {"level", 2}}, SupervisionCommand::set_difficulty(2)},
  };
  CHECK(cases.size() == kCommandNames.size());
  for (const auto& [payload, expected] : cases) {
    CAPTURE(payload.dump());
    auto got = parse_command_message(command_text(payload, "x"));
    auto want = expected;
    want.correlation_id = "x";
    CHECK(got == want);
    CHECK(command_from_json(to_json(want)) == want);
  }
}

TEST_CASE("malformed command messages are rejected with a reason") {
  CHECK(rejection("{nope").find("malformed") != std::string::npos);
  CHECK(rejection("[1]").find("object") != std::string::npos);
  CHECK(rejection(R"({"type":"hello","schema_version":1,"payload":{}})").find("type") != std::string::npos);
  CHECK(rejection(R"({"type":"command","schema_version":2,"payload":{"kind":"start"}})").find("schema_version") !=
        std::string::npos);
  CHECK(rejection(R"({"type":"command","schema_version":1})").find("payload") != std::string::npos);
  CHECK(rejection(command_text({{"kind", "dance"}})).find("dance") != std::string::npos);
  CHECK(rejection(command_text({{"kind", "approve"}, {"behavior_id", "one"}})).find("behavior_id") !=
        std::string::npos);
  CHECK(rejection(command_text({{"kind", "set_mode"}, {"mode", "turbo"}})).find("turbo") != std::string::npos);
  CHECK_FALSE(rejection(command_text({{"kind", "start"}}).replace(1, 0, R"("correlation_id":7,)")).empty());
}

TEST_CASE("outbound envelopes") {
  auto c = test::make_controller();
  const auto hello = hello_message(*c);
  CHECK(hello["type"] == "hello");
  CHECK(hello["schema_version"] == kProtocolVersion);
  CHECK(hello["payload"]["robot_id"] == "nao_like");
  CHECK(hello["payload"]["command_kinds"].size() == 10);
  CHECK(hello["payload"]["scenarios"].size() == 3);
  CHECK(hello["payload"]["behaviors"].size() == 20);

  Acknowledgment ack{std::string("c1"), CommandKind::Pause, false, "session not started", 0};
  const auto a = ack_message(ack);
  CHECK(a["type"] == "ack");
  CHECK(ack_from_json(a["payload"]) == ack);
  const auto e = error_message("bad", std::nullopt);
  CHECK(e["type"] == "error");
  CHECK(e["payload"]["correlation_id"].is_null());
}

TEST_CASE("live round trip over a WebSocket") {
  auto c = test::make_controller();
  SupervisionService service(*c, "127.0.0.1", 0);
  REQUIRE(service.port() != 0);
  TestClient client(service.port());
  TestClient other(service.port());

  const auto hello = client.read();
  CHECK(hello["type"] == "hello");
  CHECK(other.read()["type"] == "hello");

  client.send("garbage");
  const auto err = client.read();
  CHECK(err["type"] == "error");

  client.send(command_text({{"kind", "start"}}, "go"));
  std::vector<Acknowledgment> acks;
  for (int i = 0; i < 200 && acks.empty(); ++i) {
    acks = c->poll();
    if (acks.empty()) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  REQUIRE(acks.size() == 1);
  CHECK(acks[0].accepted);
  CHECK(acks[0].correlation_id == "go");
  for (const auto& a : acks) service.broadcast(ack_message(a));

  const auto got = client.read_type("ack");
  CHECK(got["payload"]["correlation_id"] == "go");
  CHECK(got["payload"]["accepted"] == true);
  // The other client saw the ack but never the error.
  CHECK(other.read()["type"] == "ack");

  const auto r = c->tick({});
  service.broadcast(snapshot_message(r.record, *c));
  const auto snap = client.read_type("snapshot");
  CHECK(snap["payload"]["tick"] == 0);
  CHECK(snap["payload"]["scenario"]["id"] == "turn_taking");
  service.shutdown();
}
