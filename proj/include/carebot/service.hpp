#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "carebot/controller.hpp"

namespace carebot {

inline constexpr int kProtocolVersion = 1;

// Outbound envelopes: {type, schema_version, payload}.
nlohmann::json hello_message(const Controller& controller);
nlohmann::json snapshot_message(const SessionRecord& record, const Controller& controller);
nlohmann::json ack_message(const Acknowledgment& ack);
nlohmann::json error_message(const std::string& reason, const std::optional<std::string>& correlation_id);

/// Parses an inbound `{type: "command", schema_version, correlation_id, payload: {kind, ...}}`.
/// Throws std::invalid_argument describing the problem.
SupervisionCommand parse_command_message(const std::string& text);

/// WebSocket endpoint. Inbound commands go to the controller's inbox; the
/// control loop publishes snapshots and acknowledgments with `broadcast`.
class SupervisionService {
 public:
  SupervisionService(Controller& controller, const std::string& address, unsigned short port);
  ~SupervisionService();
  SupervisionService(const SupervisionService&) = delete;
  SupervisionService& operator=(const SupervisionService&) = delete;

  /// Port actually bound (useful when constructed with port 0).
  unsigned short port() const;
  /// Thread-safe; delivered to every connected client.
  void broadcast(const nlohmann::json& message);
  void shutdown();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace carebot
