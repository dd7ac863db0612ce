#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace beamlab {

class broker;

inline constexpr std::uint16_t default_bridge_port = 8787;

/// WebSocket front end for a broker.
///
/// Clients pick topics with `?topics=a/*,b` at connect time or by sending
/// {"subscribe": [...]}. Every other inbound frame must look like a bus
/// message and is published as-is; malformed frames get an {"error": ...}
/// reply and the connection stays open.
class ws_bridge {
 public:
  // Port 0 binds an ephemeral port. Throws errc::startup if the port is taken.
  ws_bridge(broker& bus, std::uint16_t port, const std::string& address = "127.0.0.1");
  ~ws_bridge();

  ws_bridge(const ws_bridge&) = delete;
  ws_bridge& operator=(const ws_bridge&) = delete;

  std::uint16_t port() const noexcept;
  std::size_t client_count() const;
  void stop();

 private:
  struct impl;
  std::unique_ptr<impl> impl_;
};

std::unique_ptr<ws_bridge> bridge_serve(broker& bus, std::uint16_t port);

}  // namespace beamlab
