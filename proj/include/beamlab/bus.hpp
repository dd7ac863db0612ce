#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace beamlab {

namespace topics {
inline constexpr const char* detections = "sensing/detections";
inline constexpr const char* decision = "bm/decision";
inline constexpr const char* rsrp = "ran/rsrp";
inline constexpr const char* ssb = "ran/ssb";
inline constexpr const char* obstacle_cmd = "ui/obstacle_cmd";
inline constexpr const char* scene = "ui/scene";
}  // namespace topics

struct bus_message {
  std::string topic;
  std::int64_t timestamp_ms = 0;
  nlohmann::json payload;

  friend bool operator==(const bus_message&, const bus_message&) = default;
};

bool valid_topic(std::string_view topic);
// Exact topic, "prefix/*", or "*".
bool valid_pattern(std::string_view pattern);
bool topic_matches(std::string_view pattern, std::string_view topic);

// Single-line JSON {topic, timestamp_ms, payload}.
std::string to_wire(const bus_message& msg);
// Throws errc::parse on malformed frames; timestamp_ms defaults to 0.
bus_message from_wire(std::string_view frame);

class broker;

class subscription {
 public:
  using handler = std::function<void(const bus_message&)>;

  explicit subscription(std::string pattern, handler h = {});

  const std::string& pattern() const noexcept { return pattern_; }

  std::optional<bus_message> try_pop();
  std::optional<bus_message> pop_for(std::chrono::milliseconds timeout);
  std::vector<bus_message> drain();
  std::size_t size() const;

 private:
  friend class broker;
  void deliver(const bus_message& msg);

  std::string pattern_;
  handler handler_;
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<bus_message> queue_;
};

using subscription_ptr = std::shared_ptr<subscription>;

/// In-process pub/sub broker.
///
/// Publishes are linearized, so every subscriber observes one global order
/// and per-topic FIFO holds across concurrent publishers. Subscriptions with
/// a handler get a synchronous callback instead of a queue entry; a handler
/// never runs concurrently with itself. No retained messages.
class broker {
 public:
  subscription_ptr subscribe(std::string pattern, subscription::handler h = {});
  void unsubscribe(const subscription_ptr& sub);
  void publish(bus_message msg);
  void publish(std::string topic, std::int64_t timestamp_ms, nlohmann::json payload);

  std::size_t subscriber_count() const;

 private:
  mutable std::mutex subs_mutex_;
  std::vector<subscription_ptr> subs_;
  std::recursive_mutex publish_mutex_;
};

}  // namespace beamlab
