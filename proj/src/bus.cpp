#include "beamlab/bus.hpp"

#include <algorithm>
#include <cctype>

#include "beamlab/error.hpp"

namespace beamlab {

bool valid_topic(std::string_view topic) {
  if (topic.empty() || topic.front() == '/' || topic.back() == '/') return false;
  if (topic.find("//") != std::string_view::npos) return false;
  return std::none_of(topic.begin(), topic.end(), [](unsigned char c) {
    return std::isspace(c) || c == '*' || std::iscntrl(c);
  });
}

bool valid_pattern(std::string_view pattern) {
  if (pattern == "*") return true;
  if (pattern.size() > 2 && pattern.ends_with("/*"))
    return valid_topic(pattern.substr(0, pattern.size() - 2));
  return valid_topic(pattern);
}

bool topic_matches(std::string_view pattern, std::string_view topic) {
  if (pattern == "*") return true;
  if (pattern.ends_with("/*")) {
    const auto prefix = pattern.substr(0, pattern.size() - 1);  // keeps the slash
    return topic.size() > prefix.size() && topic.starts_with(prefix);
  }
  return pattern == topic;
}

std::string to_wire(const bus_message& msg) {
  nlohmann::ordered_json j;
  j["topic"] = msg.topic;
  j["timestamp_ms"] = msg.timestamp_ms;
  j["payload"] = msg.payload;
  return j.dump();
}

bus_message from_wire(std::string_view frame) {
  const auto j = nlohmann::json::parse(frame, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw error(errc::parse, "frame is not a JSON object");
  const auto topic = j.find("topic");
  if (topic == j.end() || !topic->is_string()) throw error(errc::parse, "frame has no topic");
  if (!valid_topic(topic->get<std::string>()))
    throw error(errc::parse, "malformed topic '" + topic->get<std::string>() + "'");
  const auto payload = j.find("payload");
  if (payload == j.end()) throw error(errc::parse, "frame has no payload");
  bus_message msg{topic->get<std::string>(), 0, *payload};
  if (const auto ts = j.find("timestamp_ms"); ts != j.end()) {
    if (!ts->is_number_integer()) throw error(errc::parse, "timestamp_ms must be an integer");
    msg.timestamp_ms = ts->get<std::int64_t>();
  }
  return msg;
}

subscription::subscription(std::string pattern, handler h)
    : pattern_(std::move(pattern)), handler_(std::move(h)) {}

void subscription::deliver(const bus_message& msg) {
  std::unique_lock lock(mutex_);
  if (handler_) {
    handler_(msg);
    return;
  }
  queue_.push_back(msg);
  lock.unlock();
  ready_.notify_one();
}

std::optional<bus_message> subscription::try_pop() {
  std::lock_guard lock(mutex_);
  if (queue_.empty()) return std::nullopt;
  auto msg = std::move(queue_.front());
  queue_.pop_front();
  return msg;
}

std::optional<bus_message> subscription::pop_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  if (!ready_.wait_for(lock, timeout, [&] { return !queue_.empty(); })) return std::nullopt;
  auto msg = std::move(queue_.front());
  queue_.pop_front();
  return msg;
}

std::vector<bus_message> subscription::drain() {
  std::lock_guard lock(mutex_);
  std::vector<bus_message> out(std::make_move_iterator(queue_.begin()),
                               std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

std::size_t subscription::size() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

subscription_ptr broker::subscribe(std::string pattern, subscription::handler h) {
  if (!valid_pattern(pattern)) throw error(errc::subscribe, "malformed pattern '" + pattern + "'");
  auto sub = std::make_shared<subscription>(std::move(pattern), std::move(h));
  std::lock_guard lock(subs_mutex_);
  subs_.push_back(sub);
  return sub;
}

void broker::unsubscribe(const subscription_ptr& sub) {
  std::lock_guard lock(subs_mutex_);
  std::erase(subs_, sub);
}

void broker::publish(bus_message msg) {
  if (!valid_topic(msg.topic)) throw error(errc::publish, "malformed topic '" + msg.topic + "'");
  std::lock_guard order(publish_mutex_);
  std::vector<subscription_ptr> targets;
  {
    std::lock_guard lock(subs_mutex_);
    for (const auto& s : subs_)
      if (topic_matches(s->pattern(), msg.topic)) targets.push_back(s);
  }
  for (const auto& s : targets) s->deliver(msg);
}

void broker::publish(std::string topic, std::int64_t timestamp_ms, nlohmann::json payload) {
  publish(bus_message{std::move(topic), timestamp_ms, std::move(payload)});
}

std::size_t broker::subscriber_count() const {
  std::lock_guard lock(subs_mutex_);
  return subs_.size();
}

}  // namespace beamlab
