#ifndef DHONDT_DOMAIN_HPP
#define DHONDT_DOMAIN_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dhondt {

// Raised for any violated precondition on caller-supplied data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Opaque identifier. The tag keeps users and items from being mixed up.
template <class Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {
    if (value_.empty()) throw InputError("identifier must be non-empty");
  }

  const std::string& str() const noexcept { return value_; }
  bool valid() const noexcept { return !value_.empty(); }

  friend bool operator==(const Id&, const Id&) = default;
  friend auto operator<=>(const Id& a, const Id& b) {
    return a.value_.compare(b.value_) <=> 0;
  }

 private:
  std::string value_;
};

struct ItemTag;
struct UserTag;
using ItemId = Id<ItemTag>;
using UserId = Id<UserTag>;

enum class EventKind { view, add_to_cart, transaction, other };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::view: return "view";
    case EventKind::add_to_cart: return "addtocart";
    case EventKind::transaction: return "transaction";
    case EventKind::other: return "other";
  }
  return "other";
}

inline EventKind parse_event_kind(std::string_view token) {
  if (token == "view") return EventKind::view;
  if (token == "addtocart" || token == "add-to-cart" || token == "add_to_cart")
    return EventKind::add_to_cart;
  if (token == "transaction") return EventKind::transaction;
  return EventKind::other;
}

struct InteractionEvent {
  std::int64_t timestamp = 0;  // milliseconds since epoch
  UserId user;
  ItemId item;
  EventKind kind = EventKind::view;

  InteractionEvent() = default;
  InteractionEvent(std::int64_t ts, UserId u, ItemId i,
                   EventKind k = EventKind::view)
      : timestamp(ts), user(std::move(u)), item(std::move(i)), kind(k) {
    if (timestamp < 0) throw InputError("event timestamp must be >= 0");
    if (!user.valid() || !item.valid())
      throw InputError("event requires a user and an item");
  }

  friend bool operator==(const InteractionEvent&,
                         const InteractionEvent&) = default;
};

// Events ordered by non-decreasing timestamp. Only sort_stream and slice
// construct one, so the ordering holds for every instance.
class EventStream {
 public:
  EventStream() = default;

  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const InteractionEvent& operator[](std::size_t i) const { return events_[i]; }
  auto begin() const noexcept { return events_.begin(); }
  auto end() const noexcept { return events_.end(); }
  std::span<const InteractionEvent> events() const noexcept { return events_; }

  // Contiguous sub-range [first, last); order is inherited.
  EventStream slice(std::size_t first, std::size_t last) const {
    if (first > last || last > events_.size())
      throw InputError("stream slice out of range");
    EventStream out;
    out.events_.assign(events_.begin() + static_cast<std::ptrdiff_t>(first),
                       events_.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
  }

  // Keeps the events for which pred holds, preserving order.
  template <class Pred>
  EventStream filter(Pred&& pred) const {
    EventStream out;
    for (const auto& ev : events_)
      if (pred(ev)) out.events_.push_back(ev);
    return out;
  }

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  friend EventStream sort_stream(std::vector<InteractionEvent> events);
  std::vector<InteractionEvent> events_;
};

// Stable sort by timestamp; equal timestamps keep their input order.
inline EventStream sort_stream(std::vector<InteractionEvent> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const InteractionEvent& a, const InteractionEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  EventStream out;
  out.events_ = std::move(events);
  return out;
}

inline EventStream sort_stream(const EventStream& stream) {
  return sort_stream(
      std::vector<InteractionEvent>(stream.begin(), stream.end()));
}

}  // namespace dhondt

template <class Tag>
struct std::hash<dhondt::Id<Tag>> {
  std::size_t operator()(const dhondt::Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

#endif  // DHONDT_DOMAIN_HPP
