#ifndef DHONDT_RECOMMENDERS_SESSIONS_HPP
#define DHONDT_RECOMMENDERS_SESSIONS_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "dhondt/recommenders/recommender.hpp"

namespace dhondt::detail {

inline constexpr std::int64_t kMillisPerMinute = 60'000;

struct Session {
  UserId user;
  std::int64_t start = 0;
  std::vector<std::size_t> items;  // vocabulary indices in event order
};

// Splits each user's events at inactivity gaps longer than `gap_ms`.
// Sessions come back ordered by start time, then by user.
inline std::vector<Session> split_sessions(const EventStream& events,
                                           const ItemVocabulary& vocab,
                                           std::int64_t gap_ms) {
  std::map<UserId, std::vector<const InteractionEvent*>> by_user;
  for (const auto& ev : events) by_user[ev.user].push_back(&ev);

  std::vector<Session> sessions;
  for (const auto& [user, evs] : by_user) {
    Session current{user, evs.front()->timestamp, {}};
    std::int64_t last = evs.front()->timestamp;
    for (const auto* ev : evs) {
      if (ev->timestamp - last > gap_ms && !current.items.empty()) {
        sessions.push_back(std::move(current));
        current = Session{user, ev->timestamp, {}};
      }
      last = ev->timestamp;
      auto idx = vocab.find(ev->item);
      if (idx >= 0) current.items.push_back(static_cast<std::size_t>(idx));
    }
    if (!current.items.empty()) sessions.push_back(std::move(current));
  }
  std::stable_sort(sessions.begin(), sessions.end(),
                   [](const Session& a, const Session& b) {
                     return a.start < b.start;
                   });
  return sessions;
}

// Trailing part of the context that forms the current session. Without
// timestamps the last `fallback_len` items are used.
inline std::vector<ItemId> current_session(const RecommendationContext& ctx,
                                           std::int64_t gap_ms,
                                           std::size_t fallback_len) {
  const auto& items = ctx.recent_items;
  if (items.empty()) return {};
  std::size_t first = items.size() > fallback_len ? items.size() - fallback_len : 0;
  if (ctx.recent_timestamps.size() == items.size()) {
    first = items.size() - 1;
    while (first > 0 &&
           ctx.recent_timestamps[first] - ctx.recent_timestamps[first - 1] <= gap_ms)
      --first;
  }
  return {items.begin() + static_cast<std::ptrdiff_t>(first), items.end()};
}

}  // namespace dhondt::detail

#endif  // DHONDT_RECOMMENDERS_SESSIONS_HPP
