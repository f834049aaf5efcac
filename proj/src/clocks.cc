#include "recplay/clocks.h"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace recplay {

namespace {

void check_lengths(const VectorClock& a, const VectorClock& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("vector clock length mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
}

}  // namespace

LamportTime lamport_sync(LamportTime& thread_clock, LamportTime& object_clock) {
  const LamportTime t = std::max(thread_clock, object_clock) + 1;
  thread_clock = object_clock = t;
  return t;
}

void VectorClock::join_in(const VectorClock& other) {
  check_lengths(*this, other);
  for (std::size_t i = 0; i < counters_.size(); ++i) counters_[i] = std::max(counters_[i], other.counters_[i]);
}

bool VectorClock::leq(const VectorClock& other) const {
  check_lengths(*this, other);
  for (std::size_t i = 0; i < counters_.size(); ++i)
    if (counters_[i] > other.counters_[i]) return false;
  return true;
}

std::string_view to_string(ClockOrder order) {
  switch (order) {
    case ClockOrder::kBefore: return "before";
    case ClockOrder::kAfter: return "after";
    case ClockOrder::kConcurrent: return "concurrent";
    case ClockOrder::kEqual: return "equal";
  }
  return "?";
}

std::string to_string(const VectorClock& clock) {
  std::string out = "[";
  for (std::size_t i = 0; i < clock.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(clock[i]);
  }
  return out + "]";
}

VectorClock parse_vector_clock(std::string_view text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw std::invalid_argument("malformed vector clock '" + std::string(text) + "'");
  text = text.substr(1, text.size() - 2);
  std::vector<std::uint64_t> values;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      throw std::invalid_argument("malformed vector clock component '" + std::string(item) + "'");
    values.push_back(v);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  VectorClock clock(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) clock[i] = values[i];
  return clock;
}

ClockOrder compare(const VectorClock& a, const VectorClock& b) {
  check_lengths(a, b);
  bool less = false, greater = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    less |= a[i] < b[i];
    greater |= a[i] > b[i];
  }
  if (less && greater) return ClockOrder::kConcurrent;
  if (less) return ClockOrder::kBefore;
  if (greater) return ClockOrder::kAfter;
  return ClockOrder::kEqual;
}

VectorClock join(const VectorClock& a, const VectorClock& b) {
  VectorClock out = a;
  out.join_in(b);
  return out;
}

VectorClock column_min(std::span<const VectorClock> rows) {
  if (rows.empty()) throw std::invalid_argument("column_min of an empty matrix");
  VectorClock out = rows.front();
  for (const auto& row : rows.subspan(1)) {
    check_lengths(out, row);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::min(out[j], row[j]);
  }
  return out;
}

SnoopedMatrixClock snoop(std::span<const VectorClock> current_clocks) {
  SnoopedMatrixClock m;
  m.rows.assign(current_clocks.begin(), current_clocks.end());
  m.horizon = column_min(current_clocks);
  return m;
}

bool discardable(const VectorClock& segment_clock, const VectorClock& horizon) {
  return segment_clock.leq(horizon);
}

}  // namespace recplay
