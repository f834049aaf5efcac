// Logical clocks: scalar Lamport time for record/replay, vector clocks for
// the concurrency test, and matrix clocks (logical and snooped) for
// deciding which stored segments can no longer race with anything.
#ifndef RECPLAY_CLOCKS_H_
#define RECPLAY_CLOCKS_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace recplay {

using LamportTime = std::uint64_t;

// Timestamp for a sync op: max(thread, object) + 1. Both clocks advance to it.
LamportTime lamport_sync(LamportTime& thread_clock, LamportTime& object_clock);

class VectorClock {
 public:
  VectorClock() = default;
  explicit VectorClock(std::size_t n) : counters_(n, 0) {}
  VectorClock(std::initializer_list<std::uint64_t> init) : counters_(init) {}

  std::size_t size() const { return counters_.size(); }
  std::uint64_t operator[](std::size_t i) const { return counters_[i]; }
  std::uint64_t& operator[](std::size_t i) { return counters_[i]; }
  std::span<const std::uint64_t> values() const { return counters_; }

  void tick(std::size_t i) { ++counters_[i]; }
  // In-place componentwise maximum.
  void join_in(const VectorClock& other);
  // Componentwise <=.
  bool leq(const VectorClock& other) const;

  bool operator==(const VectorClock&) const = default;

 private:
  std::vector<std::uint64_t> counters_;
};

enum class ClockOrder { kBefore, kAfter, kConcurrent, kEqual };

std::string_view to_string(ClockOrder order);
std::string to_string(const VectorClock& clock);  // "[1,0,2]"
VectorClock parse_vector_clock(std::string_view text);

// Throws std::invalid_argument on length mismatch.
ClockOrder compare(const VectorClock& a, const VectorClock& b);
VectorClock join(const VectorClock& a, const VectorClock& b);

// Rows are vector clocks; row k describes thread k.
using MatrixClock = std::vector<VectorClock>;

// Component j is the minimum of column j over all rows.
VectorClock column_min(std::span<const VectorClock> rows);

struct SnoopedMatrixClock {
  MatrixClock rows;
  VectorClock horizon;
};

SnoopedMatrixClock snoop(std::span<const VectorClock> current_clocks);

// A closed segment whose clock is <= the horizon precedes every current and
// future segment, so it can never race again.
bool discardable(const VectorClock& segment_clock, const VectorClock& horizon);

}  // namespace recplay

#endif  // RECPLAY_CLOCKS_H_
