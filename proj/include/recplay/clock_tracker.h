// Follows the sync events of one execution and maintains, per thread, the
// vector clock of its current segment and its logical matrix clock.
//
// Release-like ops (UNLOCK, SEM_POST, CREATE, EXIT) join the thread clock
// into the object clock; acquire-like ops (LOCK, SEM_WAIT, START, JOIN)
// join the object clock into the thread clock. Every sync op then ticks the
// thread's own component, which starts the next segment. Own components
// start at 1, so segment k of a thread carries own component k + 1.
#ifndef RECPLAY_CLOCK_TRACKER_H_
#define RECPLAY_CLOCK_TRACKER_H_

#include <optional>
#include <vector>

#include "recplay/clocks.h"
#include "recplay/model.h"

namespace recplay {

class ClockTracker {
 public:
  explicit ClockTracker(const Program& program);

  // Applies a sync event and returns the clock of the segment it closed.
  VectorClock on_sync(const Event& event);

  const VectorClock& current(ThreadId t) const { return clocks_[t]; }
  const MatrixClock& matrix(ThreadId t) const { return matrices_[t]; }
  std::size_t thread_count() const { return clocks_.size(); }

  bool live(ThreadId t) const { return states_[t] == State::kLive; }
  bool pending(ThreadId t) const { return states_[t] == State::kPending; }

  // Rows: the current clock of every live thread, and for a created but not
  // yet started thread the clock it will acquire at start. Threads not yet
  // created are covered by their (future) creator. Nullopt once no segment
  // can ever start again.
  std::optional<SnoopedMatrixClock> snoop() const;

  // Same row set, but each row is what `observer` causally knows about that
  // thread rather than its actual clock.
  std::optional<VectorClock> logical_horizon(ThreadId observer) const;

 private:
  enum class State : std::uint8_t { kNotCreated, kPending, kLive, kExited };

  const Program& program_;
  std::uint32_t create_base_;
  std::vector<State> states_;
  std::vector<VectorClock> clocks_;
  std::vector<MatrixClock> matrices_;
  std::vector<VectorClock> object_clocks_;
  std::vector<MatrixClock> object_matrices_;
};

}  // namespace recplay

#endif  // RECPLAY_CLOCK_TRACKER_H_
