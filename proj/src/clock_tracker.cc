#include "recplay/clock_tracker.h"

namespace recplay {

namespace {

void join_matrix(MatrixClock& into, const MatrixClock& from) {
  for (std::size_t r = 0; r < into.size(); ++r) into[r].join_in(from[r]);
}

}  // namespace

ClockTracker::ClockTracker(const Program& program)
    : program_(program),
      create_base_(program.object_id(SyncObjectKind::kCreate, 0)),
      states_(program.thread_count(), State::kNotCreated) {
  const std::size_t n = program.thread_count();
  clocks_.assign(n, VectorClock(n));
  matrices_.assign(n, MatrixClock(n, VectorClock(n)));
  for (ThreadId t = 0; t < n; ++t) {
    clocks_[t][t] = 1;
    matrices_[t][t] = clocks_[t];
  }
  object_clocks_.assign(program.object_count(), VectorClock(n));
  object_matrices_.assign(program.object_count(), MatrixClock(n, VectorClock(n)));
  states_[program.main_thread] = State::kLive;
}

VectorClock ClockTracker::on_sync(const Event& e) {
  const ThreadId t = e.thread;
  VectorClock& clock = clocks_[t];
  MatrixClock& matrix = matrices_[t];
  VectorClock closed = clock;

  if (is_release(e.sync)) {
    object_clocks_[e.object].join_in(clock);
    join_matrix(object_matrices_[e.object], matrix);
  }
  if (is_acquire(e.sync)) {
    clock.join_in(object_clocks_[e.object]);
    join_matrix(matrix, object_matrices_[e.object]);
  }
  clock.tick(t);
  matrix[t] = clock;

  switch (e.sync) {
    case SyncKind::kCreate:
      states_[e.object - create_base_] = State::kPending;
      break;
    case SyncKind::kStart:
      states_[t] = State::kLive;
      break;
    case SyncKind::kExit:
      states_[t] = State::kExited;
      break;
    default:
      break;
  }
  return closed;
}

std::optional<SnoopedMatrixClock> ClockTracker::snoop() const {
  std::vector<VectorClock> rows;
  for (ThreadId t = 0; t < states_.size(); ++t) {
    if (states_[t] == State::kLive) rows.push_back(clocks_[t]);
    else if (states_[t] == State::kPending)
      rows.push_back(object_clocks_[program_.object_id(SyncObjectKind::kCreate, t)]);
  }
  if (rows.empty()) return std::nullopt;
  return recplay::snoop(rows);
}

std::optional<VectorClock> ClockTracker::logical_horizon(ThreadId observer) const {
  std::vector<VectorClock> rows;
  for (ThreadId t = 0; t < states_.size(); ++t)
    if (states_[t] == State::kLive || states_[t] == State::kPending) rows.push_back(matrices_[observer][t]);
  if (rows.empty()) return std::nullopt;
  return column_min(rows);
}

}  // namespace recplay
