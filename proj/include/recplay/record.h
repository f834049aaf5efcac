#ifndef RECPLAY_RECORD_H_
#define RECPLAY_RECORD_H_

#include "recplay/model.h"
#include "recplay/trace.h"

namespace recplay {

// Sync ops that go into the trace. EXIT of a thread nobody joins orders
// nothing and is left out.
class TracedOps {
 public:
  explicit TracedOps(const Program& program) : joined_(joined_threads(program)) {}
  bool operator()(ThreadId t, SyncKind kind) const {
    return kind != SyncKind::kNone && (kind != SyncKind::kExit || joined_[t]);
  }

 private:
  std::vector<bool> joined_;
};

struct RecordResult {
  SyncTrace trace;
  ExecutionResult execution;
};

// Runs the program once, stamping every traced sync op with a Lamport time.
// Memory accesses are not traced. DeadlockError propagates.
RecordResult record_execution(const Program& program, ScheduleSeed seed);

}  // namespace recplay

#endif  // RECPLAY_RECORD_H_
