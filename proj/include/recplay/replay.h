// Guided re-execution from a ROLT trace: a traced sync op may only run once
// every sync op with a smaller recorded timestamp has run. Ops sharing a
// timestamp are concurrent and run in whatever order the tie-break seed
// picks.
#ifndef RECPLAY_REPLAY_H_
#define RECPLAY_REPLAY_H_

#include <stdexcept>
#include <string>

#include "recplay/model.h"
#include "recplay/trace.h"

namespace recplay {

class TraceMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReplayVerdict { kOk, kDiverged };

std::string_view to_string(ReplayVerdict verdict);

struct ReplayResult {
  ReplayVerdict verdict = ReplayVerdict::kOk;
  std::string divergence;  // empty when verdict is kOk
  ExecutionResult execution;
};

void check_trace_matches(const Program& program, const SyncTrace& trace);

// `observer` sees every event, memory accesses included, and may stop the
// replay early; a stopped replay is not a divergence.
ReplayResult replay_execution(const Program& program, const SyncTrace& trace,
                              ExecutionObserver* observer = nullptr,
                              ScheduleSeed tie_break = {0});

}  // namespace recplay

#endif  // RECPLAY_REPLAY_H_
