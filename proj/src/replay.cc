#include "recplay/replay.h"

#include <cstdio>
#include <map>

#include "recplay/record.h"

namespace recplay {

namespace {

class ReplayDriver : public ExecutionObserver {
 public:
  ReplayDriver(const Program& program, const SyncTrace& trace, ExecutionObserver* inner)
      : traced_(program), trace_(trace), inner_(inner), executed_(trace.threads.size(), 0) {
    for (const auto& per_thread : trace.threads)
      for (LamportTime ts : per_thread) ++outstanding_[ts];
  }

  bool may_step(const PendingOp& op) override {
    if (!traced_(op.thread, op.sync_kind())) return inner_ == nullptr || inner_->may_step(op);
    const std::size_t next = executed_[op.thread];
    if (next >= trace_.threads[op.thread].size()) {
      // The thread wants a sync op the recording never saw.
      if (divergence_.empty())
        divergence_ = "thread " + std::to_string(op.thread) + " attempts sync op #" + std::to_string(next) +
                      " beyond the " + std::to_string(trace_.threads[op.thread].size()) + " recorded";
      return false;
    }
    const LamportTime ts = trace_.threads[op.thread][next];
    if (outstanding_.empty() || outstanding_.begin()->first != ts) return false;
    return inner_ == nullptr || inner_->may_step(op);
  }

  void on_event(const Event& e) override {
    if (e.kind == EventKind::kSync && traced_(e.thread, e.sync)) {
      const LamportTime ts = trace_.threads[e.thread][executed_[e.thread]++];
      auto it = outstanding_.find(ts);
      if (--it->second == 0) outstanding_.erase(it);
    }
    if (inner_ != nullptr) inner_->on_event(e);
  }

  bool stop_requested() const override {
    return !divergence_.empty() || (inner_ != nullptr && inner_->stop_requested());
  }

  const std::string& divergence() const { return divergence_; }

  // Threads that finished with recorded sync ops left over.
  std::string unfinished() const {
    for (ThreadId t = 0; t < executed_.size(); ++t)
      if (executed_[t] != trace_.threads[t].size())
        return "thread " + std::to_string(t) + " executed " + std::to_string(executed_[t]) + " of " +
               std::to_string(trace_.threads[t].size()) + " recorded sync ops";
    return {};
  }

 private:
  TracedOps traced_;
  const SyncTrace& trace_;
  ExecutionObserver* inner_;
  std::vector<std::size_t> executed_;
  std::map<LamportTime, std::size_t> outstanding_;
  std::string divergence_;
};

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string_view to_string(ReplayVerdict verdict) {
  return verdict == ReplayVerdict::kOk ? "ok" : "diverged";
}

void check_trace_matches(const Program& program, const SyncTrace& trace) {
  const std::uint64_t d = digest(program);
  if (trace.program_digest != d)
    throw TraceMismatchError("trace was recorded for program " + hex64(trace.program_digest) +
                             ", not " + hex64(d));
  if (trace.threads.size() != program.thread_count())
    throw TraceMismatchError("trace has " + std::to_string(trace.threads.size()) + " threads, program has " +
                             std::to_string(program.thread_count()));
}

ReplayResult replay_execution(const Program& program, const SyncTrace& trace, ExecutionObserver* observer,
                              ScheduleSeed tie_break) {
  check_trace_matches(program, trace);
  ReplayDriver driver(program, trace, observer);
  ReplayResult result;
  try {
    result.execution = run(program, tie_break, &driver);
  } catch (const DeadlockError& e) {
    result.verdict = ReplayVerdict::kDiverged;
    result.divergence = driver.divergence().empty() ? std::string("replay stalled: ") + e.what()
                                                    : driver.divergence();
    return result;
  }
  if (!driver.divergence().empty()) {
    result.verdict = ReplayVerdict::kDiverged;
    result.divergence = driver.divergence();
    result.execution.stopped = false;
  } else if (!result.execution.stopped) {
    if (std::string left = driver.unfinished(); !left.empty()) {
      result.verdict = ReplayVerdict::kDiverged;
      result.divergence = left;
    }
  }
  return result;
}

}  // namespace recplay
