#include "recplay/record.h"

namespace recplay {

namespace {

class Recorder : public ExecutionObserver {
 public:
  explicit Recorder(const Program& program)
      : traced_(program),
        thread_clocks_(program.thread_count(), 0),
        object_clocks_(program.object_count(), 0),
        timestamps_(program.thread_count()) {}

  void on_event(const Event& e) override {
    if (e.kind != EventKind::kSync || !traced_(e.thread, e.sync)) return;
    timestamps_[e.thread].push_back(lamport_sync(thread_clocks_[e.thread], object_clocks_[e.object]));
  }

  std::vector<std::vector<LamportTime>> take() { return std::move(timestamps_); }

 private:
  TracedOps traced_;
  std::vector<LamportTime> thread_clocks_;
  std::vector<LamportTime> object_clocks_;
  std::vector<std::vector<LamportTime>> timestamps_;
};

}  // namespace

RecordResult record_execution(const Program& program, ScheduleSeed seed) {
  Recorder recorder(program);
  RecordResult result;
  result.execution = run(program, seed, &recorder);
  result.trace.seed = seed.value;
  result.trace.program_digest = digest(program);
  result.trace.threads = recorder.take();
  return result;
}

}  // namespace recplay
