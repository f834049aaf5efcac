#include "recplay/identify.h"

#include <array>
#include <functional>
#include <optional>

#include "recplay/replay.h"

namespace recplay {

namespace {

class Identifier : public ExecutionObserver {
 public:
  explicit Identifier(const Program& program, const RaceReport& report)
      : report_(report), segment_index_(program.thread_count(), 0) {}

  void on_event(const Event& e) override {
    const ThreadId t = e.thread;
    if (e.kind == EventKind::kSync) {
      for (Watch& w : watches()) {
        if (w.side->segment.thread == t && w.side->segment.index == segment_index_[t]) w.done = true;
      }
      ++segment_index_[t];
      return;
    }
    // Only the two reported segments get per-access bookkeeping.
    for (Watch& w : watches()) {
      if (w.side->segment.thread != t || w.side->segment.index != segment_index_[t]) continue;
      w.reached = true;
      const AccessKind kind = e.kind == EventKind::kLoad ? AccessKind::kLoad : AccessKind::kStore;
      if (!w.hit && e.address == report_.witness() && kind == w.side->kind)
        w.hit = RacingAccess{t, e.ordinal, kind, e.address};
    }
  }

  bool stop_requested() const override { return first_.done && second_.done; }

  Identification result() const {
    for (const Watch* w : {&first_, &second_}) {
      const std::string where = "thread " + std::to_string(w->side->segment.thread) + " segment " +
                                std::to_string(w->side->segment.index);
      if (!w->reached) throw IdentifyError(where + " was never reached during replay");
      if (!w->hit)
        throw IdentifyError(where + " has no " + std::string(to_string(w->side->kind)) + " of " +
                            hex_address(report_.witness()));
    }
    return {*first_.hit, *second_.hit};
  }

 private:
  struct Watch {
    const RaceSide* side;
    bool reached = false;
    bool done = false;
    std::optional<RacingAccess> hit = std::nullopt;
  };

  std::array<std::reference_wrapper<Watch>, 2> watches() { return {first_, second_}; }

  const RaceReport& report_;
  std::vector<std::uint32_t> segment_index_;
  Watch first_{&report_.first};
  Watch second_{&report_.second};
};

}  // namespace

Identification identify(const Program& program, const SyncTrace& trace, const RaceReport& report,
                        ScheduleSeed replay_seed) {
  check_trace_matches(program, trace);
  if (report.program_digest != trace.program_digest)
    throw TraceMismatchError("race report was produced for a different program");
  for (const RaceSide* s : {&report.first, &report.second})
    if (s->segment.thread >= program.thread_count())
      throw IdentifyError("report names thread " + std::to_string(s->segment.thread) + " which does not exist");
  Identifier identifier(program, report);
  ReplayResult replay = replay_execution(program, trace, &identifier, replay_seed);
  if (replay.verdict == ReplayVerdict::kDiverged && !replay.execution.stopped) {
    // Still fine if both segments were fully seen before the divergence.
    try {
      return identifier.result();
    } catch (const IdentifyError& e) {
      throw IdentifyError(std::string(e.what()) + " (replay diverged: " + replay.divergence + ")");
    }
  }
  return identifier.result();
}

std::string format_identification(const Identification& id) {
  auto line = [](const char* key, const RacingAccess& a) {
    return std::string(key) + "=" + std::to_string(a.thread) + ":" + std::to_string(a.ordinal) + " " +
           std::string(to_string(a.kind)) + "\n";
  };
  return line("i1", id.first) + line("i2", id.second);
}

}  // namespace recplay
