// On-the-fly segment race detection during replay.
//
// Every sync op closes the current segment of its thread. The closed segment
// is compared against each stored segment whose clock is concurrent with
// its own, in ascending (thread, segment index) order, and stored if it
// touched memory. Then all threads' current clocks are snooped and stored
// segments at or below the resulting horizon are dropped.
#ifndef RECPLAY_DETECTOR_H_
#define RECPLAY_DETECTOR_H_

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "recplay/bitmap.h"
#include "recplay/clock_tracker.h"
#include "recplay/replay.h"
#include "recplay/report.h"

namespace recplay {

struct Segment {
  SegmentId id;
  MultilevelBitmap loads;
  MultilevelBitmap stores;
  VectorClock clock;
  std::uint32_t first_ordinal = 0;
  std::uint32_t last_ordinal = 0;
  bool touched = false;  // saw at least one memory access
};

enum class GcPolicy { kNone, kLogical, kSnooped };

std::string_view to_string(GcPolicy policy);

struct DetectorOptions {
  GcPolicy gc = GcPolicy::kSnooped;
  bool all_races = false;
  // Track how many segments snooped and logical matrix clocks would keep,
  // independent of `gc`.
  bool probe_live_segments = false;
  // Keep (id, clock) of every closed and every discarded segment.
  bool keep_ghosts = false;
  ScheduleSeed replay_seed{0};
};

struct DetectorStats {
  std::uint64_t memory_accesses = 0;
  std::uint64_t sync_ops = 0;
  std::uint64_t segments_created = 0;  // closed segments with memory accesses
  std::uint64_t max_stored = 0;
  std::uint64_t compared = 0;  // concurrent pairs run through the race test
  std::uint64_t snoop_points = 0;
};

struct LiveSegmentSample {
  std::uint64_t point = 0;
  std::size_t snooped = 0;
  std::size_t logical = 0;
};

struct GhostRecord {
  SegmentId id;
  VectorClock clock;
  std::uint64_t point = 0;  // snoop point at which it was closed / dropped
};

class RaceDetector : public ExecutionObserver {
 public:
  RaceDetector(const Program& program, DetectorOptions options);

  void on_event(const Event& event) override;
  bool stop_requested() const override { return !options_.all_races && !races_.empty(); }

  const std::vector<RaceReport>& races() const { return races_; }
  const DetectorStats& stats() const { return stats_; }
  const std::vector<LiveSegmentSample>& probe() const { return probe_; }
  const std::vector<GhostRecord>& closed_segments() const { return closed_; }
  const std::vector<GhostRecord>& discarded_segments() const { return discarded_; }
  std::size_t stored_count() const { return stored_count_; }

 private:
  void on_memory(const Event& e);
  void on_sync(const Event& e);
  void compare_and_store(Segment segment);
  void collect(std::optional<VectorClock> horizon);
  RaceReport make_report(const Segment& earlier, const Segment& later, std::vector<Address> witnesses) const;

  DetectorOptions options_;
  std::uint64_t digest_;
  ClockTracker tracker_;
  std::vector<Segment> open_;
  std::vector<std::deque<Segment>> stored_;
  std::size_t stored_count_ = 0;
  // Clocks of touched segments that each matrix-clock flavour would still keep.
  std::vector<std::deque<VectorClock>> snooped_live_;
  std::vector<std::deque<VectorClock>> logical_live_;
  std::size_t snooped_live_count_ = 0;
  std::size_t logical_live_count_ = 0;

  DetectorStats stats_;
  std::vector<RaceReport> races_;
  std::vector<LiveSegmentSample> probe_;
  std::vector<GhostRecord> closed_;
  std::vector<GhostRecord> discarded_;
};

enum class DetectOutcome { kClean, kRace, kDivergedWithoutRace };

struct DetectionResult {
  DetectOutcome outcome = DetectOutcome::kClean;
  std::optional<RaceReport> race;  // first race
  std::vector<RaceReport> races;   // every race, with all_races
  std::string diagnostic;
  DetectorStats stats;
  std::vector<LiveSegmentSample> probe;
  std::vector<GhostRecord> closed_segments;
  std::vector<GhostRecord> discarded_segments;
  ReplayResult replay;
};

// Replays `trace` and stops at the first race (unless all_races is set).
DetectionResult detect(const Program& program, const SyncTrace& trace, const DetectorOptions& options = {});

std::string format_probe_csv(const std::vector<LiveSegmentSample>& samples);

}  // namespace recplay

#endif  // RECPLAY_DETECTOR_H_
