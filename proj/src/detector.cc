#include "recplay/detector.h"

#include <algorithm>

namespace recplay {

namespace {

template <typename T, typename ClockOf>
std::size_t drop_prefix(std::deque<T>& list, const VectorClock* horizon, ClockOf clock_of) {
  // Segments of one thread have increasing clocks, so the droppable ones
  // always form a prefix.
  std::size_t dropped = 0;
  while (!list.empty() && (horizon == nullptr || discardable(clock_of(list.front()), *horizon))) {
    list.pop_front();
    ++dropped;
  }
  return dropped;
}

}  // namespace

std::string_view to_string(GcPolicy policy) {
  switch (policy) {
    case GcPolicy::kNone: return "none";
    case GcPolicy::kLogical: return "logical";
    case GcPolicy::kSnooped: return "snooped";
  }
  return "?";
}

RaceDetector::RaceDetector(const Program& program, DetectorOptions options)
    : options_(options),
      digest_(digest(program)),
      tracker_(program),
      open_(program.thread_count()),
      stored_(program.thread_count()),
      snooped_live_(program.thread_count()),
      logical_live_(program.thread_count()) {
  for (ThreadId t = 0; t < open_.size(); ++t) open_[t].id = {t, 0};
}

void RaceDetector::on_event(const Event& e) {
  if (e.is_memory()) on_memory(e);
  else on_sync(e);
}

void RaceDetector::on_memory(const Event& e) {
  ++stats_.memory_accesses;
  Segment& seg = open_[e.thread];
  if (!seg.touched) seg.first_ordinal = e.ordinal;
  seg.last_ordinal = e.ordinal;
  seg.touched = true;
  (e.kind == EventKind::kLoad ? seg.loads : seg.stores).insert(e.address);
}

void RaceDetector::on_sync(const Event& e) {
  ++stats_.sync_ops;
  const ThreadId t = e.thread;
  Segment closed = std::move(open_[t]);
  closed.clock = tracker_.on_sync(e);
  open_[t] = Segment{};
  open_[t].id = {t, closed.id.index + 1};

  ++stats_.snoop_points;
  if (options_.keep_ghosts) closed_.push_back({closed.id, closed.clock, stats_.snoop_points});
  if (options_.probe_live_segments && closed.touched) {
    snooped_live_[t].push_back(closed.clock);
    logical_live_[t].push_back(closed.clock);
    ++snooped_live_count_;
    ++logical_live_count_;
  }
  if (closed.touched) compare_and_store(std::move(closed));

  // No horizon means no segment can ever start again: everything goes.
  std::optional<VectorClock> snooped;
  if (auto m = tracker_.snoop()) snooped = std::move(m->horizon);
  const std::optional<VectorClock> logical = tracker_.logical_horizon(t);

  switch (options_.gc) {
    case GcPolicy::kNone:
      break;
    case GcPolicy::kSnooped:
      collect(snooped);
      break;
    case GcPolicy::kLogical:
      collect(logical);
      break;
  }

  if (options_.probe_live_segments) {
    auto identity = [](const VectorClock& c) -> const VectorClock& { return c; };
    for (ThreadId u = 0; u < snooped_live_.size(); ++u) {
      snooped_live_count_ -= drop_prefix(snooped_live_[u], snooped ? &*snooped : nullptr, identity);
      logical_live_count_ -= drop_prefix(logical_live_[u], logical ? &*logical : nullptr, identity);
    }
    probe_.push_back({stats_.snoop_points, snooped_live_count_, logical_live_count_});
  }
}

void RaceDetector::compare_and_store(Segment segment) {
  ++stats_.segments_created;
  for (ThreadId u = 0; u < stored_.size(); ++u) {
    if (u == segment.id.thread) continue;
    for (const Segment& other : stored_[u]) {
      if (compare(other.clock, segment.clock) != ClockOrder::kConcurrent) continue;
      ++stats_.compared;
      std::vector<Address> witnesses = race_test(other.loads, other.stores, segment.loads, segment.stores);
      if (witnesses.empty()) continue;
      races_.push_back(make_report(other, segment, std::move(witnesses)));
      if (!options_.all_races) return;
    }
  }
  stored_[segment.id.thread].push_back(std::move(segment));
  ++stored_count_;
  stats_.max_stored = std::max<std::uint64_t>(stats_.max_stored, stored_count_);
}

void RaceDetector::collect(std::optional<VectorClock> horizon) {
  for (auto& list : stored_) {
    if (options_.keep_ghosts) {
      while (!list.empty() && (!horizon || discardable(list.front().clock, *horizon))) {
        discarded_.push_back({list.front().id, list.front().clock, stats_.snoop_points});
        list.pop_front();
        --stored_count_;
      }
    } else {
      stored_count_ -= drop_prefix(list, horizon ? &*horizon : nullptr,
                                   [](const Segment& s) -> const VectorClock& { return s.clock; });
    }
  }
}

RaceReport RaceDetector::make_report(const Segment& earlier, const Segment& later,
                                     std::vector<Address> witnesses) const {
  const Segment* a = &earlier;
  const Segment* b = &later;
  if (b->id < a->id) std::swap(a, b);
  const Address w = witnesses.front();
  auto side = [w](const Segment& s) {
    return RaceSide{s.id, s.clock, s.stores.contains(w) ? AccessKind::kStore : AccessKind::kLoad};
  };
  RaceReport r;
  r.program_digest = digest_;
  r.witnesses = std::move(witnesses);
  r.first = side(*a);
  r.second = side(*b);
  return r;
}

DetectionResult detect(const Program& program, const SyncTrace& trace, const DetectorOptions& options) {
  RaceDetector detector(program, options);
  DetectionResult result;
  result.replay = replay_execution(program, trace, &detector, options.replay_seed);
  result.races = detector.races();
  result.stats = detector.stats();
  result.probe = detector.probe();
  result.closed_segments = detector.closed_segments();
  result.discarded_segments = detector.discarded_segments();
  if (!result.races.empty()) {
    result.race = result.races.front();
    result.outcome = DetectOutcome::kRace;
  } else if (result.replay.verdict == ReplayVerdict::kDiverged) {
    result.outcome = DetectOutcome::kDivergedWithoutRace;
    result.diagnostic = "divergence without detected race: " + result.replay.divergence;
  }
  return result;
}

std::string format_probe_csv(const std::vector<LiveSegmentSample>& samples) {
  std::string out = "point,snooped,logical\n";
  for (const auto& s : samples)
    out += std::to_string(s.point) + "," + std::to_string(s.snooped) + "," + std::to_string(s.logical) + "\n";
  return out;
}

}  // namespace recplay
