// Slow, independent references for the tests. Everything here works on a
// complete event stream and uses plain sets and full reachability tables;
// none of it shares code with the detector.
#ifndef RECPLAY_ORACLE_H_
#define RECPLAY_ORACLE_H_

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "recplay/model.h"
#include "recplay/report.h"

namespace recplay::oracle {

// Transitive closure over program order plus release -> every later acquire
// of the same object. Indices are positions in the event vector.
class HappensBefore {
 public:
  explicit HappensBefore(const std::vector<Event>& events);

  // Strict: an event does not happen before itself.
  bool ordered(std::size_t a, std::size_t b) const;
  std::size_t size() const { return reach_.size(); }

 private:
  std::vector<std::vector<std::uint64_t>> reach_;  // reach_[a] has bit b iff a -> b
};

struct OracleSegment {
  SegmentId id;
  std::optional<std::size_t> open;  // sync event that started it; none for a thread's first
  std::optional<std::size_t> end;   // sync event that closed it; none if still open
  std::set<Address> loads;
  std::set<Address> stores;
};

// Segments in the order they were closed, then any still-open ones.
std::vector<OracleSegment> build_segments(const std::vector<Event>& events);

// a -> b iff a's closing event happens before (or is) b's opening event.
bool segment_before(const HappensBefore& hb, const OracleSegment& a, const OracleSegment& b);
bool segments_concurrent(const HappensBefore& hb, const OracleSegment& a, const OracleSegment& b);

// (L1 u S1) n S2  u  L1 n S2, with reference sets.
std::vector<Address> race_addresses(const OracleSegment& a, const OracleSegment& b);

struct OracleRace {
  SegmentId first;   // smaller (thread, index)
  SegmentId second;
  std::vector<Address> witnesses;
  bool operator==(const OracleRace&) const = default;
};

// Keeps every segment, never discards. Each closing segment is checked
// against all earlier closed segments of other threads in (thread, index)
// order; the first hit wins.
std::optional<OracleRace> brute_force_detect(const std::vector<Event>& events);

struct AccessRecord {
  ThreadId thread = 0;
  std::uint32_t ordinal = 0;
  std::uint32_t segment = 0;
  AccessKind kind = AccessKind::kLoad;
  Address address = 0;
};

std::vector<AccessRecord> record_accesses(const std::vector<Event>& events);

struct SyncStep {
  ThreadId thread = 0;
  std::uint32_t ordinal = 0;
  SyncKind kind = SyncKind::kNone;
  bool operator==(const SyncStep&) const = default;
};

// The order in which each sync object was operated on.
std::map<std::uint32_t, std::vector<SyncStep>> sync_sequences(const std::vector<Event>& events);

}  // namespace recplay::oracle

#endif  // RECPLAY_ORACLE_H_
