#include "recplay/oracle.h"

#include <algorithm>
#include <iterator>

namespace recplay::oracle {

HappensBefore::HappensBefore(const std::vector<Event>& events) : reach_(events.size()) {
  const std::size_t n = events.size();
  const std::size_t words = (n + 63) / 64;
  // Successor lists. The stream is already a topological order.
  std::vector<std::vector<std::size_t>> succ(n);
  std::map<ThreadId, std::size_t> last_of_thread;
  for (std::size_t i = 0; i < n; ++i) {
    const Event& e = events[i];
    if (auto it = last_of_thread.find(e.thread); it != last_of_thread.end()) succ[it->second].push_back(i);
    last_of_thread[e.thread] = i;
    if (e.kind != EventKind::kSync || !is_acquire(e.sync)) continue;
    for (std::size_t j = 0; j < i; ++j) {
      const Event& r = events[j];
      if (r.kind == EventKind::kSync && r.object == e.object && is_release(r.sync)) succ[j].push_back(i);
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    reach_[i].assign(words, 0);
    for (std::size_t s : succ[i]) {
      reach_[i][s / 64] |= std::uint64_t{1} << (s % 64);
      for (std::size_t w = 0; w < words; ++w) reach_[i][w] |= reach_[s][w];
    }
  }
}

bool HappensBefore::ordered(std::size_t a, std::size_t b) const {
  return (reach_[a][b / 64] >> (b % 64)) & 1;
}

std::vector<OracleSegment> build_segments(const std::vector<Event>& events) {
  std::map<ThreadId, OracleSegment> open;
  std::vector<OracleSegment> closed;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    auto [it, fresh] = open.try_emplace(e.thread);
    if (fresh) it->second.id = {e.thread, 0};
    OracleSegment& seg = it->second;
    if (e.kind == EventKind::kLoad) seg.loads.insert(e.address);
    else if (e.kind == EventKind::kStore) seg.stores.insert(e.address);
    else {
      seg.end = i;
      OracleSegment next;
      next.id = {e.thread, seg.id.index + 1};
      next.open = i;
      closed.push_back(std::move(seg));
      it->second = std::move(next);
    }
  }
  for (auto& [t, seg] : open) closed.push_back(std::move(seg));
  return closed;
}

bool segment_before(const HappensBefore& hb, const OracleSegment& a, const OracleSegment& b) {
  if (!a.end || !b.open) return false;
  return *a.end == *b.open || hb.ordered(*a.end, *b.open);
}

bool segments_concurrent(const HappensBefore& hb, const OracleSegment& a, const OracleSegment& b) {
  return a.id.thread != b.id.thread && !segment_before(hb, a, b) && !segment_before(hb, b, a);
}

std::vector<Address> race_addresses(const OracleSegment& a, const OracleSegment& b) {
  std::set<Address> a_all = a.loads;
  a_all.insert(a.stores.begin(), a.stores.end());
  std::set<Address> out;
  std::set_intersection(a_all.begin(), a_all.end(), b.stores.begin(), b.stores.end(),
                        std::inserter(out, out.end()));
  std::set_intersection(a.stores.begin(), a.stores.end(), b.loads.begin(), b.loads.end(),
                        std::inserter(out, out.end()));
  return {out.begin(), out.end()};
}

std::optional<OracleRace> brute_force_detect(const std::vector<Event>& events) {
  const HappensBefore hb(events);
  std::vector<OracleSegment> all = build_segments(events);
  std::map<SegmentId, const OracleSegment*> seen;  // ordered by (thread, index)
  for (const OracleSegment& seg : all) {
    if (!seg.end) break;  // still-open segments trail the closed ones
    for (const auto& [id, other] : seen) {
      if (id.thread == seg.id.thread || !segments_concurrent(hb, *other, seg)) continue;
      std::vector<Address> w = race_addresses(*other, seg);
      if (w.empty()) continue;
      OracleRace race{std::min(id, seg.id), std::max(id, seg.id), std::move(w)};
      return race;
    }
    seen[seg.id] = &seg;
  }
  return std::nullopt;
}

std::vector<AccessRecord> record_accesses(const std::vector<Event>& events) {
  std::map<ThreadId, std::uint32_t> segment;
  std::vector<AccessRecord> out;
  for (const Event& e : events) {
    if (e.kind == EventKind::kSync) {
      ++segment[e.thread];
      continue;
    }
    out.push_back({e.thread, e.ordinal, segment[e.thread],
                   e.kind == EventKind::kLoad ? AccessKind::kLoad : AccessKind::kStore, e.address});
  }
  return out;
}

std::map<std::uint32_t, std::vector<SyncStep>> sync_sequences(const std::vector<Event>& events) {
  std::map<std::uint32_t, std::vector<SyncStep>> out;
  for (const Event& e : events)
    if (e.kind == EventKind::kSync) out[e.object].push_back({e.thread, e.ordinal, e.sync});
  return out;
}

}  // namespace recplay::oracle
