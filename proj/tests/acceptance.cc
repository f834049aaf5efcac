// End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero
// exit if any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "recplay/bitmap.h"
#include "recplay/generator.h"
#include "recplay/oracle.h"
#include "recplay/pipeline.h"
#include "support.h"

using namespace recplay;
namespace rt = recplay::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// The shared corpus for criteria 2 and 3: up to four threads, at most 200
// instructions each, lock densities spread over [0, 1].
std::vector<Program> corpus(int n) {
  std::vector<Program> out;
  for (int i = 0; i < n; ++i) {
    GeneratorOptions g;
    g.seed = 1000 + i;
    g.threads = 1 + i % 4;
    g.ops = 10 + i % 31;
    g.lock_density = (i % 5) / 4.0;
    g.shared_addresses = 1 + i % 6;
    g.sem_pairs = g.threads > 1 ? i % 3 : 0;
    g.extra_mutexes = i % 2;
    out.push_back(generate_program(g));
  }
  return out;
}

Outcome lost_update() {
  const auto t0 = Clock::now();
  const Program racy = parse_program(rt::lost_update_text());
  const Program locked = parse_program(rt::lost_update_locked_text());
  int bad_value = 0, bad_report = 0, bad_locked = 0;
  std::set<Word> values;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const PipelineResult r = run_pipeline(racy, {s});
    const Word v = r.record.execution.memory.at(rt::kGlobal);
    values.insert(v);
    bad_value += !(v == 11 || v == 12 || v == 18);
    const bool reported = r.detection.race && r.detection.race->witness() == rt::kGlobal && r.identification &&
                          r.identification->first.thread != r.identification->second.thread &&
                          racy.threads[r.identification->first.thread][r.identification->first.ordinal].op ==
                              Opcode::kStore &&
                          racy.threads[r.identification->second.thread][r.identification->second.ordinal].op ==
                              Opcode::kStore;
    bad_report += !reported;

    const PipelineResult l = run_pipeline(locked, {s});
    bad_locked += !(l.detection.outcome == DetectOutcome::kClean && l.record.execution.memory.at(rt::kGlobal) == 18);
  }
  const double secs = seconds_since(t0);
  std::string seen;
  for (Word v : values) seen += (seen.empty() ? "" : ",") + std::to_string(v);
  return {bad_value == 0 && bad_report == 0 && bad_locked == 0 && secs < 30,
          fmt("1000 seeds, finals {%s}, %d bad values, %d bad reports, %d bad locked runs, %.1fs", seen.c_str(),
              bad_value, bad_report, bad_locked, secs)};
}

struct CorpusStats {
  int programs = 0, raced = 0, mismatches = 0, gc_changed = 0, dominance_violations = 0;
  std::size_t max_instructions = 0;
  double secs = 0;
};

CorpusStats run_corpus() {
  const auto t0 = Clock::now();
  CorpusStats st;
  const auto programs = corpus(600);
  for (std::size_t i = 0; i < programs.size(); ++i) {
    const Program& p = programs[i];
    for (const auto& body : p.threads) st.max_instructions = std::max(st.max_instructions, body.size());
    const SyncTrace t = record_execution(p, {i}).trace;

    DetectorOptions snooped;
    snooped.probe_live_segments = true;
    const DetectionResult d = detect(p, t, snooped);
    DetectorOptions none;
    none.gc = GcPolicy::kNone;
    const DetectionResult keep_all = detect(p, t, none);

    const auto expected = oracle::brute_force_detect(replay_execution(p, t).execution.events);
    ++st.programs;
    st.raced += d.race.has_value();
    bool same = d.race.has_value() == expected.has_value();
    if (same && expected)
      same = d.race->first.segment == expected->first && d.race->second.segment == expected->second &&
             d.race->witnesses == expected->witnesses;
    st.mismatches += !same;
    st.gc_changed += !(d.race == keep_all.race);
    for (const auto& s : d.probe) st.dominance_violations += s.snooped > s.logical;
  }
  st.secs = seconds_since(t0);
  return st;
}

Outcome oracle_equivalence(const CorpusStats& st) {
  return {st.programs >= 500 && st.max_instructions <= 200 && st.mismatches == 0 && st.secs < 300,
          fmt("%d programs (%d raced), max %zu instructions/thread, %d mismatches, %.1fs", st.programs, st.raced,
              st.max_instructions, st.mismatches, st.secs)};
}

Outcome gc_safety(const CorpusStats& st) {
  DetectorOptions o;
  o.probe_live_segments = true;
  const Program p = parse_program(rt::two_lock_ping_pong_text(100));
  int violations = st.dominance_violations, strict = 0;
  for (const auto& s : detect(p, record_execution(p, {1}).trace, o).probe) {
    violations += s.snooped > s.logical;
    strict += s.snooped < s.logical;
  }
  return {st.gc_changed == 0 && violations == 0 && strict > 0,
          fmt("%d changed races with discard, %d points with snooped > logical, %d ping-pong points strictly below",
              st.gc_changed, violations, strict)};
}

Outcome replay_fidelity() {
  int runs = 0, bad_order = 0, bad_memory = 0, diverged = 0;
  for (int i = 0; i < 100; ++i) {
    GeneratorOptions g;
    g.seed = 5000 + i;
    g.threads = 2 + i % 3;
    g.ops = 15 + i % 20;
    g.lock_density = 1.0;
    g.shared_addresses = 1 + i % 5;
    g.sem_pairs = i % 4;
    g.extra_mutexes = i % 3;
    const Program p = generate_program(g);
    for (std::uint64_t rs = 0; rs < 3; ++rs) {
      const RecordResult rec = record_execution(p, {rs * 977 + i});
      const ReplayResult rep = replay_execution(p, rec.trace, nullptr, {rs + 1});
      ++runs;
      diverged += rep.verdict != ReplayVerdict::kOk;
      bad_order += oracle::sync_sequences(rep.execution.events) != oracle::sync_sequences(rec.execution.events);
      bad_memory += rep.execution.memory != rec.execution.memory;
    }
  }
  return {diverged == 0 && bad_order == 0 && bad_memory == 0,
          fmt("%d replays, %d diverged, %d sync-order mismatches, %d memory mismatches", runs, diverged, bad_order,
              bad_memory)};
}

Outcome strong_consistency() {
  long pairs = 0, mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    GeneratorOptions g;
    g.seed = 9000 + i;
    g.threads = 2 + i % 3;
    g.ops = 8 + i % 15;
    g.lock_density = (i % 5) / 4.0;
    g.sem_pairs = i % 3;
    g.extra_mutexes = i % 2;
    const Program p = generate_program(g);
    const SyncTrace t = record_execution(p, {static_cast<std::uint64_t>(i)}).trace;
    DetectorOptions o;
    o.keep_ghosts = true;
    o.all_races = true;
    o.gc = GcPolicy::kNone;
    const DetectionResult d = detect(p, t, o);
    const auto events = replay_execution(p, t).execution.events;
    const oracle::HappensBefore hb(events);
    std::map<SegmentId, oracle::OracleSegment> segs;
    for (auto& s : oracle::build_segments(events)) segs.emplace(s.id, std::move(s));
    for (const auto& a : d.closed_segments)
      for (const auto& b : d.closed_segments) {
        if (a.id.thread == b.id.thread) continue;
        ++pairs;
        const bool vc = compare(a.clock, b.clock) == ClockOrder::kConcurrent;
        mismatches += vc != oracle::segments_concurrent(hb, segs.at(a.id), segs.at(b.id));
      }
  }
  return {mismatches == 0 && pairs > 0, fmt("200 executions, %ld segment pairs, %ld mismatches", pairs, mismatches)};
}

Outcome bitmap_bounds() {
  std::mt19937_64 rng(2024);
  MultilevelBitmap a, b;
  std::set<Address> ra, rb;
  long disagreements = 0;
  for (int i = 0; i < 100000; ++i) {
    const Address x = (i % 2) ? static_cast<Address>(rng()) : static_cast<Address>(0x40000 + rng() % 65536);
    switch (i % 3) {
      case 0:
        ((i % 6) ? a : b).insert(x);
        ((i % 6) ? ra : rb).insert(x);
        break;
      case 1:
        disagreements += a.contains(x) != (ra.count(x) == 1);
        break;
      default: {
        std::optional<Address> expected;
        for (Address v : ra)
          if (rb.count(v)) {
            expected = v;
            break;
          }
        if (i % 100 == 2) disagreements += intersects(a, b) != expected;
        break;
      }
    }
  }
  MultilevelBitmap region;
  for (Address k = 0; k < 10000; ++k) region.insert(0xABCD0000 + k);  // inside one 16 KiB block
  const bool bounds = region.node_count() == 3 && region.mid_table_count() == 1 && region.leaf_count() == 1;
  return {disagreements == 0 && bounds,
          fmt("%ld disagreements with the reference set; 10^4 addresses in one region -> %zu root + %zu mid + %zu leaf",
              disagreements, std::size_t{1}, region.mid_table_count(), region.leaf_count())};
}

Outcome trace_compression() {
  std::mt19937_64 rng(99);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<LamportTime> seq(rng() % 64);
    LamportTime t = 0;
    for (auto& v : seq) v = t += 1 + (rng() % 4 == 0 ? rng() % 500 : 0);
    failures += decompress(compress(seq)) != seq;
  }
  const Program p = parse_program(rt::ping_pong_text(10000));
  const PipelineResult r = run_pipeline(p, {3});
  const std::string kv = format_summary_kv(r.summary);
  const bool reported = kv.find("bits_per_op=") != std::string::npos;
  return {failures == 0 && reported && r.summary.bits_per_op <= 64 && r.detection.outcome == DetectOutcome::kClean,
          fmt("10^4 round-trips, %d failures; ping-pong x10^4: %llu sync ops, %llu bytes, %.2f bits/op", failures,
              static_cast<unsigned long long>(r.summary.sync_ops),
              static_cast<unsigned long long>(r.summary.trace_bytes), r.summary.bits_per_op)};
}

Outcome segment_accounting() {
  const Program p = parse_program(rt::locked_workers_text(3, 200));
  const PipelineResult r = run_pipeline(p, {8});
  const double ratio = r.summary.created ? static_cast<double>(r.summary.max_stored) / r.summary.created : 1;
  return {r.detection.outcome == DetectOutcome::kClean && ratio < 0.25,
          fmt("4 threads: created %llu, max stored %llu, ratio %.2f%%",
              static_cast<unsigned long long>(r.summary.created),
              static_cast<unsigned long long>(r.summary.max_stored), 100 * ratio)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* name, const Outcome& o) {
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };
  report(1, "lost update reproduction", guarded(lost_update));
  CorpusStats st;
  const Outcome corpus_run = guarded([&] {
    st = run_corpus();
    return Outcome{true, ""};
  });
  report(2, "oracle equivalence", corpus_run.pass ? oracle_equivalence(st) : corpus_run);
  report(3, "GC safety and dominance", corpus_run.pass ? guarded([&] { return gc_safety(st); }) : corpus_run);
  report(4, "replay fidelity", guarded(replay_fidelity));
  report(5, "vector clock strong consistency", guarded(strong_consistency));
  report(6, "bitmap correctness and bounds", guarded(bitmap_bounds));
  report(7, "trace compression", guarded(trace_compression));
  report(8, "segment accounting", guarded(segment_accounting));
  return failed == 0 ? 0 : 1;
}
