#include "recplay/pipeline.h"

#include <cstdio>

namespace recplay {

namespace {

template <typename F>
auto in_phase(const char* phase, F&& f) {
  try {
    return f();
  } catch (const PhaseError&) {
    throw;
  } catch (const std::exception& e) {
    throw PhaseError(phase, e.what());
  }
}

}  // namespace

Summary summarize(const SyncTrace& trace, const DetectorStats& stats) {
  Summary s;
  s.sync_ops = trace.sync_op_count();
  s.trace_bytes = encode_trace(trace).size();
  s.bits_per_op = s.sync_ops ? 8.0 * static_cast<double>(s.trace_bytes) / static_cast<double>(s.sync_ops) : 0;
  s.memory_accesses = stats.memory_accesses;
  s.created = stats.segments_created;
  s.max_stored = stats.max_stored;
  s.compared = stats.compared;
  return s;
}

std::string format_summary_text(const Summary& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "sync ops         %12llu\n"
                "trace bytes      %12llu\n"
                "bits/op          %12.2f\n"
                "memory accesses  %12llu\n"
                "created          %12llu\n"
                "max stored       %12llu\n"
                "compared         %12llu\n",
                static_cast<unsigned long long>(s.sync_ops), static_cast<unsigned long long>(s.trace_bytes),
                s.bits_per_op, static_cast<unsigned long long>(s.memory_accesses),
                static_cast<unsigned long long>(s.created), static_cast<unsigned long long>(s.max_stored),
                static_cast<unsigned long long>(s.compared));
  return buf;
}

std::string format_summary_kv(const Summary& s) {
  char bits[32];
  std::snprintf(bits, sizeof bits, "%.4f", s.bits_per_op);
  return "sync_ops=" + std::to_string(s.sync_ops) + "\ntrace_bytes=" + std::to_string(s.trace_bytes) +
         "\nbits_per_op=" + bits + "\nmemory_accesses=" + std::to_string(s.memory_accesses) +
         "\ncreated=" + std::to_string(s.created) + "\nmax_stored=" + std::to_string(s.max_stored) +
         "\ncompared=" + std::to_string(s.compared) + "\n";
}

PipelineResult run_pipeline(const Program& program, ScheduleSeed seed, const DetectorOptions& options) {
  PipelineResult r;
  r.record = in_phase("record", [&] { return record_execution(program, seed); });
  r.trace_bytes = encode_trace(r.record.trace);
  r.detection = in_phase("detect", [&] { return detect(program, r.record.trace, options); });
  if (r.detection.race) {
    r.identification = in_phase("identify", [&] {
      return identify(program, r.record.trace, *r.detection.race, options.replay_seed);
    });
  }
  r.summary = summarize(r.record.trace, r.detection.stats);
  return r;
}

}  // namespace recplay
