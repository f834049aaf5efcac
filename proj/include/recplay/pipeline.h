// The three runs in sequence: record, replay with detection, and (only if a
// race turned up) identification. Also the numbers the CLI prints about it.
#ifndef RECPLAY_PIPELINE_H_
#define RECPLAY_PIPELINE_H_

#include <optional>
#include <stdexcept>
#include <string>

#include "recplay/detector.h"
#include "recplay/identify.h"
#include "recplay/record.h"

namespace recplay {

// Wraps whatever a phase threw, tagged with the phase name.
class PhaseError : public std::runtime_error {
 public:
  PhaseError(std::string phase, const std::string& what)
      : std::runtime_error(phase + ": " + what), phase_(std::move(phase)) {}
  const std::string& phase() const { return phase_; }

 private:
  std::string phase_;
};

struct Summary {
  std::uint64_t sync_ops = 0;  // traced
  std::uint64_t trace_bytes = 0;
  double bits_per_op = 0;
  std::uint64_t memory_accesses = 0;
  std::uint64_t created = 0;
  std::uint64_t max_stored = 0;
  std::uint64_t compared = 0;
};

Summary summarize(const SyncTrace& trace, const DetectorStats& stats);
std::string format_summary_text(const Summary& s);
std::string format_summary_kv(const Summary& s);

struct PipelineResult {
  RecordResult record;
  std::vector<std::uint8_t> trace_bytes;
  DetectionResult detection;
  std::optional<Identification> identification;
  Summary summary;
};

PipelineResult run_pipeline(const Program& program, ScheduleSeed seed, const DetectorOptions& options = {});

}  // namespace recplay

#endif  // RECPLAY_PIPELINE_H_
