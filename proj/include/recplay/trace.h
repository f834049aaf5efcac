// ROLT sync traces: one Lamport timestamp per traced sync op, per thread.
//
// On disk only the timestamps that break the prediction `previous + 1` are
// kept, as (ordinal, timestamp - previous) pairs; the first prediction is 1.
//
// File layout, every integer an unsigned LEB128 varint:
//   "ROLT1" thread_count seed digest
//   per thread: thread_id op_count exception_count {ordinal delta}*
#ifndef RECPLAY_TRACE_H_
#define RECPLAY_TRACE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "recplay/clocks.h"

namespace recplay {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyncTrace {
  std::uint64_t seed = 0;
  std::uint64_t program_digest = 0;
  std::vector<std::vector<LamportTime>> threads;

  std::size_t sync_op_count() const;
  bool operator==(const SyncTrace&) const = default;
};

struct TimestampException {
  std::uint64_t ordinal = 0;
  std::uint64_t delta = 0;
  bool operator==(const TimestampException&) const = default;
};

struct CompressedSequence {
  std::uint64_t count = 0;
  std::vector<TimestampException> exceptions;
  bool operator==(const CompressedSequence&) const = default;
};

// Requires a strictly increasing sequence (throws TraceFormatError otherwise).
CompressedSequence compress(std::span<const LamportTime> timestamps);
std::vector<LamportTime> decompress(const CompressedSequence& compressed);

std::vector<std::uint8_t> encode_trace(const SyncTrace& trace);
SyncTrace decode_trace(std::span<const std::uint8_t> bytes);

void write_trace_file(const std::string& path, const SyncTrace& trace);
SyncTrace read_trace_file(const std::string& path);

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t value);

}  // namespace recplay

#endif  // RECPLAY_TRACE_H_
