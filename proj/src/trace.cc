#include "recplay/trace.h"

#include <fstream>
#include <iterator>
#include <string_view>

namespace recplay {

namespace {

constexpr std::string_view kMagic = "ROLT1";

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t varint(const char* what) {
    std::uint64_t value = 0;
    for (unsigned shift = 0; shift < 64; shift += 7) {
      if (pos_ >= bytes_.size()) throw TraceFormatError(std::string("truncated trace reading ") + what);
      const std::uint8_t b = bytes_[pos_++];
      value |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return value;
    }
    throw TraceFormatError(std::string("overlong varint reading ") + what);
  }

  void expect_magic() {
    if (bytes_.size() < kMagic.size() ||
        std::string_view(reinterpret_cast<const char*>(bytes_.data()), kMagic.size()) != kMagic)
      throw TraceFormatError("bad magic: not a ROLT1 trace");
    pos_ = kMagic.size();
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t SyncTrace::sync_op_count() const {
  std::size_t n = 0;
  for (const auto& t : threads) n += t.size();
  return n;
}

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t value) {
  while (value >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(value | 0x80));
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

CompressedSequence compress(std::span<const LamportTime> timestamps) {
  CompressedSequence c;
  c.count = timestamps.size();
  LamportTime previous = 0;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    if (timestamps[i] <= previous) throw TraceFormatError("timestamps not strictly increasing");
    if (timestamps[i] != previous + 1) c.exceptions.push_back({i, timestamps[i] - previous});
    previous = timestamps[i];
  }
  return c;
}

std::vector<LamportTime> decompress(const CompressedSequence& c) {
  std::vector<LamportTime> out;
  out.reserve(c.count);
  LamportTime previous = 0;
  std::size_t next = 0;
  for (std::uint64_t i = 0; i < c.count; ++i) {
    std::uint64_t delta = 1;
    if (next < c.exceptions.size() && c.exceptions[next].ordinal == i) {
      delta = c.exceptions[next++].delta;
      if (delta == 0) throw TraceFormatError("non-monotonic timestamp at ordinal " + std::to_string(i));
      if (delta == 1) throw TraceFormatError("redundant exception at ordinal " + std::to_string(i));
    }
    previous += delta;
    out.push_back(previous);
  }
  if (next != c.exceptions.size()) throw TraceFormatError("exception ordinals out of order or out of range");
  return out;
}

std::vector<std::uint8_t> encode_trace(const SyncTrace& trace) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_varint(out, trace.threads.size());
  put_varint(out, trace.seed);
  put_varint(out, trace.program_digest);
  for (std::size_t t = 0; t < trace.threads.size(); ++t) {
    const CompressedSequence c = compress(trace.threads[t]);
    put_varint(out, t);
    put_varint(out, c.count);
    put_varint(out, c.exceptions.size());
    for (const auto& e : c.exceptions) {
      put_varint(out, e.ordinal);
      put_varint(out, e.delta);
    }
  }
  return out;
}

SyncTrace decode_trace(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.expect_magic();
  SyncTrace trace;
  const std::uint64_t n = in.varint("thread count");
  if (n > (1u << 16)) throw TraceFormatError("implausible thread count " + std::to_string(n));
  trace.seed = in.varint("seed");
  trace.program_digest = in.varint("digest");
  trace.threads.resize(n);
  for (std::uint64_t t = 0; t < n; ++t) {
    if (in.varint("thread id") != t) throw TraceFormatError("thread sections out of order");
    CompressedSequence c;
    c.count = in.varint("sync-op count");
    const std::uint64_t exceptions = in.varint("exception count");
    if (exceptions > c.count) throw TraceFormatError("more exceptions than sync ops");
    for (std::uint64_t i = 0; i < exceptions; ++i) {
      TimestampException e;
      e.ordinal = in.varint("exception ordinal");
      e.delta = in.varint("exception delta");
      c.exceptions.push_back(e);
    }
    trace.threads[t] = decompress(c);
  }
  if (!in.done()) throw TraceFormatError("trailing bytes after trace");
  return trace;
}

void write_trace_file(const std::string& path, const SyncTrace& trace) {
  const auto bytes = encode_trace(trace);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

SyncTrace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

}  // namespace recplay
