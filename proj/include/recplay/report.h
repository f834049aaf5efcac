// Race reports and their text forms.
//
// The machine-readable record is a list of key=value tokens, one logical
// group per line:
//
//   race=yes
//   digest=0x<program digest>
//   witness=0x<smallest racing address>
//   witnesses=0x<a>,0x<b>,...
//   t1=<thread> seg=<index> kind=<load|store> clock=[...]
//   t2=<thread> seg=<index> kind=<load|store> clock=[...]
//   instructions=unknown
//
// t1 is the side with the smaller (thread, segment index).
#ifndef RECPLAY_REPORT_H_
#define RECPLAY_REPORT_H_

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "recplay/clocks.h"
#include "recplay/model.h"

namespace recplay {

struct SegmentId {
  ThreadId thread = 0;
  std::uint32_t index = 0;  // number of sync ops the thread ran before it
  auto operator<=>(const SegmentId&) const = default;
};

enum class AccessKind : std::uint8_t { kLoad, kStore };

std::string_view to_string(AccessKind kind);
AccessKind parse_access_kind(std::string_view text);

struct RaceSide {
  SegmentId segment;
  VectorClock clock;
  AccessKind kind = AccessKind::kLoad;  // access to the smallest witness
  bool operator==(const RaceSide&) const = default;
};

struct RaceReport {
  std::uint64_t program_digest = 0;
  std::vector<Address> witnesses;  // ascending, never empty
  RaceSide first;
  RaceSide second;

  Address witness() const { return witnesses.front(); }
  bool operator==(const RaceReport&) const = default;
};

class ReportFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string hex_address(Address a);
std::string format_report(const RaceReport& report);
std::string describe_report(const RaceReport& report);
RaceReport parse_report(std::string_view text);

}  // namespace recplay

#endif  // RECPLAY_REPORT_H_
