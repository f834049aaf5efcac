// Third run: given a race report, replay again and name the racing
// instructions. Accesses are only examined inside the two reported
// segments.
//
// Each side contributes its first access, in program order, to the
// smallest witness address with the access kind the report records for that
// side (store when the segment stored the address, load otherwise).
#ifndef RECPLAY_IDENTIFY_H_
#define RECPLAY_IDENTIFY_H_

#include <stdexcept>
#include <string>

#include "recplay/report.h"
#include "recplay/trace.h"

namespace recplay {

class IdentifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RacingAccess {
  ThreadId thread = 0;
  std::uint32_t ordinal = 0;
  AccessKind kind = AccessKind::kLoad;
  Address address = 0;
  bool operator==(const RacingAccess&) const = default;
};

struct Identification {
  RacingAccess first;
  RacingAccess second;
  bool operator==(const Identification&) const = default;
};

Identification identify(const Program& program, const SyncTrace& trace, const RaceReport& report,
                        ScheduleSeed replay_seed = {0});

// "i1=<thread>:<ordinal> <kind>" and "i2=..." lines.
std::string format_identification(const Identification& id);

}  // namespace recplay

#endif  // RECPLAY_IDENTIFY_H_
