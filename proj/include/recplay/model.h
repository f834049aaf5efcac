// Simulated multithreaded machine: program representation, text format and
// the seeded scheduler that executes programs one instruction at a time.
#ifndef RECPLAY_MODEL_H_
#define RECPLAY_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace recplay {

using Address = std::uint32_t;
using Word = std::uint32_t;
using ThreadId = std::uint32_t;
using Memory = std::map<Address, Word>;

inline constexpr std::uint32_t kRegisterCount = 8;

enum class Opcode : std::uint8_t {
  kLoad,
  kStore,
  kAddi,
  kSet,
  kLock,
  kUnlock,
  kSemWait,
  kSemPost,
  kCreate,
  kJoin,
  kExit,
};

std::string_view mnemonic(Opcode op);

// `operand` is an address (LOAD/STORE), a constant (ADDI/SET), a mutex or
// semaphore index (LOCK/UNLOCK/SEM_*), or a thread id (CREATE/JOIN).
struct Instruction {
  Opcode op = Opcode::kExit;
  std::uint32_t reg = 0;
  std::uint32_t operand = 0;
  std::uint32_t line = 0;  // source line, 0 when synthesized

  bool operator==(const Instruction& o) const {
    return op == o.op && reg == o.reg && operand == o.operand;
  }
};

bool is_sync(Opcode op);

struct Semaphore {
  std::string name;
  std::uint32_t initial = 0;
  bool operator==(const Semaphore&) const = default;
};

// Sync objects are numbered densely: mutexes, then semaphores, then one
// create object and one exit object per thread.
enum class SyncObjectKind : std::uint8_t { kMutex, kSemaphore, kCreate, kExit };

struct Program {
  std::vector<std::string> mutexes;
  std::vector<Semaphore> semaphores;
  Memory initial_memory;
  std::vector<std::vector<Instruction>> threads;  // index is the thread id
  ThreadId main_thread = 0;

  std::size_t thread_count() const { return threads.size(); }
  std::uint32_t object_count() const;
  std::uint32_t object_id(SyncObjectKind kind, std::uint32_t index) const;
  SyncObjectKind object_kind(std::uint32_t object) const;
  std::string object_name(std::uint32_t object) const;

  bool operator==(const Program& o) const {
    return mutexes == o.mutexes && semaphores == o.semaphores &&
           initial_memory == o.initial_memory && threads == o.threads &&
           main_thread == o.main_thread;
  }
};

class ProgramError : public std::runtime_error {
 public:
  ProgramError(std::uint32_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::uint32_t line() const { return line_; }

 private:
  std::uint32_t line_;
};

Program parse_program(std::string_view text);
Program load_program(const std::string& path);
void validate(const Program& program);
std::string to_text(const Program& program);
// A thread's EXIT orders anything only when some thread joins it.
std::vector<bool> joined_threads(const Program& program);
// FNV-1a over the canonical text; comments and layout do not matter.
std::uint64_t digest(const Program& program);

// ---------------------------------------------------------------------------
// Execution.

enum class EventKind : std::uint8_t { kLoad, kStore, kSync };

enum class SyncKind : std::uint8_t {
  kNone,
  kLock,
  kUnlock,
  kSemWait,
  kSemPost,
  kCreate,
  kStart,  // implicit first step of a created thread
  kJoin,
  kExit,
};

std::string_view to_string(SyncKind kind);
bool is_release(SyncKind kind);
bool is_acquire(SyncKind kind);

struct Event {
  std::uint64_t seq = 0;
  ThreadId thread = 0;
  EventKind kind = EventKind::kLoad;
  Address address = 0;      // kLoad / kStore
  std::uint32_t object = 0;  // kSync
  SyncKind sync = SyncKind::kNone;
  std::uint32_t ordinal = 0;

  bool is_memory() const { return kind != EventKind::kSync; }
  bool operator==(const Event&) const = default;
};

// What a thread will do if it is scheduled next.
struct PendingOp {
  ThreadId thread = 0;
  std::uint32_t ordinal = 0;
  bool start = false;
  const Instruction* instr = nullptr;  // null for the start step

  SyncKind sync_kind() const;
  bool is_sync() const { return sync_kind() != SyncKind::kNone; }
};

struct ScheduleSeed {
  std::uint64_t value = 0;
};

// splitmix64; the scheduler draws next() % runnable on every step.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class ExecutionObserver {
 public:
  virtual ~ExecutionObserver() = default;
  // Returning false keeps the thread off the runnable list for this step.
  virtual bool may_step(const PendingOp&) { return true; }
  virtual void on_event(const Event&) {}
  virtual bool stop_requested() const { return false; }
};

struct BlockedThread {
  ThreadId thread = 0;
  std::string waits_on;
  bool vetoed = false;
};

class DeadlockError : public std::runtime_error {
 public:
  explicit DeadlockError(std::vector<BlockedThread> blocked);
  const std::vector<BlockedThread>& blocked() const { return blocked_; }

 private:
  std::vector<BlockedThread> blocked_;
};

// Faults the static checks cannot rule out, e.g. unlocking a free mutex.
class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExecutionResult {
  Memory memory;
  std::vector<Event> events;
  bool stopped = false;  // ended early at the observer's request
};

struct RunOptions {
  bool keep_events = true;
};

ExecutionResult run(const Program& program, ScheduleSeed seed,
                    ExecutionObserver* observer = nullptr,
                    RunOptions options = {});

}  // namespace recplay

#endif  // RECPLAY_MODEL_H_
