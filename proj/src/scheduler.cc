#include <array>
#include <limits>

#include "recplay/model.h"

namespace recplay {

namespace {

enum class ThreadState : std::uint8_t { kNotCreated, kPending, kRunning, kExited };

constexpr std::uint32_t kNoHolder = std::numeric_limits<std::uint32_t>::max();

struct ThreadContext {
  ThreadState state = ThreadState::kNotCreated;
  std::uint32_t pc = 0;
  std::array<Word, kRegisterCount> regs{};
};

std::string describe_blocked(const std::vector<BlockedThread>& blocked) {
  std::string msg = "deadlock:";
  for (const auto& b : blocked) msg += " [thread " + std::to_string(b.thread) + " waits on " + b.waits_on + "]";
  return msg;
}

class Machine {
 public:
  Machine(const Program& p, ScheduleSeed seed, ExecutionObserver* obs, RunOptions opts)
      : program_(p),
        rng_(seed.value),
        observer_(obs),
        options_(opts),
        threads_(p.threads.size()),
        holders_(p.mutexes.size(), kNoHolder) {
    for (const auto& s : p.semaphores) sem_counts_.push_back(s.initial);
    threads_[p.main_thread].state = ThreadState::kRunning;
    result_.memory = p.initial_memory;
  }

  ExecutionResult run() {
    std::vector<PendingOp> runnable;
    runnable.reserve(threads_.size());
    for (;;) {
      runnable.clear();
      bool any_alive = false;
      for (ThreadId t = 0; t < threads_.size(); ++t) {
        const ThreadContext& ctx = threads_[t];
        if (ctx.state == ThreadState::kNotCreated || ctx.state == ThreadState::kExited) {
          any_alive |= ctx.state == ThreadState::kNotCreated;
          continue;
        }
        any_alive = true;
        PendingOp op = pending(t);
        if (blocked_reason(op).empty() && (observer_ == nullptr || observer_->may_step(op)))
          runnable.push_back(op);
      }
      if (runnable.empty()) {
        if (!any_alive) break;
        throw_deadlock();
      }
      const PendingOp& chosen = runnable[rng_.next() % runnable.size()];
      step(chosen);
      if (observer_ != nullptr && observer_->stop_requested()) {
        result_.stopped = true;
        break;
      }
    }
    return std::move(result_);
  }

 private:
  PendingOp pending(ThreadId t) const {
    const ThreadContext& ctx = threads_[t];
    PendingOp op;
    op.thread = t;
    if (ctx.state == ThreadState::kPending) {
      op.start = true;
      return op;
    }
    op.ordinal = ctx.pc;
    op.instr = &program_.threads[t][ctx.pc];
    return op;
  }

  // Empty when the op can proceed as far as the machine is concerned.
  std::string blocked_reason(const PendingOp& op) const {
    if (op.start) return {};
    const Instruction& ins = *op.instr;
    switch (ins.op) {
      case Opcode::kLock:
        if (holders_[ins.operand] != kNoHolder)
          return "mutex " + program_.mutexes[ins.operand] + " (held by thread " +
                 std::to_string(holders_[ins.operand]) + ")";
        break;
      case Opcode::kSemWait:
        if (sem_counts_[ins.operand] == 0) return "sem " + program_.semaphores[ins.operand].name + " (count 0)";
        break;
      case Opcode::kJoin:
        if (threads_[ins.operand].state != ThreadState::kExited)
          return "join of thread " + std::to_string(ins.operand) + " (not exited)";
        break;
      default:
        break;
    }
    return {};
  }

  [[noreturn]] void throw_deadlock() const {
    std::vector<BlockedThread> blocked;
    for (ThreadId t = 0; t < threads_.size(); ++t) {
      const auto state = threads_[t].state;
      if (state != ThreadState::kPending && state != ThreadState::kRunning) continue;
      PendingOp op = pending(t);
      BlockedThread b;
      b.thread = t;
      b.waits_on = blocked_reason(op);
      if (b.waits_on.empty()) {
        b.vetoed = true;
        b.waits_on = op.start ? "start (stalled by observer)"
                              : std::string(mnemonic(op.instr->op)) + " at ordinal " +
                                    std::to_string(op.ordinal) + " (stalled by observer)";
      }
      blocked.push_back(std::move(b));
    }
    throw DeadlockError(std::move(blocked));
  }

  void emit(Event e) {
    e.seq = seq_++;
    if (observer_ != nullptr) observer_->on_event(e);
    if (options_.keep_events) result_.events.push_back(e);
  }

  void emit_memory(ThreadId t, EventKind kind, Address a, std::uint32_t ordinal) {
    Event e;
    e.thread = t;
    e.kind = kind;
    e.address = a;
    e.ordinal = ordinal;
    emit(e);
  }

  void emit_sync(ThreadId t, SyncKind kind, std::uint32_t object, std::uint32_t ordinal) {
    Event e;
    e.thread = t;
    e.kind = EventKind::kSync;
    e.sync = kind;
    e.object = object;
    e.ordinal = ordinal;
    emit(e);
  }

  Word load(Address a) const {
    auto it = result_.memory.find(a);
    return it == result_.memory.end() ? 0 : it->second;
  }

  void step(const PendingOp& op) {
    const ThreadId t = op.thread;
    ThreadContext& ctx = threads_[t];
    if (op.start) {
      ctx.state = ThreadState::kRunning;
      emit_sync(t, SyncKind::kStart, program_.object_id(SyncObjectKind::kCreate, t), 0);
      return;
    }
    const Instruction& ins = *op.instr;
    const std::uint32_t ordinal = ctx.pc++;
    switch (ins.op) {
      case Opcode::kLoad:
        ctx.regs[ins.reg] = load(ins.operand);
        emit_memory(t, EventKind::kLoad, ins.operand, ordinal);
        break;
      case Opcode::kStore:
        result_.memory[ins.operand] = ctx.regs[ins.reg];
        emit_memory(t, EventKind::kStore, ins.operand, ordinal);
        break;
      case Opcode::kAddi:
        ctx.regs[ins.reg] += ins.operand;
        break;
      case Opcode::kSet:
        ctx.regs[ins.reg] = ins.operand;
        break;
      case Opcode::kLock:
        holders_[ins.operand] = t;
        emit_sync(t, SyncKind::kLock, program_.object_id(SyncObjectKind::kMutex, ins.operand), ordinal);
        break;
      case Opcode::kUnlock:
        if (holders_[ins.operand] != t)
          throw ExecutionError("thread " + std::to_string(t) + " unlocks mutex " +
                               program_.mutexes[ins.operand] + " it does not hold (ordinal " +
                               std::to_string(ordinal) + ")");
        holders_[ins.operand] = kNoHolder;
        emit_sync(t, SyncKind::kUnlock, program_.object_id(SyncObjectKind::kMutex, ins.operand), ordinal);
        break;
      case Opcode::kSemWait:
        --sem_counts_[ins.operand];
        emit_sync(t, SyncKind::kSemWait, program_.object_id(SyncObjectKind::kSemaphore, ins.operand), ordinal);
        break;
      case Opcode::kSemPost:
        ++sem_counts_[ins.operand];
        emit_sync(t, SyncKind::kSemPost, program_.object_id(SyncObjectKind::kSemaphore, ins.operand), ordinal);
        break;
      case Opcode::kCreate:
        threads_[ins.operand].state = ThreadState::kPending;
        emit_sync(t, SyncKind::kCreate, program_.object_id(SyncObjectKind::kCreate, ins.operand), ordinal);
        break;
      case Opcode::kJoin:
        emit_sync(t, SyncKind::kJoin, program_.object_id(SyncObjectKind::kExit, ins.operand), ordinal);
        break;
      case Opcode::kExit:
        ctx.state = ThreadState::kExited;
        emit_sync(t, SyncKind::kExit, program_.object_id(SyncObjectKind::kExit, t), ordinal);
        break;
    }
  }

  const Program& program_;
  SplitMix64 rng_;
  ExecutionObserver* observer_;
  RunOptions options_;
  std::vector<ThreadContext> threads_;
  std::vector<std::uint32_t> holders_;
  std::vector<std::uint32_t> sem_counts_;
  std::uint64_t seq_ = 0;
  ExecutionResult result_;
};

}  // namespace

std::string_view to_string(SyncKind kind) {
  switch (kind) {
    case SyncKind::kNone: return "none";
    case SyncKind::kLock: return "lock";
    case SyncKind::kUnlock: return "unlock";
    case SyncKind::kSemWait: return "sem_wait";
    case SyncKind::kSemPost: return "sem_post";
    case SyncKind::kCreate: return "create";
    case SyncKind::kStart: return "start";
    case SyncKind::kJoin: return "join";
    case SyncKind::kExit: return "exit";
  }
  return "?";
}

bool is_release(SyncKind kind) {
  return kind == SyncKind::kUnlock || kind == SyncKind::kSemPost || kind == SyncKind::kCreate ||
         kind == SyncKind::kExit;
}

bool is_acquire(SyncKind kind) {
  return kind == SyncKind::kLock || kind == SyncKind::kSemWait || kind == SyncKind::kStart ||
         kind == SyncKind::kJoin;
}

SyncKind PendingOp::sync_kind() const {
  if (start) return SyncKind::kStart;
  switch (instr->op) {
    case Opcode::kLock: return SyncKind::kLock;
    case Opcode::kUnlock: return SyncKind::kUnlock;
    case Opcode::kSemWait: return SyncKind::kSemWait;
    case Opcode::kSemPost: return SyncKind::kSemPost;
    case Opcode::kCreate: return SyncKind::kCreate;
    case Opcode::kJoin: return SyncKind::kJoin;
    case Opcode::kExit: return SyncKind::kExit;
    default: return SyncKind::kNone;
  }
}

DeadlockError::DeadlockError(std::vector<BlockedThread> blocked)
    : std::runtime_error(describe_blocked(blocked)), blocked_(std::move(blocked)) {}

ExecutionResult run(const Program& program, ScheduleSeed seed, ExecutionObserver* observer,
                    RunOptions options) {
  return Machine(program, seed, observer, options).run();
}

}  // namespace recplay
