#include "recplay/generator.h"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace recplay {

namespace {

constexpr Address kPrivateBase = 0x10000000;
constexpr Address kPrivateStride = 0x00100000;

using Block = std::vector<Instruction>;

Instruction ins(Opcode op, std::uint32_t reg, std::uint32_t operand) { return {op, reg, operand, 0}; }

class Generator {
 public:
  explicit Generator(const GeneratorOptions& o) : o_(o), rng_(o.seed) {}

  Program build() {
    Program p;
    p.mutexes.push_back("g");
    for (std::uint32_t i = 0; i < o_.extra_mutexes; ++i) p.mutexes.push_back("m" + std::to_string(i));
    for (std::uint32_t i = 0; i < o_.sem_pairs; ++i) p.semaphores.push_back({"s" + std::to_string(i), 0});

    std::set<Address> pool;
    std::uniform_int_distribution<Address> any_address(0, kPrivateBase - 1);
    while (pool.size() < o_.shared_addresses) pool.insert(any_address(rng_));
    shared_.assign(pool.begin(), pool.end());
    for (Address a : shared_) p.initial_memory[a] = static_cast<Word>(rng_() % 100);

    std::vector<std::vector<Block>> groups(o_.threads);
    for (ThreadId t = 0; t < o_.threads; ++t)
      for (std::uint32_t k = 0; k < o_.ops; ++k) groups[t].push_back(group(t, k));
    place_semaphores(groups);

    p.threads.resize(o_.threads);
    for (ThreadId t = 0; t < o_.threads; ++t) {
      Block& body = p.threads[t];
      if (t == 0)
        for (ThreadId c = 1; c < o_.threads; ++c) body.push_back(ins(Opcode::kCreate, 0, c));
      for (const Block& b : groups[t]) body.insert(body.end(), b.begin(), b.end());
      if (t == 0)
        for (ThreadId c = 1; c < o_.threads; ++c) body.push_back(ins(Opcode::kJoin, 0, c));
      body.push_back(ins(Opcode::kExit, 0, 0));
    }
    validate(p);
    return p;
  }

 private:
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(rng_() % n); }

  Block access(Address a) {
    switch (below(3)) {
      case 0: return {ins(Opcode::kLoad, 0, a)};
      case 1: return {ins(Opcode::kSet, 1, below(1000)), ins(Opcode::kStore, 1, a)};
      default: return {ins(Opcode::kLoad, 0, a), ins(Opcode::kAddi, 0, 1 + below(9)), ins(Opcode::kStore, 0, a)};
    }
  }

  Block group(ThreadId t, std::uint32_t k) {
    if (!shared_.empty() && chance(0.5)) {
      Block body = access(shared_[below(static_cast<std::uint32_t>(shared_.size()))]);
      if (!chance(o_.lock_density)) return body;
      body.insert(body.begin(), ins(Opcode::kLock, 0, 0));
      body.push_back(ins(Opcode::kUnlock, 0, 0));
      return body;
    }
    Block body = access(kPrivateBase + t * kPrivateStride + 4 * (k % 64));
    if (o_.extra_mutexes > 0 && chance(0.3)) {
      const std::uint32_t m = 1 + below(o_.extra_mutexes);
      body.insert(body.begin(), ins(Opcode::kLock, 0, m));
      body.push_back(ins(Opcode::kUnlock, 0, m));
    }
    return body;
  }

  // Each post/wait goes between two groups, so no lock is held around it.
  void place_semaphores(std::vector<std::vector<Block>>& groups) {
    if (o_.sem_pairs == 0) return;
    if (o_.threads < 2) throw std::invalid_argument("sem_pairs needs at least two threads");
    for (std::uint32_t s = 0; s < o_.sem_pairs; ++s) {
      const ThreadId waiter = 1 + below(o_.threads - 1);
      const ThreadId poster = below(waiter);
      insert_at_random(groups[poster], ins(Opcode::kSemPost, 0, s));
      insert_at_random(groups[waiter], ins(Opcode::kSemWait, 0, s));
    }
  }

  void insert_at_random(std::vector<Block>& blocks, Instruction i) {
    const auto at = below(static_cast<std::uint32_t>(blocks.size()) + 1);
    blocks.insert(blocks.begin() + at, Block{i});
  }

  const GeneratorOptions& o_;
  std::mt19937_64 rng_;
  std::vector<Address> shared_;
};

}  // namespace

Program generate_program(const GeneratorOptions& options) {
  if (options.threads == 0) throw std::invalid_argument("threads must be positive");
  if (options.lock_density < 0 || options.lock_density > 1)
    throw std::invalid_argument("lock density must be within [0, 1]");
  if (options.shared_addresses > 1u << 20) throw std::invalid_argument("shared address pool too large");
  return Generator(options).build();
}

}  // namespace recplay
