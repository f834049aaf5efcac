// Random program generator for property tests and the `gen` command.
//
// Thread 0 creates every other thread, runs its own operations, then joins
// them all. Each operation group is either a private access (its own
// address range per thread) or an access to a shared pool address, wrapped
// in LOCK g / UNLOCK g with probability `lock_density`. With density 1 every
// shared access holds g, so the program is race free.
#ifndef RECPLAY_GENERATOR_H_
#define RECPLAY_GENERATOR_H_

#include <cstdint>

#include "recplay/model.h"

namespace recplay {

struct GeneratorOptions {
  std::uint64_t seed = 0;
  std::uint32_t threads = 2;
  std::uint32_t ops = 10;  // operation groups per thread
  double lock_density = 0.5;
  std::uint32_t shared_addresses = 4;
  // SEM_POST/SEM_WAIT pairs; the poster always has a smaller id than the
  // waiter, which keeps every generated program deadlock free.
  std::uint32_t sem_pairs = 0;
  // Mutexes that only guard private work: extra sync ops, no protection.
  std::uint32_t extra_mutexes = 0;
};

// Throws std::invalid_argument on out-of-range options.
Program generate_program(const GeneratorOptions& options);

}  // namespace recplay

#endif  // RECPLAY_GENERATOR_H_
