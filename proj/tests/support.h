// Programs and helpers shared by the unit tests and the acceptance run.
#ifndef RECPLAY_TESTS_SUPPORT_H_
#define RECPLAY_TESTS_SUPPORT_H_

#include <cstdio>
#include <string>

#include "recplay/model.h"

namespace recplay::testing {

inline constexpr Address kGlobal = 0x1000;

inline const char* lost_update_text() {
  return R"(mem 0x1000 5
thread 0:
  CREATE 1
  CREATE 2
  JOIN 1
  JOIN 2
  EXIT
thread 1:
  LOAD r0 0x1000
  ADDI r0 6
  STORE r0 0x1000
  EXIT
thread 2:
  LOAD r0 0x1000
  ADDI r0 7
  STORE r0 0x1000
  EXIT
)";
}

inline const char* lost_update_locked_text() {
  return R"(mutex m
mem 0x1000 5
thread 0:
  CREATE 1
  CREATE 2
  JOIN 1
  JOIN 2
  EXIT
thread 1:
  LOCK m
  LOAD r0 0x1000
  ADDI r0 6
  STORE r0 0x1000
  UNLOCK m
  EXIT
thread 2:
  LOCK m
  LOAD r0 0x1000
  ADDI r0 7
  STORE r0 0x1000
  UNLOCK m
  EXIT
)";
}

// Main and one worker both run `iterations` rounds of
// LOCK m / LOAD / ADDI / STORE / UNLOCK on one shared counter.
inline std::string ping_pong_text(int iterations) {
  std::string body;
  for (int i = 0; i < iterations; ++i) body += "  LOCK m\n  LOAD r0 0x2000\n  ADDI r0 1\n  STORE r0 0x2000\n  UNLOCK m\n";
  return "mutex m\nthread 0:\n  CREATE 1\n" + body + "  JOIN 1\n  EXIT\nthread 1:\n" + body + "  EXIT\n";
}

// Main alternates between two partners, one lock each: LOCK a with thread
// 1, then LOCK b with thread 2. With a single lock every thread learns what
// the others know along one chain, so snooped and logical matrix clocks
// coincide; with two chains they do not.
inline std::string two_lock_ping_pong_text(int iterations) {
  std::string main_body, a_body, b_body;
  auto round = [](const char* lock, const char* addr) {
    return std::string("  LOCK ") + lock + "\n  LOAD r0 " + addr + "\n  ADDI r0 1\n  STORE r0 " + addr + "\n  UNLOCK " +
           lock + "\n";
  };
  for (int i = 0; i < iterations; ++i) {
    main_body += round("a", "0x2000") + round("b", "0x2100");
    a_body += round("a", "0x2000");
    b_body += round("b", "0x2100");
  }
  return "mutex a\nmutex b\nthread 0:\n  CREATE 1\n  CREATE 2\n" + main_body + "  JOIN 1\n  JOIN 2\n  EXIT\nthread 1:\n" +
         a_body + "  EXIT\nthread 2:\n" + b_body + "  EXIT\n";
}

// Thread 1 is joined right away; main then ping-pongs with thread 2. Every
// later segment has seen thread 1's final clock, whose component can never
// grow again.
inline std::string early_join_text(int iterations) {
  std::string body;
  for (int i = 0; i < iterations; ++i) body += "  LOCK m\n  LOAD r0 0x2000\n  ADDI r0 1\n  STORE r0 0x2000\n  UNLOCK m\n";
  return "mutex m\nthread 0:\n  CREATE 1\n  JOIN 1\n  CREATE 2\n" + body +
         "  JOIN 2\n  EXIT\nthread 1:\n  SET r0 1\n  STORE r0 0x10\n  EXIT\nthread 2:\n" + body + "  EXIT\n";
}

// Main plus `workers` threads; everyone does `rounds` locked updates of a
// shared counter, each followed by a little private work. No barriers.
inline std::string locked_workers_text(int workers, int rounds) {
  std::string text = "mutex m\n";
  auto body = [&](int t) {
    std::string b;
    for (int i = 0; i < rounds; ++i) {
      char priv[16];
      std::snprintf(priv, sizeof priv, "0x%x", 0x100000 * (t + 1) + 4 * (i % 16));
      b += "  LOCK m\n  LOAD r0 0x3000\n  ADDI r0 1\n  STORE r0 0x3000\n  UNLOCK m\n";
      b += std::string("  LOAD r1 ") + priv + "\n  ADDI r1 2\n  STORE r1 " + priv + "\n";
    }
    return b;
  };
  text += "thread 0:\n";
  for (int c = 1; c <= workers; ++c) text += "  CREATE " + std::to_string(c) + "\n";
  text += body(0);
  for (int c = 1; c <= workers; ++c) text += "  JOIN " + std::to_string(c) + "\n";
  text += "  EXIT\n";
  for (int c = 1; c <= workers; ++c) text += "thread " + std::to_string(c) + ":\n" + body(c) + "  EXIT\n";
  return text;
}

// Single thread: no concurrency at all.
inline const char* single_thread_text() {
  return R"(mutex m
thread 0:
  SET r0 7
  STORE r0 0x500
  LOCK m
  LOAD r1 0x500
  UNLOCK m
  STORE r1 0x504
  EXIT
)";
}

// Producer/consumer through semaphores, no barrier in sight.
inline std::string producer_consumer_text(int items) {
  std::string producer, consumer;
  for (int i = 0; i < items; ++i) {
    producer += "  SEM_WAIT empty\n  LOAD r0 0x4000\n  ADDI r0 1\n  STORE r0 0x4000\n  SEM_POST full\n";
    consumer += "  SEM_WAIT full\n  LOAD r1 0x4000\n  STORE r1 0x4004\n  SEM_POST empty\n";
  }
  return "sem empty 1\nsem full 0\nthread 0:\n  CREATE 1\n" + producer + "  JOIN 1\n  EXIT\nthread 1:\n" +
         consumer + "  EXIT\n";
}

}  // namespace recplay::testing

#endif  // RECPLAY_TESTS_SUPPORT_H_
