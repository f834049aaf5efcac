#include <random>

#include "doctest.h"
#include "recplay/clock_tracker.h"
#include "recplay/clocks.h"
#include "recplay/generator.h"
#include "support.h"

using namespace recplay;

namespace {

VectorClock random_clock(std::mt19937_64& rng, std::size_t n, std::uint64_t range) {
  VectorClock c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = rng() % range;
  return c;
}

}  // namespace

TEST_CASE("lamport_sync takes max + 1 and advances both clocks") {
  LamportTime t = 0, o = 0;
  CHECK(lamport_sync(t, o) == 1);
  CHECK((t == 1 && o == 1));
  t = 5;
  o = 9;
  CHECK(lamport_sync(t, o) == 10);
  CHECK((t == 10 && o == 10));
}

TEST_CASE("lamport stamps increase along thread and object chains") {
  // Three threads taking turns on two locks, written out by hand: ten ops.
  struct Op {
    int thread, object;
  };
  const Op ops[] = {{0, 0}, {1, 0}, {2, 1}, {0, 1}, {1, 0}, {2, 0}, {0, 0}, {1, 1}, {2, 1}, {0, 0}};
  LamportTime thread[3] = {}, object[2] = {};
  LamportTime last_thread[3] = {}, last_object[2] = {};
  for (const Op& op : ops) {
    const LamportTime ts = lamport_sync(thread[op.thread], object[op.object]);
    CHECK(ts > last_thread[op.thread]);
    CHECK(ts > last_object[op.object]);
    last_thread[op.thread] = last_object[op.object] = ts;
  }
}

TEST_CASE("compare on small clocks") {
  CHECK(compare({1, 0}, {1, 1}) == ClockOrder::kBefore);
  CHECK(compare({1, 1}, {1, 0}) == ClockOrder::kAfter);
  CHECK(compare({1, 0}, {0, 1}) == ClockOrder::kConcurrent);
  CHECK(compare({2, 3}, {2, 3}) == ClockOrder::kEqual);
  CHECK_THROWS_AS(compare({1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("compare agrees with the componentwise definition") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20000; ++i) {
    const std::size_t n = 1 + rng() % 5;
    const VectorClock a = random_clock(rng, n, 3), b = random_clock(rng, n, 3);
    bool le = true, ge = true;
    for (std::size_t k = 0; k < n; ++k) {
      le = le && a[k] <= b[k];
      ge = ge && a[k] >= b[k];
    }
    const ClockOrder expected = le && ge ? ClockOrder::kEqual
                                : le     ? ClockOrder::kBefore
                                : ge     ? ClockOrder::kAfter
                                         : ClockOrder::kConcurrent;
    REQUIRE(compare(a, b) == expected);
  }
}

TEST_CASE("join") {
  CHECK(join({1, 0}, {0, 1}) == VectorClock{1, 1});
  const VectorClock a{4, 0, 2};
  CHECK(join(a, a) == a);
  CHECK_THROWS_AS(join({1}, {1, 2}), std::invalid_argument);

  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    VectorClock acc(4);
    std::vector<std::uint64_t> expected(4, 0);
    for (int k = 0; k < 5; ++k) {
      const VectorClock c = random_clock(rng, 4, 100);
      acc = join(acc, c);
      for (std::size_t j = 0; j < 4; ++j) expected[j] = std::max(expected[j], c[j]);
    }
    for (std::size_t j = 0; j < 4; ++j) CHECK(acc[j] == expected[j]);
  }
}

TEST_CASE("column minimum") {
  const std::vector<VectorClock> equal{{2, 3}, {2, 3}};
  CHECK(column_min(equal) == VectorClock{2, 3});
  const std::vector<VectorClock> rows{{2, 0}, {1, 3}};
  CHECK(column_min(rows) == VectorClock{1, 0});
  CHECK_THROWS(column_min(std::vector<VectorClock>{}));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<VectorClock> m;
    for (std::size_t r = 0; r < n; ++r) m.push_back(random_clock(rng, n, 50));
    const VectorClock h = column_min(m);
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t lo = m[0][j];
      for (const auto& row : m) lo = std::min(lo, row[j]);
      CHECK(h[j] == lo);
    }
  }
}

TEST_CASE("snoop") {
  const std::vector<VectorClock> clocks{{3, 1}, {2, 4}};
  const SnoopedMatrixClock m = snoop(clocks);
  CHECK(m.horizon == VectorClock{2, 1});
  CHECK(m.rows == clocks);
  // A thread idle since the start pins its own column.
  const std::vector<VectorClock> laggard{{90, 1}, {0, 1}};
  CHECK(snoop(laggard).horizon == VectorClock{0, 1});
}

TEST_CASE("discardable is componentwise <=") {
  CHECK(discardable({1, 2}, {1, 2}));
  CHECK(discardable({0, 2}, {1, 2}));
  CHECK(!discardable({2, 0}, {1, 5}));
}

TEST_CASE("clock text round-trips") {
  const VectorClock c{1, 0, 22};
  CHECK(to_string(c) == "[1,0,22]");
  CHECK(parse_vector_clock("[1,0,22]") == c);
  CHECK(parse_vector_clock("[]").size() == 0);
  CHECK_THROWS(parse_vector_clock("[1,,2]"));
  CHECK_THROWS(parse_vector_clock("1,2"));
}

namespace {

// Drives a ClockTracker from the sync events of one run.
class Follower : public ExecutionObserver {
 public:
  explicit Follower(const Program& p) : tracker(p) {}
  void on_event(const Event& e) override {
    if (e.kind != EventKind::kSync) return;
    closed.push_back({e.thread, tracker.on_sync(e)});
    if (auto snooped = tracker.snoop()) {
      const auto logical = tracker.logical_horizon(e.thread);
      REQUIRE(logical.has_value());
      CHECK(logical->leq(snooped->horizon));
      ++points;
    }
  }
  ClockTracker tracker;
  std::vector<std::pair<ThreadId, VectorClock>> closed;
  int points = 0;
};

}  // namespace

TEST_CASE("segment clocks carry own component index + 1") {
  const Program p = parse_program(recplay::testing::lost_update_text());
  Follower f(p);
  run(p, {0}, &f);
  std::map<ThreadId, std::uint64_t> index;
  for (const auto& [t, clock] : f.closed) CHECK(clock[t] == ++index[t]);
}

TEST_CASE("snooped horizon dominates the logical one") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    GeneratorOptions o;
    o.seed = seed;
    o.threads = 2 + seed % 3;
    o.ops = 15;
    o.lock_density = (seed % 4) / 3.0;
    o.sem_pairs = seed % 3;
    o.extra_mutexes = seed % 2;
    const Program p = generate_program(o);
    Follower f(p);
    run(p, {seed}, &f);
    CHECK(f.points > 0);
  }
}
