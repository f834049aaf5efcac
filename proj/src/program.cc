#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "recplay/model.h"

namespace recplay {

namespace {

struct MnemonicEntry {
  Opcode op;
  std::string_view name;
};

constexpr MnemonicEntry kMnemonics[] = {
    {Opcode::kLoad, "LOAD"},         {Opcode::kStore, "STORE"},
    {Opcode::kAddi, "ADDI"},         {Opcode::kSet, "SET"},
    {Opcode::kLock, "LOCK"},         {Opcode::kUnlock, "UNLOCK"},
    {Opcode::kSemWait, "SEM_WAIT"},  {Opcode::kSemPost, "SEM_POST"},
    {Opcode::kCreate, "CREATE"},     {Opcode::kJoin, "JOIN"},
    {Opcode::kExit, "EXIT"},
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::optional<std::uint64_t> parse_unsigned(std::string_view s, int base) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view strip_hex_prefix(std::string_view s) {
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) return s.substr(2);
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program parse() {
    std::size_t pos = 0;
    std::uint32_t line_no = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      std::string_view line = text_.substr(pos, end - pos);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      parse_line(line_no, split_ws(line));
      pos = end + 1;
    }
    return finish();
  }

 private:
  [[noreturn]] void fail(std::uint32_t line, const std::string& msg) const {
    throw ProgramError(line, msg);
  }

  void parse_line(std::uint32_t line, const std::vector<std::string_view>& tok) {
    if (tok.empty()) return;
    const std::string head = upper(tok[0]);
    if (head == "THREAD") {
      parse_thread_header(line, tok);
      return;
    }
    if (head == "MUTEX" || head == "SEM" || head == "MEM") {
      if (current_ != nullptr) fail(line, "declaration '" + std::string(tok[0]) + "' after thread section");
      if (head == "MUTEX") parse_mutex(line, tok);
      else if (head == "SEM") parse_sem(line, tok);
      else parse_mem(line, tok);
      return;
    }
    if (current_ == nullptr) fail(line, "instruction outside of a thread section");
    current_->push_back(parse_instruction(line, tok));
  }

  void declare_name(std::uint32_t line, std::string_view name) {
    if (!is_identifier(name)) fail(line, "invalid sync object name '" + std::string(name) + "'");
    if (names_.count(std::string(name))) fail(line, "duplicate sync object '" + std::string(name) + "'");
  }

  void parse_mutex(std::uint32_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 2) fail(line, "expected: mutex <name>");
    declare_name(line, tok[1]);
    names_[std::string(tok[1])] = {SyncObjectKind::kMutex, static_cast<std::uint32_t>(program_.mutexes.size())};
    program_.mutexes.emplace_back(tok[1]);
  }

  void parse_sem(std::uint32_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 3) fail(line, "expected: sem <name> <initial>");
    declare_name(line, tok[1]);
    auto initial = parse_constant(tok[2]);
    if (!initial || tok[2].starts_with("-")) fail(line, "invalid semaphore count '" + std::string(tok[2]) + "'");
    names_[std::string(tok[1])] = {SyncObjectKind::kSemaphore, static_cast<std::uint32_t>(program_.semaphores.size())};
    program_.semaphores.push_back({std::string(tok[1]), *initial});
  }

  void parse_mem(std::uint32_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 3) fail(line, "expected: mem <hex-addr> <value>");
    Address a = parse_address(line, tok[1]);
    auto v = parse_constant(tok[2]);
    if (!v) fail(line, "invalid value '" + std::string(tok[2]) + "'");
    if (!program_.initial_memory.emplace(a, *v).second) fail(line, "duplicate mem declaration");
  }

  void parse_thread_header(std::uint32_t line, const std::vector<std::string_view>& tok) {
    std::string rest;
    for (std::size_t i = 1; i < tok.size(); ++i) rest += tok[i];
    if (rest.empty() || rest.back() != ':') fail(line, "expected: thread <id>:");
    rest.pop_back();
    auto id = parse_unsigned(rest, 10);
    if (!id || *id > 0xFFFF) fail(line, "invalid thread id '" + rest + "'");
    auto [it, inserted] = bodies_.try_emplace(static_cast<ThreadId>(*id));
    if (!inserted) fail(line, "duplicate thread id " + rest);
    header_line_[static_cast<ThreadId>(*id)] = line;
    current_ = &it->second;
  }

  // Decimal or 0x-hex, optionally negative; wraps to 32 bits.
  static std::optional<std::uint32_t> parse_constant(std::string_view s) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
      neg = s[0] == '-';
      s.remove_prefix(1);
    }
    std::optional<std::uint64_t> v;
    std::string_view digits = strip_hex_prefix(s);
    v = digits.size() != s.size() ? parse_unsigned(digits, 16) : parse_unsigned(s, 10);
    if (!v || *v > 0xFFFFFFFFull) return std::nullopt;
    auto w = static_cast<std::uint32_t>(*v);
    return neg ? static_cast<std::uint32_t>(0u - w) : w;
  }

  Address parse_address(std::uint32_t line, std::string_view s) const {
    auto v = parse_unsigned(strip_hex_prefix(s), 16);
    if (!v || *v > 0xFFFFFFFFull) fail(line, "invalid hex address '" + std::string(s) + "'");
    return static_cast<Address>(*v);
  }

  std::uint32_t parse_register(std::uint32_t line, std::string_view s) const {
    if (s.size() >= 2 && (s[0] == 'r' || s[0] == 'R')) {
      auto n = parse_unsigned(s.substr(1), 10);
      if (n && *n < kRegisterCount) return static_cast<std::uint32_t>(*n);
    }
    fail(line, "undeclared register '" + std::string(s) + "'");
  }

  std::uint32_t resolve(std::uint32_t line, std::string_view name, SyncObjectKind kind) const {
    auto it = names_.find(std::string(name));
    if (it == names_.end() || it->second.first != kind)
      fail(line, "undeclared sync object '" + std::string(name) + "'");
    return it->second.second;
  }

  Instruction parse_instruction(std::uint32_t line, const std::vector<std::string_view>& tok) {
    const std::string m = upper(tok[0]);
    auto entry = std::find_if(std::begin(kMnemonics), std::end(kMnemonics),
                              [&](const MnemonicEntry& e) { return e.name == m; });
    if (entry == std::end(kMnemonics)) fail(line, "unknown instruction '" + std::string(tok[0]) + "'");
    Instruction ins;
    ins.op = entry->op;
    ins.line = line;
    auto arity = [&](std::size_t n) {
      if (tok.size() != n + 1)
        fail(line, std::string(entry->name) + " takes " + std::to_string(n) + " operand(s)");
    };
    switch (ins.op) {
      case Opcode::kLoad:
      case Opcode::kStore:
        arity(2);
        ins.reg = parse_register(line, tok[1]);
        ins.operand = parse_address(line, tok[2]);
        break;
      case Opcode::kAddi:
      case Opcode::kSet: {
        arity(2);
        ins.reg = parse_register(line, tok[1]);
        auto c = parse_constant(tok[2]);
        if (!c) fail(line, "invalid constant '" + std::string(tok[2]) + "'");
        ins.operand = *c;
        break;
      }
      case Opcode::kLock:
      case Opcode::kUnlock:
        arity(1);
        ins.operand = resolve(line, tok[1], SyncObjectKind::kMutex);
        break;
      case Opcode::kSemWait:
      case Opcode::kSemPost:
        arity(1);
        ins.operand = resolve(line, tok[1], SyncObjectKind::kSemaphore);
        break;
      case Opcode::kCreate:
      case Opcode::kJoin: {
        arity(1);
        auto t = parse_unsigned(tok[1], 10);
        if (!t || *t > 0xFFFF) fail(line, "invalid thread id '" + std::string(tok[1]) + "'");
        ins.operand = static_cast<std::uint32_t>(*t);
        break;
      }
      case Opcode::kExit:
        arity(0);
        break;
    }
    return ins;
  }

  Program finish() {
    if (bodies_.empty()) fail(0, "program declares no threads");
    ThreadId expected = 0;
    for (auto& [id, body] : bodies_) {
      if (id != expected) fail(header_line_[id], "thread ids must be dense from 0: missing thread " + std::to_string(expected));
      ++expected;
      program_.threads.push_back(std::move(body));
    }
    validate(program_);
    return std::move(program_);
  }

  std::string_view text_;
  Program program_;
  std::map<std::string, std::pair<SyncObjectKind, std::uint32_t>> names_;
  std::map<ThreadId, std::vector<Instruction>> bodies_;
  std::map<ThreadId, std::uint32_t> header_line_;
  std::vector<Instruction>* current_ = nullptr;
};

}  // namespace

std::string_view mnemonic(Opcode op) {
  for (const auto& e : kMnemonics)
    if (e.op == op) return e.name;
  return "?";
}

bool is_sync(Opcode op) {
  switch (op) {
    case Opcode::kLock:
    case Opcode::kUnlock:
    case Opcode::kSemWait:
    case Opcode::kSemPost:
    case Opcode::kCreate:
    case Opcode::kJoin:
    case Opcode::kExit:
      return true;
    default:
      return false;
  }
}

std::uint32_t Program::object_count() const {
  return static_cast<std::uint32_t>(mutexes.size() + semaphores.size() + 2 * threads.size());
}

std::uint32_t Program::object_id(SyncObjectKind kind, std::uint32_t index) const {
  const auto m = static_cast<std::uint32_t>(mutexes.size());
  const auto s = static_cast<std::uint32_t>(semaphores.size());
  const auto n = static_cast<std::uint32_t>(threads.size());
  switch (kind) {
    case SyncObjectKind::kMutex: return index;
    case SyncObjectKind::kSemaphore: return m + index;
    case SyncObjectKind::kCreate: return m + s + index;
    case SyncObjectKind::kExit: return m + s + n + index;
  }
  return 0;
}

SyncObjectKind Program::object_kind(std::uint32_t object) const {
  const auto m = mutexes.size(), s = semaphores.size(), n = threads.size();
  if (object < m) return SyncObjectKind::kMutex;
  if (object < m + s) return SyncObjectKind::kSemaphore;
  if (object < m + s + n) return SyncObjectKind::kCreate;
  return SyncObjectKind::kExit;
}

std::string Program::object_name(std::uint32_t object) const {
  const auto m = mutexes.size(), s = semaphores.size(), n = threads.size();
  if (object < m) return "mutex " + mutexes[object];
  if (object < m + s) return "sem " + semaphores[object - m].name;
  if (object < m + s + n) return "create(" + std::to_string(object - m - s) + ")";
  return "exit(" + std::to_string(object - m - s - n) + ")";
}

void validate(const Program& p) {
  const std::size_t n = p.threads.size();
  if (n == 0) throw ProgramError(0, "program declares no threads");
  if (p.main_thread != 0) throw ProgramError(0, "main thread must be thread 0");
  std::vector<int> created(n, 0), joined(n, 0);
  std::vector<ThreadId> creator(n, 0);
  for (ThreadId t = 0; t < n; ++t) {
    const auto& body = p.threads[t];
    if (body.empty() || body.back().op != Opcode::kExit)
      throw ProgramError(body.empty() ? 0 : body.back().line,
                         "thread " + std::to_string(t) + " body must end with EXIT");
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Instruction& ins = body[i];
      auto bad = [&](const std::string& msg) { throw ProgramError(ins.line, msg); };
      if (ins.op == Opcode::kExit && i + 1 != body.size()) bad("EXIT before end of thread " + std::to_string(t));
      switch (ins.op) {
        case Opcode::kLoad:
        case Opcode::kStore:
        case Opcode::kAddi:
        case Opcode::kSet:
          if (ins.reg >= kRegisterCount) bad("undeclared register r" + std::to_string(ins.reg));
          break;
        case Opcode::kLock:
        case Opcode::kUnlock:
          if (ins.operand >= p.mutexes.size()) bad("undeclared sync object (mutex " + std::to_string(ins.operand) + ")");
          break;
        case Opcode::kSemWait:
        case Opcode::kSemPost:
          if (ins.operand >= p.semaphores.size()) bad("undeclared sync object (sem " + std::to_string(ins.operand) + ")");
          break;
        case Opcode::kCreate:
        case Opcode::kJoin: {
          const ThreadId target = ins.operand;
          if (target >= n) bad("undeclared thread " + std::to_string(target));
          if (target == t) bad("thread " + std::to_string(t) + " cannot " + std::string(mnemonic(ins.op)) + " itself");
          if (ins.op == Opcode::kCreate) {
            if (target == p.main_thread) bad("main thread cannot be created");
            if (++created[target] > 1) bad("thread " + std::to_string(target) + " created more than once");
            creator[target] = t;
          } else if (++joined[target] > 1) {
            bad("thread " + std::to_string(target) + " joined more than once");
          }
          break;
        }
        case Opcode::kExit:
          break;
      }
    }
  }
  for (ThreadId t = 1; t < n; ++t) {
    if (created[t] == 0) throw ProgramError(0, "thread " + std::to_string(t) + " is never created");
    // Walk up the creator chain; a cycle means the thread can never start.
    ThreadId cur = t;
    for (std::size_t steps = 0; cur != p.main_thread; ++steps) {
      if (steps > n) throw ProgramError(0, "thread " + std::to_string(t) + " is not reachable from the main thread");
      cur = creator[cur];
    }
  }
}

std::vector<bool> joined_threads(const Program& p) {
  std::vector<bool> joined(p.threads.size(), false);
  for (const auto& body : p.threads)
    for (const auto& ins : body)
      if (ins.op == Opcode::kJoin && ins.operand < joined.size()) joined[ins.operand] = true;
  return joined;
}

std::string to_text(const Program& p) {
  std::ostringstream os;
  char buf[16];
  for (const auto& m : p.mutexes) os << "mutex " << m << '\n';
  for (const auto& s : p.semaphores) os << "sem " << s.name << ' ' << s.initial << '\n';
  for (const auto& [a, v] : p.initial_memory) {
    std::snprintf(buf, sizeof buf, "0x%08x", a);
    os << "mem " << buf << ' ' << v << '\n';
  }
  for (ThreadId t = 0; t < p.threads.size(); ++t) {
    os << "thread " << t << ":\n";
    for (const auto& ins : p.threads[t]) {
      os << "  " << mnemonic(ins.op);
      switch (ins.op) {
        case Opcode::kLoad:
        case Opcode::kStore:
          std::snprintf(buf, sizeof buf, "0x%08x", ins.operand);
          os << " r" << ins.reg << ' ' << buf;
          break;
        case Opcode::kAddi:
        case Opcode::kSet:
          os << " r" << ins.reg << ' ' << ins.operand;
          break;
        case Opcode::kLock:
        case Opcode::kUnlock:
          os << ' ' << p.mutexes.at(ins.operand);
          break;
        case Opcode::kSemWait:
        case Opcode::kSemPost:
          os << ' ' << p.semaphores.at(ins.operand).name;
          break;
        case Opcode::kCreate:
        case Opcode::kJoin:
          os << ' ' << ins.operand;
          break;
        case Opcode::kExit:
          break;
      }
      os << '\n';
    }
  }
  return os.str();
}

std::uint64_t digest(const Program& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : to_text(p)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Program parse_program(std::string_view text) { return Parser(text).parse(); }

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open program file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

}  // namespace recplay
