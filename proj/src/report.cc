#include "recplay/report.h"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace recplay {

namespace {

std::uint64_t parse_hex(std::string_view key, std::string_view v) {
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) v.remove_prefix(2);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out, 16);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ReportFormatError("bad hex value for " + std::string(key));
  return out;
}

std::uint32_t parse_u32(std::string_view key, std::string_view v) {
  std::uint32_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ReportFormatError("bad number for " + std::string(key));
  return out;
}

std::string side_line(const char* key, const RaceSide& s) {
  return std::string(key) + "=" + std::to_string(s.segment.thread) + " seg=" + std::to_string(s.segment.index) +
         " kind=" + std::string(to_string(s.kind)) + " clock=" + to_string(s.clock);
}

}  // namespace

std::string_view to_string(AccessKind kind) { return kind == AccessKind::kLoad ? "load" : "store"; }

AccessKind parse_access_kind(std::string_view text) {
  if (text == "load") return AccessKind::kLoad;
  if (text == "store") return AccessKind::kStore;
  throw ReportFormatError("unknown access kind '" + std::string(text) + "'");
}

std::string hex_address(Address a) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", a);
  return buf;
}

std::string format_report(const RaceReport& r) {
  std::ostringstream os;
  char digest_buf[24];
  std::snprintf(digest_buf, sizeof digest_buf, "0x%016llx", static_cast<unsigned long long>(r.program_digest));
  os << "race=yes\n";
  os << "digest=" << digest_buf << '\n';
  os << "witness=" << hex_address(r.witness()) << '\n';
  os << "witnesses=";
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) os << (i ? "," : "") << hex_address(r.witnesses[i]);
  os << '\n';
  os << side_line("t1", r.first) << '\n';
  os << side_line("t2", r.second) << '\n';
  os << "instructions=unknown\n";
  return os.str();
}

std::string describe_report(const RaceReport& r) {
  std::ostringstream os;
  os << "data race on " << hex_address(r.witness());
  if (r.witnesses.size() > 1) os << " (+" << r.witnesses.size() - 1 << " more addresses)";
  os << '\n';
  for (const RaceSide* s : {&r.first, &r.second})
    os << "  thread " << s->segment.thread << " segment " << s->segment.index << ": " << to_string(s->kind)
       << ", clock " << to_string(s->clock) << '\n';
  return os.str();
}

RaceReport parse_report(std::string_view text) {
  RaceReport r;
  bool have_digest = false, have_witnesses = false, have_t1 = false, have_t2 = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::string tok;
    std::map<std::string, std::string> kv;
    std::string lead;
    if (!(tokens >> tok)) continue;
    const std::string first_key = tok.substr(0, tok.find('='));
    // race=, witness=, instructions=, i1=, i2= carry nothing we need back.
    if (first_key != "digest" && first_key != "witnesses" && first_key != "t1" && first_key != "t2") continue;
    tokens.seekg(0);
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ReportFormatError("expected key=value, got '" + tok + "'");
      if (lead.empty()) lead = tok.substr(0, eq);
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (lead == "digest") {
      r.program_digest = parse_hex(lead, kv[lead]);
      have_digest = true;
    } else if (lead == "witnesses") {
      std::string_view list = kv[lead];
      while (!list.empty()) {
        const auto comma = list.find(',');
        r.witnesses.push_back(static_cast<Address>(parse_hex(lead, list.substr(0, comma))));
        list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
      }
      have_witnesses = !r.witnesses.empty();
    } else if (lead == "t1" || lead == "t2") {
      RaceSide& s = lead == "t1" ? r.first : r.second;
      if (!kv.count("seg") || !kv.count("kind") || !kv.count("clock"))
        throw ReportFormatError(lead + " line needs seg=, kind= and clock=");
      s.segment.thread = parse_u32(lead, kv[lead]);
      s.segment.index = parse_u32("seg", kv["seg"]);
      s.kind = parse_access_kind(kv["kind"]);
      try {
        s.clock = parse_vector_clock(kv["clock"]);
      } catch (const std::invalid_argument& e) {
        throw ReportFormatError(e.what());
      }
      (lead == "t1" ? have_t1 : have_t2) = true;
    }
  }
  if (!have_digest || !have_witnesses || !have_t1 || !have_t2)
    throw ReportFormatError("incomplete race report (needs digest, witnesses, t1, t2)");
  return r;
}

}  // namespace recplay
