// recplay: record, replay, detect and identify data races in programs for
// the simulated machine.
//
// Exit status: 0 clean, 10 race found, 20 replay diverged without a race,
// 1 usage, file format or runtime error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "recplay/generator.h"
#include "recplay/oracle.h"
#include "recplay/pipeline.h"

namespace {

using namespace recplay;

constexpr int kExitClean = 0;
constexpr int kExitError = 1;
constexpr int kExitRace = 10;
constexpr int kExitDiverged = 20;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path);
}

int detection_exit(const DetectionResult& d) {
  switch (d.outcome) {
    case DetectOutcome::kClean: return kExitClean;
    case DetectOutcome::kRace: return kExitRace;
    case DetectOutcome::kDivergedWithoutRace: return kExitDiverged;
  }
  return kExitError;
}

GcPolicy parse_gc(const std::string& s) {
  if (s == "none") return GcPolicy::kNone;
  if (s == "logical") return GcPolicy::kLogical;
  return GcPolicy::kSnooped;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"record/replay data race detection for a simulated machine"};
  app.require_subcommand(1);

  std::string program_path, trace_path, report_path, out_path, gc = "snooped", probe_path, out_dir = ".";
  std::uint64_t seed = 0, tie_break = 0;
  bool all_races = false;

  auto* record = app.add_subcommand("record", "run once and write the sync trace");
  record->add_option("program", program_path)->required()->check(CLI::ExistingFile);
  record->add_option("--seed", seed, "scheduler seed");
  record->add_option("--trace,-o", trace_path, "trace output file")->required();

  auto* replay = app.add_subcommand("replay", "re-run under a trace and check it is followed");
  replay->add_option("program", program_path)->required()->check(CLI::ExistingFile);
  replay->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  replay->add_option("--tie-break", tie_break, "seed for ordering ops with equal timestamps");

  auto* detect_cmd = app.add_subcommand("detect", "replay and report the first data race");
  detect_cmd->add_option("program", program_path)->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  detect_cmd->add_flag("--all-races", all_races, "keep going after the first race");
  detect_cmd->add_option("--probe-live-segments", probe_path, "write per-snoop-point live segment counts (CSV)");
  detect_cmd->add_option("--gc", gc, "segment discard policy")->check(CLI::IsMember({"none", "logical", "snooped"}));
  detect_cmd->add_option("--report,-o", report_path, "also write the race record here");
  detect_cmd->add_option("--tie-break", tie_break);

  auto* identify_cmd = app.add_subcommand("identify", "replay once more and name the racing instructions");
  identify_cmd->add_option("program", program_path)->required()->check(CLI::ExistingFile);
  identify_cmd->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  identify_cmd->add_option("--report", report_path)->required()->check(CLI::ExistingFile);
  identify_cmd->add_option("--tie-break", tie_break);

  auto* pipeline = app.add_subcommand("pipeline", "record, detect and identify in one go");
  pipeline->add_option("program", program_path)->required()->check(CLI::ExistingFile);
  pipeline->add_option("--seed", seed);
  pipeline->add_option("--out-dir", out_dir, "where trace.rolt, report.txt and summary.txt go");
  pipeline->add_option("--gc", gc)->check(CLI::IsMember({"none", "logical", "snooped"}));

  GeneratorOptions gen_options;
  auto* gen = app.add_subcommand("gen", "write a random program");
  gen->add_option("--seed", gen_options.seed);
  gen->add_option("--threads", gen_options.threads)->check(CLI::Range(1u, 64u));
  gen->add_option("--ops", gen_options.ops, "operation groups per thread")->check(CLI::Range(1u, 100000u));
  gen->add_option("--lock-density", gen_options.lock_density)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--shared-addresses", gen_options.shared_addresses)->check(CLI::Range(1u, 1u << 20));
  gen->add_option("--sem-pairs", gen_options.sem_pairs);
  gen->add_option("--extra-mutexes", gen_options.extra_mutexes);
  gen->add_option("--output,-o", out_path);

  auto* oracle_cmd = app.add_subcommand("oracle-detect", "");
  oracle_cmd->group("");  // debugging aid, not listed in --help
  oracle_cmd->add_option("program", program_path)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every real parse problem is a usage error.
    return app.exit(e) == 0 ? kExitClean : kExitError;
  }

  try {
    if (*gen) {
      const std::string text = to_text(generate_program(gen_options));
      if (out_path.empty()) std::cout << text;
      else write_file(out_path, text);
      return kExitClean;
    }

    const Program program = parse_program(read_file(program_path));
    validate(program);

    if (*record) {
      RecordResult r = record_execution(program, {seed});
      write_trace_file(trace_path, r.trace);
      std::cout << "sync_ops=" << r.trace.sync_op_count() << "\ntrace_bytes=" << encode_trace(r.trace).size()
                << "\n";
      return kExitClean;
    }

    if (*replay) {
      const ReplayResult r = replay_execution(program, read_trace_file(trace_path), nullptr, {tie_break});
      std::cout << "replay=" << to_string(r.verdict) << "\n";
      if (r.verdict == ReplayVerdict::kDiverged) {
        std::cerr << "divergence: " << r.divergence << "\n";
        return kExitDiverged;
      }
      return kExitClean;
    }

    if (*detect_cmd) {
      DetectorOptions options;
      options.gc = parse_gc(gc);
      options.all_races = all_races;
      options.probe_live_segments = !probe_path.empty();
      options.replay_seed = {tie_break};
      const DetectionResult d = detect(program, read_trace_file(trace_path), options);
      for (const RaceReport& race : d.races) std::cerr << describe_report(race);
      if (d.race) {
        std::cout << format_report(*d.race);
        if (!report_path.empty()) write_file(report_path, format_report(*d.race));
      } else {
        std::cout << "race=no\n";
      }
      if (!d.diagnostic.empty()) std::cerr << d.diagnostic << "\n";
      if (!probe_path.empty()) write_file(probe_path, format_probe_csv(d.probe));
      std::cout << format_summary_kv(summarize(read_trace_file(trace_path), d.stats));
      return detection_exit(d);
    }

    if (*identify_cmd) {
      const RaceReport report = parse_report(read_file(report_path));
      const Identification id = identify(program, read_trace_file(trace_path), report, {tie_break});
      std::cout << format_report(report) << format_identification(id);
      return kExitRace;
    }

    if (*pipeline) {
      DetectorOptions options;
      options.gc = parse_gc(gc);
      const PipelineResult r = run_pipeline(program, {seed}, options);
      std::filesystem::create_directories(out_dir);
      const std::filesystem::path dir(out_dir);
      write_trace_file((dir / "trace.rolt").string(), r.record.trace);
      std::string report = "race=no\n";
      if (r.detection.race) {
        report = format_report(*r.detection.race) + format_identification(*r.identification);
        std::cerr << describe_report(*r.detection.race);
      }
      write_file((dir / "report.txt").string(), report);
      write_file((dir / "summary.txt").string(), format_summary_kv(r.summary));
      std::cout << report << format_summary_text(r.summary);
      if (!r.detection.diagnostic.empty()) std::cerr << r.detection.diagnostic << "\n";
      return detection_exit(r.detection);
    }

    if (*oracle_cmd) {
      const RecordResult r = record_execution(program, {seed});
      const ReplayResult full = replay_execution(program, r.trace);
      const auto race = oracle::brute_force_detect(full.execution.events);
      if (!race) {
        std::cout << "race=no\n";
        return kExitClean;
      }
      std::cout << "race=yes\nt1=" << race->first.thread << " seg=" << race->first.index
                << "\nt2=" << race->second.thread << " seg=" << race->second.index << "\nwitnesses=";
      for (std::size_t i = 0; i < race->witnesses.size(); ++i)
        std::cout << (i ? "," : "") << hex_address(race->witnesses[i]);
      std::cout << "\n";
      return kExitRace;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
