#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "appsim/episode.hpp"
#include "appsim/errors.hpp"
#include "appsim/manual.hpp"
#include "appsim/oracle.hpp"
#include "appsim/planner.hpp"
#include "appsim/report.hpp"
#include "appsim/runner.hpp"
#include "appsim/schematic.hpp"
#include "appsim/session.hpp"
#include "appsim/spec_io.hpp"
#include "appsim/util.hpp"
#include "appsim/validate.hpp"

namespace fs = std::filesystem;
using namespace appsim;

namespace {

// Exit policy: 0 clean, 1 findings/divergence/unreachable goal, 2 infra
// (I/O, bad usage, planner endpoint down). Benchmark scores never change the
// exit status.
constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitInfra = 2;

struct GlobalOptions {
  uint64_t seed = 0;
  std::string corpus = "corpus";
  std::string out = "out";
  bool out_given = false;
  int jobs = 1;
  bool verbose = false;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

ApplianceSpec load_spec_at(const fs::path& path) {
  return load_spec(read_file(path), path.string());
}

// error:<file>:<path>:<message>, with SpecError's own location prefix
// stripped so the locator appears once.
std::string load_error_line(const fs::path& file, const SpecError& e) {
  std::string message = e.what();
  const std::string prefix = e.where() + ": ";
  if (!e.where().empty() && message.rfind(prefix, 0) == 0) {
    message = message.substr(prefix.size());
  }
  const std::string where = e.where().empty() ? "-" : e.where();
  return "error:" + file.string() + ":" + where + ":" + message;
}

struct Corpus {
  std::map<std::string, ApplianceSpec> specs;
  std::map<std::string, ManualDocument> manuals;
  std::vector<Episode> episodes;  // sorted by id
};

Corpus load_corpus(const fs::path& dir) {
  Corpus corpus;
  const fs::path specs_dir = dir / "specs";
  if (!fs::is_directory(specs_dir)) {
    throw std::runtime_error("corpus '" + dir.string() + "' has no specs/ directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(specs_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    ApplianceSpec spec = load_spec_at(file);
    const std::string id = spec.id;
    corpus.specs.emplace(id, std::move(spec));
  }

  for (const auto& [id, spec] : corpus.specs) {
    (void)spec;
    const fs::path manual_path = dir / "manuals" / id / "manual.json";
    if (fs::is_regular_file(manual_path)) {
      corpus.manuals.emplace(
          id, manual_from_json(nlohmann::json::parse(read_file(manual_path)),
                               manual_path.string()));
    }
  }

  const fs::path episodes_dir = dir / "episodes";
  if (fs::is_directory(episodes_dir)) {
    std::vector<fs::path> episode_files;
    for (const auto& entry : fs::directory_iterator(episodes_dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.ends_with(".episode.json")) {
        episode_files.push_back(entry.path());
      }
    }
    std::sort(episode_files.begin(), episode_files.end());
    for (const auto& file : episode_files) {
      corpus.episodes.push_back(
          episode_from_json(nlohmann::json::parse(read_file(file)), file.string()));
    }
  }
  std::sort(corpus.episodes.begin(), corpus.episodes.end(),
            [](const Episode& a, const Episode& b) { return a.id < b.id; });
  return corpus;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const GlobalOptions& g, std::vector<std::string> paths) {
  if (paths.empty()) {
    // Deliberately broken fixtures may sit elsewhere in the corpus tree, so
    // the default scope is the spec and episode directories only.
    for (const char* sub : {"specs", "episodes"}) {
      const fs::path dir = fs::path(g.corpus) / sub;
      if (fs::is_directory(dir)) paths.push_back(dir.string());
    }
    if (paths.empty()) paths.push_back(g.corpus);
  }

  struct Item {
    fs::path path;
    bool is_episode = false;
  };
  std::vector<Item> items;
  for (const auto& raw : paths) {
    const fs::path path(raw);
    if (fs::is_directory(path)) {
      for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".json") continue;
        if (name == "manual.json") continue;
        items.push_back({entry.path(), name.ends_with(".episode.json")});
      }
    } else if (fs::is_regular_file(path)) {
      items.push_back({path, path.filename().string().ends_with(".episode.json")});
    } else {
      std::cerr << "error: no such file or directory: " << raw << "\n";
      return kExitInfra;
    }
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.path < b.path; });

  int errors = 0;
  auto emit = [&errors](Finding::Severity sev, const fs::path& file, const std::string& where,
                        const std::string& message) {
    if (sev == Finding::Severity::Error) ++errors;
    std::cout << to_string(sev) << ":" << file.string() << ":" << where << ":" << message
              << "\n";
  };

  // Specs first so episodes can cross-check against them.
  std::map<std::string, ApplianceSpec> specs;
  std::map<std::string, int> manual_page_counts;
  for (const auto& item : items) {
    if (item.is_episode) continue;
    try {
      ApplianceSpec spec = load_spec_at(item.path);
      const ValidationReport report = validate_spec(spec);
      for (const auto& f : report.findings) emit(f.severity, item.path, f.path, f.message);
      specs.emplace(spec.id, std::move(spec));
    } catch (const SpecError& e) {
      std::cout << load_error_line(item.path, e) << "\n";
      ++errors;
    } catch (const nlohmann::json::exception& e) {
      emit(Finding::Severity::Error, item.path, "-", e.what());
    }
  }

  // Fall back to the corpus for specs and manual page counts the given paths
  // do not carry themselves.
  auto resolve_spec = [&](const std::string& id) -> const ApplianceSpec* {
    auto it = specs.find(id);
    if (it != specs.end()) return &it->second;
    const fs::path corpus_spec = fs::path(g.corpus) / "specs" / (id + ".json");
    if (fs::is_regular_file(corpus_spec)) {
      auto [pos, inserted] = specs.emplace(id, load_spec_at(corpus_spec));
      (void)inserted;
      return &pos->second;
    }
    return nullptr;
  };
  auto resolve_page_count = [&](const std::string& id) -> int {
    auto it = manual_page_counts.find(id);
    if (it != manual_page_counts.end()) return it->second;
    int count = std::numeric_limits<int>::max();  // unknown manual: bounds unchecked
    const fs::path manual_path = fs::path(g.corpus) / "manuals" / id / "manual.json";
    if (fs::is_regular_file(manual_path)) {
      count = static_cast<int>(
          manual_from_json(nlohmann::json::parse(read_file(manual_path)), manual_path.string())
              .pages.size());
    }
    manual_page_counts.emplace(id, count);
    return count;
  };

  for (const auto& item : items) {
    if (!item.is_episode) continue;
    try {
      const Episode episode =
          episode_from_json(nlohmann::json::parse(read_file(item.path)), item.path.string());
      const ApplianceSpec* spec = resolve_spec(episode.appliance);
      if (!spec) {
        emit(Finding::Severity::Error, item.path, "appliance",
             "no spec named '" + episode.appliance + "' among inputs or corpus");
        continue;
      }
      for (const auto& problem : check_episode(episode, *spec, resolve_page_count(spec->id))) {
        emit(Finding::Severity::Error, item.path, "episode", problem);
      }
    } catch (const SpecError& e) {
      std::cout << load_error_line(item.path, e) << "\n";
      ++errors;
    } catch (const nlohmann::json::exception& e) {
      emit(Finding::Severity::Error, item.path, "-", e.what());
    }
  }

  if (g.verbose) {
    std::cerr << items.size() << " files checked, " << errors << " errors\n";
  }
  return errors > 0 ? kExitFindings : kExitOk;
}

// ------------------------------------------------------- manual, schematic

int cmd_manual(const GlobalOptions& g, const std::string& spec_path) {
  const ApplianceSpec spec = load_spec_at(spec_path);
  const ManualDocument doc = render_manual(spec, g.seed);
  const fs::path dir = fs::path(g.out) / ("manual_" + spec.id);
  for (const auto& page : doc.pages) {
    write_file(dir / page_filename(page), page.text);
  }
  write_file(dir / "manual.json", manual_to_json(doc).dump(2) + "\n");
  std::cout << doc.pages.size() << " pages -> " << dir.string() << "\n";
  return kExitOk;
}

int cmd_schematic(const GlobalOptions& g, const std::string& spec_path) {
  const ApplianceSpec spec = load_spec_at(spec_path);
  const std::string svg = render_panel_schematic(spec);
  if (g.out_given) {
    const fs::path file = fs::path(g.out) / (spec.id + ".svg");
    write_file(file, svg);
    std::cout << file.string() << "\n";
  } else {
    std::cout << svg;
  }
  return kExitOk;
}

// --------------------------------------------------------------- simulate

class StreamTraceSink final : public TraceSink {
 public:
  explicit StreamTraceSink(std::ostream& out) : out_(out) {}
  void emit(const TraceEvent& e) override { out_ << trace_event_to_line(e) << "\n"; }

 private:
  std::ostream& out_;
};

ParamValue parse_scalar(const std::string& token) {
  try {
    size_t used = 0;
    const long long v = std::stoll(token, &used);
    if (used == token.size()) return ParamValue(static_cast<int64_t>(v));
  } catch (...) {
  }
  try {
    size_t used = 0;
    const double v = std::stod(token, &used);
    if (used == token.size()) return ParamValue(v);
  } catch (...) {
  }
  return ParamValue(token);
}

int cmd_simulate(const GlobalOptions& g, const std::string& spec_path,
                 const std::string& record_path) {
  const ApplianceSpec spec = load_spec_at(spec_path);
  Session sess(spec, g.seed);

  std::ofstream record;
  std::unique_ptr<StreamTraceSink> sink;
  if (!record_path.empty()) {
    if (fs::path(record_path).has_parent_path()) {
      fs::create_directories(fs::path(record_path).parent_path());
    }
    record.open(record_path, std::ios::binary);
    if (!record) {
      std::cerr << "error: cannot write '" << record_path << "'\n";
      return kExitInfra;
    }
    record << nlohmann::ordered_json{{"kind", "session"}, {"spec", spec.id}, {"seed", g.seed}}
                  .dump()
           << "\n";
    sink = std::make_unique<StreamTraceSink>(record);
    sess.set_trace_sink(sink.get());
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "quit" || line == "exit") break;
    if (line == "obs") {
      std::cout << observation_to_text(sess.observe());
      continue;
    }
    if (line == "tick" || line.starts_with("tick ")) {
      int64_t n = 1;
      if (line.size() > 5) {
        try {
          n = std::stoll(line.substr(5));
        } catch (...) {
          std::cout << "error: tick wants a count, got '" << line.substr(5) << "'\n";
          continue;
        }
      }
      if (n < 0) {
        std::cout << "error: tick count must be non-negative\n";
        continue;
      }
      std::cout << observation_to_text(sess.step(n));
      continue;
    }
    if (line.starts_with("perturb ")) {
      std::istringstream args(line.substr(8));
      std::string target_word, name, value_word;
      args >> target_word >> name;
      std::getline(args, value_word);
      value_word = trim(value_word);
      const auto target = effect_target_from(target_word);
      if (!target || name.empty() || value_word.empty()) {
        std::cout << "error: usage is perturb <parameter|part_state|screen_field|indicator|"
                     "light|motor> <name> <value>\n";
        continue;
      }
      Perturbation p;
      p.changes.push_back({*target, name, parse_scalar(value_word)});
      try {
        std::cout << observation_to_text(sess.apply_perturbation(p));
      } catch (const InvalidEffect& e) {
        std::cout << "error: " << e.what() << "\n";
      }
      continue;
    }
    try {
      const AtomicAction action = parse_action(line);
      const ActionOutcome out = sess.execute_action(action);
      if (out.ok) {
        std::cout << "ok (" << out.effects_applied.size() << " effects)\n"
                  << observation_to_text(out.observation);
      } else {
        std::cout << "error " << to_string(out.error) << ": " << out.message << "\n";
      }
    } catch (const ActionParseError& e) {
      std::cout << "error " << to_string(e.code()) << ": " << e.what() << "\n";
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------------ solve

int cmd_solve(const GlobalOptions& g, const std::string& spec_path,
              const std::string& episode_path) {
  const Episode episode =
      episode_from_json(nlohmann::json::parse(read_file(episode_path)), episode_path);
  fs::path resolved = spec_path;
  if (resolved.empty()) {
    resolved = fs::path(g.corpus) / "specs" / (episode.appliance + ".json");
    if (!fs::is_regular_file(resolved)) {
      std::cerr << "error: pass --spec; no corpus spec for '" << episode.appliance << "'\n";
      return kExitInfra;
    }
  }
  const ApplianceSpec spec = load_spec_at(resolved);
  if (episode.appliance != spec.id) {
    std::cerr << "error: episode '" << episode.id << "' belongs to '" << episode.appliance
              << "', not '" << spec.id << "'\n";
    return kExitInfra;
  }
  std::string text;
  try {
    text = format_plan(oracle_plan(spec, episode.initial_state, episode.goal));
  } catch (const UnreachableGoal& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFindings;
  }
  std::cout << text;
  if (g.out_given) {
    const fs::path file = fs::path(g.out) / (episode.id + ".plan");
    write_file(file, text);
    std::cerr << "wrote " << file.string() << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- replay

int cmd_replay(const GlobalOptions& g, const std::string& trace_path,
               const std::string& spec_path) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read '" << trace_path << "'\n";
    return kExitInfra;
  }
  std::string header_line;
  if (!std::getline(in, header_line)) {
    std::cerr << "error: empty trace\n";
    return kExitInfra;
  }
  nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
  if (header.is_discarded() || header.value("kind", "") != "session") {
    std::cerr << "error: trace must start with a session header line\n";
    return kExitInfra;
  }
  const std::string spec_id = header.value("spec", "");
  const uint64_t seed = header.value("seed", uint64_t{0});

  fs::path resolved = spec_path;
  if (resolved.empty()) {
    resolved = fs::path(g.corpus) / "specs" / (spec_id + ".json");
    if (!fs::is_regular_file(resolved)) {
      std::cerr << "error: pass --spec; no corpus spec for '" << spec_id << "'\n";
      return kExitInfra;
    }
  }
  const ApplianceSpec spec = load_spec_at(resolved);
  if (spec.id != spec_id) {
    std::cerr << "error: trace was recorded on '" << spec_id << "', spec file is '" << spec.id
              << "'\n";
    return kExitInfra;
  }

  std::vector<std::string> logged;
  for (std::string line; std::getline(in, line);) {
    if (!trim(line).empty()) logged.push_back(line);
  }

  Session sess(spec, seed);
  TraceBuffer buffer;
  sess.set_trace_sink(&buffer);
  for (const auto& line : logged) {
    const nlohmann::json event = nlohmann::json::parse(line, nullptr, false);
    if (event.is_discarded()) {
      std::cerr << "error: unparseable trace line: " << line << "\n";
      return kExitInfra;
    }
    const std::string kind = event.value("kind", "");
    const auto& payload = event["payload"];
    try {
      if (kind == "action") {
        sess.execute_action(parse_action(payload.value("text", "")));
      } else if (kind == "tick") {
        sess.step(payload.value("n", int64_t{0}));
      } else if (kind == "perturbation") {
        Perturbation p;
        p.changes = effects_from_json(payload["changes"], trace_path);
        sess.apply_perturbation(p);
      }
      // effect / rule_fire lines are outputs to compare, not inputs
    } catch (const std::exception& e) {
      std::cerr << "error: replay aborted at seq " << event.value("seq", int64_t{-1}) << ": "
                << e.what() << "\n";
      return kExitFindings;
    }
  }

  std::vector<std::string> recomputed;
  std::istringstream replayed(buffer.text());
  for (std::string line; std::getline(replayed, line);) recomputed.push_back(line);

  const size_t n = std::min(logged.size(), recomputed.size());
  for (size_t i = 0; i < n; ++i) {
    if (logged[i] != recomputed[i]) {
      const auto event = nlohmann::json::parse(logged[i], nullptr, false);
      const int64_t seq = event.is_discarded() ? -1 : event.value("seq", int64_t{-1});
      std::cerr << "divergence at seq " << seq << "\n  logged:   " << logged[i]
                << "\n  replayed: " << recomputed[i] << "\n";
      return kExitFindings;
    }
  }
  if (logged.size() != recomputed.size()) {
    std::cerr << "divergence: trace has " << logged.size() << " events, replay produced "
              << recomputed.size() << "\n";
    return kExitFindings;
  }

  std::cout << observation_to_text(sess.observe());
  return kExitOk;
}

// ------------------------------------------------------------ bench, score

std::vector<int> parse_tasks(const std::string& arg) {
  if (arg == "all") return {1, 2, 3, 4, 5};
  return {arg[0] - '0'};
}

int run_bench(const GlobalOptions& g, const std::string& task_arg,
              const std::string& planner_address, double timeout_seconds) {
  Corpus corpus;
  try {
    corpus = load_corpus(g.corpus);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfra;
  }
  if (corpus.episodes.empty()) {
    std::cerr << "error: corpus '" << g.corpus << "' has no episodes\n";
    return kExitInfra;
  }
  for (const auto& episode : corpus.episodes) {
    if (!corpus.specs.count(episode.appliance) || !corpus.manuals.count(episode.appliance)) {
      std::cerr << "error: episode '" << episode.id << "' references appliance '"
                << episode.appliance << "' without spec or manual\n";
      return kExitInfra;
    }
  }

  std::unique_ptr<Planner> planner;
  try {
    planner = make_planner(endpoint_from_address(planner_address, timeout_seconds), g.seed);
  } catch (const PlannerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfra;
  }

  struct Item {
    int task;
    const Episode* episode;
  };
  std::vector<Item> items;
  const std::vector<int> tasks = parse_tasks(task_arg);
  for (int task : tasks) {
    for (const auto& episode : corpus.episodes) items.push_back({task, &episode});
  }

  // Recorded responses are matched by per-(episode, kind) arrival order, so
  // scoring them must run items in their recorded order.
  const bool from_predictions = planner_address.rfind("predictions:", 0) == 0;
  const int jobs = from_predictions ? 1 : g.jobs;

  std::vector<TaskReport> results(items.size());
  std::atomic<size_t> next{0};
  std::mutex failure_mu;
  std::string failure;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure.empty()) return;
      }
      const Item& item = items[i];
      TaskContext ctx;
      ctx.spec = &corpus.specs.at(item.episode->appliance);
      ctx.manual = &corpus.manuals.at(item.episode->appliance);
      ctx.episode = item.episode;
      ctx.planner = planner.get();
      try {
        results[i] = run_task(item.task, ctx);
        if (g.verbose) {
          std::scoped_lock lock(failure_mu);
          std::cerr << "task " << item.task << " " << item.episode->id << " done\n";
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (failure.empty()) {
          failure = "task " + std::to_string(item.task) + " on '" + item.episode->id +
                    "': " + e.what();
        }
        return;
      }
    }
  };
  const size_t thread_count = std::min<size_t>(static_cast<size_t>(jobs), items.size());
  std::vector<std::thread> threads;
  for (size_t t = 0; t + 1 < thread_count; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (!failure.empty()) {
    std::cerr << "error: " << failure << "\n";
    return kExitInfra;
  }

  int64_t total_requests = 0;
  int64_t total_transport = 0;
  for (const auto& r : results) {
    total_requests += static_cast<int64_t>(r.exchanges.size());
    total_transport += r.transport_failures;
  }

  nlohmann::ordered_json combined = nlohmann::ordered_json::array();
  for (int task : tasks) {
    std::vector<TaskReport> reports;
    for (size_t i = 0; i < items.size(); ++i) {
      if (items[i].task == task) reports.push_back(results[i]);
    }
    std::sort(reports.begin(), reports.end(),
              [](const TaskReport& a, const TaskReport& b) { return a.episode_id < b.episode_id; });

    const Summary summary = aggregate_reports(reports);
    const std::string table = summary_to_text(summary);
    std::cout << table << "\n";

    const fs::path task_dir = fs::path(g.out) / ("task" + std::to_string(task));
    for (const auto& report : reports) {
      write_file(task_dir / "episodes" / (report.episode_id + ".json"),
                 task_report_to_json(report).dump(2) + "\n");
    }
    write_file(task_dir / "summary.json", summary_to_json(summary).dump(2) + "\n");
    write_file(task_dir / "summary.txt", table);
    combined.push_back(summary_to_json(summary));
  }
  write_file(fs::path(g.out) / "bench_summary.json",
             nlohmann::ordered_json{{"planner", planner->name()},
                                    {"seed", g.seed},
                                    {"episodes", corpus.episodes.size()},
                                    {"tasks", combined}}
                     .dump(2) +
                 "\n");

  // Every response, keyed the way the prediction planner replays them: by
  // episode, request kind and arrival order across the whole run. Rescoring
  // them therefore needs the same task selection this run used.
  {
    std::map<std::string, int> arrival;
    std::string lines;
    for (size_t i = 0; i < items.size(); ++i) {
      const std::string& episode_id = items[i].episode->id;
      for (const auto& exchange : results[i].exchanges) {
        const std::string kind = exchange["request"].value("kind", "");
        const int index = arrival[episode_id + "\n" + kind]++;
        lines += nlohmann::ordered_json{{"key",
                                         {{"episode", episode_id},
                                          {"kind", kind},
                                          {"index", index}}},
                                        {"response", exchange["response"]}}
                     .dump() +
                 "\n";
      }
    }
    write_file(fs::path(g.out) / "responses.jsonl", lines);
  }

  // Every single request failing at the transport level means the endpoint
  // never worked; that is an infrastructure failure, not a score.
  if (total_requests > 0 && total_transport == total_requests) {
    std::cerr << "error: planner endpoint failed every request ("
              << total_transport << "/" << total_requests << ")\n";
    return kExitInfra;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Appliance state-machine simulator and manual-grounded planning benchmark"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for anything randomized")
      ->envname("APPSIM_SEED")
      ->capture_default_str();
  app.add_option("--corpus", g.corpus, "Corpus directory")
      ->envname("APPSIM_CORPUS")
      ->capture_default_str();
  auto* out_option = app.add_option("--out", g.out, "Output directory")
                         ->envname("APPSIM_OUT")
                         ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Parallel episodes for bench")
      ->envname("APPSIM_JOBS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--verbose", g.verbose, "Progress on stderr")->envname("APPSIM_VERBOSE");

  auto* validate = app.add_subcommand(
      "validate", "Check specs and episodes; exit 1 on error findings");
  std::vector<std::string> validate_paths;
  validate->add_option("paths", validate_paths,
                       "Spec/episode files or directories (default: the corpus)");
  validate->fallthrough();

  auto* manual = app.add_subcommand("manual", "Render a manual into the output directory");
  std::string manual_spec;
  manual->add_option("--spec", manual_spec, "Appliance spec file")->required();
  manual->fallthrough();

  auto* schematic =
      app.add_subcommand("schematic", "Render the panel schematic SVG to stdout or --out");
  std::string schematic_spec;
  schematic->add_option("--spec", schematic_spec, "Appliance spec file")->required();
  schematic->fallthrough();

  auto* simulate = app.add_subcommand(
      "simulate", "Interactive session: action lines, tick N, perturb, obs, quit");
  std::string simulate_spec;
  std::string simulate_record;
  simulate->add_option("--spec", simulate_spec, "Appliance spec file")->required();
  simulate->add_option("--record", simulate_record, "Write the trace log to this file");
  simulate->fallthrough();

  auto* solve = app.add_subcommand("solve", "Print the shortest plan for an episode's goal");
  std::string solve_spec;
  std::string solve_episode;
  solve->add_option("--spec", solve_spec, "Spec file (default: resolved from the corpus)");
  solve->add_option("--episode", solve_episode, "Episode file")->required();
  solve->fallthrough();

  auto* replay = app.add_subcommand(
      "replay", "Re-execute a trace and verify every logged event; exit 1 on divergence");
  std::string replay_trace;
  std::string replay_spec;
  replay->add_option("trace", replay_trace, "Trace log from simulate --record")->required();
  replay->add_option("--spec", replay_spec, "Spec file (default: resolved from the corpus)");
  replay->fallthrough();

  auto* bench = app.add_subcommand("bench", "Run benchmark tasks over the corpus");
  std::string bench_task = "all";
  std::string bench_planner = "builtin:oracle";
  std::string bench_predictions;
  double bench_timeout = 30.0;
  bench->add_option("task", bench_task, "1..5 or all")
      ->check(CLI::IsMember({"1", "2", "3", "4", "5", "all"}));
  auto* planner_option =
      bench->add_option("--planner", bench_planner,
                        "builtin:oracle | builtin:random | builtin:corrupt:<k> | "
                        "predictions:<dir> | cmd:<command> | http://host:port")
          ->capture_default_str();
  bench->add_option("--predictions", bench_predictions, "Score recorded responses from this dir")
      ->excludes(planner_option);
  bench->add_option("--timeout", bench_timeout, "Planner timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->fallthrough();

  auto* score = app.add_subcommand(
      "score", "Offline scoring of recorded planner responses (no planner is spawned)");
  std::string score_task = "all";
  std::string score_predictions;
  score->add_option("task", score_task, "1..5 or all")
      ->check(CLI::IsMember({"1", "2", "3", "4", "5", "all"}));
  score->add_option("--predictions", score_predictions, "Directory of .jsonl response files")
      ->required();
  score->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInfra;
  }
  g.out_given = out_option->count() > 0;

  try {
    if (validate->parsed()) return cmd_validate(g, validate_paths);
    if (manual->parsed()) return cmd_manual(g, manual_spec);
    if (schematic->parsed()) return cmd_schematic(g, schematic_spec);
    if (simulate->parsed()) return cmd_simulate(g, simulate_spec, simulate_record);
    if (solve->parsed()) return cmd_solve(g, solve_spec, solve_episode);
    if (replay->parsed()) return cmd_replay(g, replay_trace, replay_spec);
    if (bench->parsed()) {
      const std::string address = bench_predictions.empty()
                                      ? bench_planner
                                      : "predictions:" + bench_predictions;
      return run_bench(g, bench_task, address, bench_timeout);
    }
    if (score->parsed()) {
      return run_bench(g, score_task, "predictions:" + score_predictions, 30.0);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfra;
  }
  return kExitInfra;
}
