#include "appsim/planner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <set>

#include "appsim/errors.hpp"
#include "appsim/oracle.hpp"
#include "appsim/util.hpp"
#include "httplib.h"

namespace appsim {

const char* to_string(PlannerResponse::Status s) {
  switch (s) {
    case PlannerResponse::Status::Ok: return "ok";
    case PlannerResponse::Status::Timeout: return "timeout";
    case PlannerResponse::Status::Malformed: return "malformed";
    case PlannerResponse::Status::Transport: return "transport";
  }
  return "";
}

nlohmann::ordered_json planner_request_to_json(const PlannerRequest& r) {
  nlohmann::ordered_json pages = nlohmann::ordered_json::array();
  for (const auto& page : r.manual_pages) {
    pages.push_back({{"index", page.index}, {"category", page.category}, {"text", page.text}});
  }
  return nlohmann::ordered_json{{"protocol_version", 1},
                                {"kind", r.kind},
                                {"instruction", r.instruction},
                                {"manual_pages", pages},
                                {"observation", r.observation},
                                {"history", r.history},
                                {"initial_plan", r.initial_plan},
                                {"query", r.query},
                                {"schematic", r.schematic},
                                {"panel", {{"width", r.panel_width}, {"height", r.panel_height}}}};
}

PlannerResponse planner_response_from_json(const nlohmann::json& j, const std::string& kind) {
  PlannerResponse r;
  auto malformed = [&r](const std::string& why) {
    r.status = PlannerResponse::Status::Malformed;
    r.error = why;
    return r;
  };
  if (!j.is_object()) return malformed("response is not an object");

  if (kind == "retrieve_pages") {
    auto it = j.find("pages");
    if (it == j.end() || !it->is_array()) return malformed("missing 'pages' array");
    for (const auto& p : *it) {
      if (!p.is_number_integer()) return malformed("'pages' entries must be integers");
      r.pages.push_back(p.get<int>());
    }
  } else if (kind == "plan") {
    auto it = j.find("plan_text");
    if (it == j.end() || !it->is_string()) return malformed("missing 'plan_text' string");
    r.plan_text = it->get<std::string>();
  } else if (kind == "ground") {
    auto it = j.find("bbox");
    if (it == j.end() || !it->is_array() || it->size() != 4) {
      return malformed("missing 'bbox' [x1,y1,x2,y2]");
    }
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!(*it)[i].is_number()) return malformed("'bbox' entries must be numbers");
      v[i] = (*it)[i].get<double>();
    }
    r.bbox = {v[0], v[1], v[2], v[3]};
    if (r.bbox.x2 < r.bbox.x1 || r.bbox.y2 < r.bbox.y1) return malformed("reversed box corners");
  } else if (kind == "next_action") {
    auto it = j.find("action_text");
    if (it == j.end() || !it->is_string()) return malformed("missing 'action_text' string");
    r.action_text = it->get<std::string>();
  } else {
    return malformed("unknown request kind '" + kind + "'");
  }
  return r;
}

nlohmann::ordered_json planner_response_to_json(const PlannerResponse& r, const std::string& kind) {
  if (r.status != PlannerResponse::Status::Ok) {
    return nlohmann::ordered_json{{"status", to_string(r.status)}, {"error", r.error}};
  }
  if (kind == "retrieve_pages") return nlohmann::ordered_json{{"pages", r.pages}};
  if (kind == "plan") return nlohmann::ordered_json{{"plan_text", r.plan_text}};
  if (kind == "ground") {
    return nlohmann::ordered_json{{"bbox", {r.bbox.x1, r.bbox.y1, r.bbox.x2, r.bbox.y2}}};
  }
  return nlohmann::ordered_json{{"action_text", r.action_text}};
}

namespace {

PlannerResponse context_missing() {
  PlannerResponse r;
  r.status = PlannerResponse::Status::Transport;
  r.error = "builtin planner invoked without oracle context";
  return r;
}

class OraclePlanner final : public Planner {
 public:
  std::string name() const override { return "builtin:oracle"; }

  PlannerResponse respond(const PlannerRequest& req) override {
    const OracleContext& ctx = req.oracle;
    if (!ctx.spec || !ctx.episode) return context_missing();
    PlannerResponse r;
    if (req.kind == "retrieve_pages") {
      std::set<int> pages;
      if (req.query.empty()) {
        for (const auto& [category, indices] : ctx.episode->relevant_pages) {
          pages.insert(indices.begin(), indices.end());
        }
      } else if (ctx.manual) {
        auto indices = ctx.manual->pages_of(req.query);
        pages.insert(indices.begin(), indices.end());
      }
      r.pages.assign(pages.begin(), pages.end());
    } else if (req.kind == "plan") {
      r.plan_text = format_plan(
          oracle_plan(*ctx.spec, ctx.episode->initial_state, ctx.episode->goal, ctx.limits));
    } else if (req.kind == "ground") {
      if (const PartSpec* part = ctx.spec->part(req.query)) {
        r.bbox = part->panel_rect;
      } else {
        r.bbox = {0.0, 0.0, 0.0, 0.0};
      }
    } else if (req.kind == "next_action") {
      const SessionState* state = ctx.state ? ctx.state : &ctx.episode->initial_state;
      Plan recovery = oracle_plan(*ctx.spec, *state, ctx.episode->goal, ctx.limits);
      if (!recovery.steps.empty()) r.action_text = format_action(recovery.steps[0]);
    } else {
      r.status = PlannerResponse::Status::Malformed;
      r.error = "unknown request kind '" + req.kind + "'";
    }
    return r;
  }
};

class RandomPlanner final : public Planner {
 public:
  explicit RandomPlanner(uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "builtin:random"; }

  PlannerResponse respond(const PlannerRequest& req) override {
    const OracleContext& ctx = req.oracle;
    if (!ctx.spec || !ctx.episode) return context_missing();

    // Seeded per request content, so results do not depend on request order
    // or thread interleaving.
    std::string key = req.kind + "|" + req.query + "|" + ctx.episode->id + "|" + req.observation;
    for (const auto& h : req.history) key += "|" + h;
    std::mt19937_64 rng(fnv1a64(key) ^ (seed_ * 0x9E3779B97F4A7C15ULL));

    PlannerResponse r;
    if (req.kind == "retrieve_pages") {
      const int count = ctx.manual ? static_cast<int>(ctx.manual->pages.size())
                                   : static_cast<int>(req.manual_pages.size());
      for (int p = 1; p <= count; ++p) {
        if (rng() % 2 == 0) r.pages.push_back(p);
      }
    } else if (req.kind == "plan") {
      StateView view(*ctx.spec, ctx.episode->initial_state);
      const auto candidates = candidate_actions(view);
      Plan plan;
      if (!candidates.empty()) {
        const size_t len = 1 + rng() % 6;
        for (size_t i = 0; i < len; ++i) {
          plan.steps.push_back(candidates[rng() % candidates.size()]);
        }
      }
      r.plan_text = format_plan(plan);
    } else if (req.kind == "ground") {
      const int64_t w = req.panel_width > 0 ? req.panel_width : ctx.spec->panel.width;
      const int64_t h = req.panel_height > 0 ? req.panel_height : ctx.spec->panel.height;
      const int64_t x1 = static_cast<int64_t>(rng() % static_cast<uint64_t>(w));
      const int64_t y1 = static_cast<int64_t>(rng() % static_cast<uint64_t>(h));
      const int64_t x2 = x1 + 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(w - x1));
      const int64_t y2 = y1 + 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(h - y1));
      r.bbox = {static_cast<double>(x1), static_cast<double>(y1), static_cast<double>(x2),
                static_cast<double>(y2)};
    } else if (req.kind == "next_action") {
      const SessionState* state = ctx.state ? ctx.state : &ctx.episode->initial_state;
      StateView view(*ctx.spec, *state);
      const auto candidates = candidate_actions(view);
      if (!candidates.empty()) {
        r.action_text = format_action(candidates[rng() % candidates.size()]);
      }
    } else {
      r.status = PlannerResponse::Status::Malformed;
      r.error = "unknown request kind '" + req.kind + "'";
    }
    return r;
  }

 private:
  uint64_t seed_;
};

// Oracle wrapper that replaces plan step k (1-based) with an action targeting
// a part no spec declares, so execution fails exactly there.
class CorruptPlanner final : public Planner {
 public:
  explicit CorruptPlanner(int k) : k_(k) {}
  std::string name() const override { return "builtin:corrupt:" + std::to_string(k_); }

  PlannerResponse respond(const PlannerRequest& req) override {
    PlannerResponse r = inner_.respond(req);
    if (req.kind != "plan" || r.status != PlannerResponse::Status::Ok) return r;
    Plan plan = parse_plan(r.plan_text);
    if (k_ >= 1 && k_ <= static_cast<int>(plan.steps.size())) {
      AtomicAction bogus;
      bogus.kind = ActionKind::Touch;
      bogus.part = "__corrupt__";
      bogus.times = 1;
      plan.steps[static_cast<size_t>(k_ - 1)] = bogus;
    }
    r.plan_text = format_plan(plan);
    return r;
  }

 private:
  int k_;
  OraclePlanner inner_;
};

// Replays pre-recorded responses: one JSON object per line, keyed by episode,
// request kind and per-kind sequence number.
class PredictionPlanner final : public Planner {
 public:
  explicit PredictionPlanner(const std::string& dir) : dir_(dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw PlannerError("prediction directory '" + dir + "' missing");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file);
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
          throw PlannerError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("key") || !j.contains("response")) {
          throw PlannerError(file.string() + ":" + std::to_string(line_no) +
                             ": expected {key, response}");
        }
        const auto& key = j["key"];
        entries_[map_key(key.value("episode", ""), key.value("kind", ""),
                         key.value("index", 0))] = j["response"];
      }
    }
  }

  std::string name() const override { return "predictions:" + dir_; }

  PlannerResponse respond(const PlannerRequest& req) override {
    if (!req.oracle.episode) return context_missing();
    std::lock_guard<std::mutex> lock(mu_);
    const int index = counters_[req.oracle.episode->id + "\n" + req.kind]++;
    auto it = entries_.find(map_key(req.oracle.episode->id, req.kind, index));
    if (it == entries_.end()) {
      PlannerResponse r;
      r.status = PlannerResponse::Status::Malformed;
      r.error = "no prediction for " + req.oracle.episode->id + "/" + req.kind + "[" +
                std::to_string(index) + "]";
      return r;
    }
    return planner_response_from_json(it->second, req.kind);
  }

 private:
  static std::string map_key(const std::string& episode, const std::string& kind, int index) {
    return episode + "\n" + kind + "\n" + std::to_string(index);
  }

  std::string dir_;
  std::map<std::string, nlohmann::json> entries_;
  std::map<std::string, int> counters_;
  std::mutex mu_;
};

// Newline-delimited JSON over the child's stdio. One request in flight at a
// time; a timeout kills the child and the next request respawns it, so stale
// output can never answer a later request.
class SubprocessPlanner final : public Planner {
 public:
  SubprocessPlanner(std::string command, double timeout_seconds)
      : command_(std::move(command)), timeout_seconds_(timeout_seconds) {
    // A write to a dead child must come back as a Transport failure, not kill
    // the whole process.
    signal(SIGPIPE, SIG_IGN);
    spawn();
  }

  ~SubprocessPlanner() override { shutdown(); }

  std::string name() const override { return "cmd:" + command_; }

  PlannerResponse respond(const PlannerRequest& req) override {
    std::lock_guard<std::mutex> lock(mu_);
    if (pid_ < 0) spawn();
    const std::string line = planner_request_to_json(req).dump() + "\n";
    if (!write_all(line)) {
      shutdown();
      PlannerResponse r;
      r.status = PlannerResponse::Status::Transport;
      r.error = "planner process not accepting requests";
      return r;
    }
    return read_response(req.kind);
  }

 private:
  void spawn() {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) throw PlannerError("pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw PlannerError("fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    buffer_.clear();
  }

  void shutdown() {
    if (pid_ > 0) {
      close(to_child_);
      close(from_child_);
      kill(pid_, SIGKILL);
      int status = 0;
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  bool write_all(const std::string& data) {
    size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
      if (n <= 0) return false;
      off += static_cast<size_t>(n);
    }
    return true;
  }

  PlannerResponse read_response(const std::string& kind) {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double>(timeout_seconds_));
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        const std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
          PlannerResponse r;
          r.status = PlannerResponse::Status::Malformed;
          r.error = std::string("response is not JSON: ") + e.what();
          return r;
        }
        return planner_response_from_json(j, kind);
      }

      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
      if (remaining.count() <= 0) {
        shutdown();
        PlannerResponse r;
        r.status = PlannerResponse::Status::Timeout;
        r.error = "no response within " + std::to_string(timeout_seconds_) + "s";
        return r;
      }
      pollfd pfd{from_child_, POLLIN, 0};
      const int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (ready < 0) {
        shutdown();
        PlannerResponse r;
        r.status = PlannerResponse::Status::Transport;
        r.error = std::string("poll failed: ") + std::strerror(errno);
        return r;
      }
      if (ready == 0) continue;
      char chunk[4096];
      const ssize_t n = read(from_child_, chunk, sizeof(chunk));
      if (n <= 0) {
        shutdown();
        PlannerResponse r;
        r.status = PlannerResponse::Status::Transport;
        r.error = "planner process exited";
        return r;
      }
      buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

  std::string command_;
  double timeout_seconds_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::mutex mu_;
};

class HttpPlanner final : public Planner {
 public:
  HttpPlanner(const std::string& base_url, double timeout_seconds)
      : base_url_(base_url), client_(base_url) {
    const auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::duration<double>(timeout_seconds));
    client_.set_connection_timeout(timeout);
    client_.set_read_timeout(timeout);
    client_.set_write_timeout(timeout);
  }

  std::string name() const override { return base_url_; }

  PlannerResponse respond(const PlannerRequest& req) override {
    std::lock_guard<std::mutex> lock(mu_);
    auto res = client_.Post("/v1/respond", planner_request_to_json(req).dump(),
                            "application/json");
    PlannerResponse r;
    if (!res) {
      const auto err = res.error();
      r.status = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read
                     ? PlannerResponse::Status::Timeout
                     : PlannerResponse::Status::Transport;
      r.error = httplib::to_string(err);
      return r;
    }
    if (res->status != 200) {
      r.status = PlannerResponse::Status::Transport;
      r.error = "http status " + std::to_string(res->status);
      return r;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      r.status = PlannerResponse::Status::Malformed;
      r.error = std::string("response is not JSON: ") + e.what();
      return r;
    }
    return planner_response_from_json(j, req.kind);
  }

 private:
  std::string base_url_;
  httplib::Client client_;
  std::mutex mu_;
};

}  // namespace

PlannerEndpoint endpoint_from_address(const std::string& address, double timeout_seconds) {
  PlannerEndpoint ep;
  ep.address = address;
  ep.timeout_seconds = timeout_seconds;
  if (address.rfind("builtin:", 0) == 0 || address.rfind("predictions:", 0) == 0) {
    ep.transport = PlannerEndpoint::Transport::Builtin;
  } else if (address.rfind("http://", 0) == 0 || address.rfind("https://", 0) == 0) {
    ep.transport = PlannerEndpoint::Transport::Http;
  } else if (address.rfind("cmd:", 0) == 0) {
    ep.transport = PlannerEndpoint::Transport::Subprocess;
  } else {
    throw PlannerError("unknown planner address '" + address +
                       "' (expected builtin:, predictions:, cmd:, or http://)");
  }
  return ep;
}

std::unique_ptr<Planner> make_planner(const PlannerEndpoint& endpoint, uint64_t seed) {
  if (endpoint.timeout_seconds <= 0.0) throw PlannerError("timeout must be positive");
  const std::string& addr = endpoint.address;
  switch (endpoint.transport) {
    case PlannerEndpoint::Transport::Builtin:
      if (addr == "builtin:oracle") return std::make_unique<OraclePlanner>();
      if (addr == "builtin:random") return std::make_unique<RandomPlanner>(seed);
      if (addr.rfind("builtin:corrupt:", 0) == 0) {
        int k = 0;
        try {
          k = std::stoi(addr.substr(std::string("builtin:corrupt:").size()));
        } catch (const std::exception&) {
          throw PlannerError("bad corrupt step in '" + addr + "'");
        }
        if (k < 1) throw PlannerError("corrupt step must be >= 1");
        return std::make_unique<CorruptPlanner>(k);
      }
      if (addr.rfind("predictions:", 0) == 0) {
        return std::make_unique<PredictionPlanner>(addr.substr(std::string("predictions:").size()));
      }
      throw PlannerError("unknown builtin planner '" + addr + "'");
    case PlannerEndpoint::Transport::Subprocess:
      return std::make_unique<SubprocessPlanner>(addr.substr(std::string("cmd:").size()),
                                                 endpoint.timeout_seconds);
    case PlannerEndpoint::Transport::Http:
      return std::make_unique<HttpPlanner>(addr, endpoint.timeout_seconds);
  }
  throw PlannerError("unhandled transport");
}

}  // namespace appsim
