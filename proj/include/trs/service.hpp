#pragma once

// HTTP+JSON front end for completion sessions and one-shot analyses.
//
//   POST /api/session                {problem, order}        -> 201 {id, state}
//   GET  /api/session/{id}                                   -> 200 state
//   POST /api/session/{id}/command   {kind, args, direction, full}
//   GET  /api/session/{id}/export                            -> completed TRS text
//   POST /api/analyze                {problem, property, ...}

#include <algorithm>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "httplib.h"
#include "trs/json_io.hpp"

namespace trs {

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string persist_dir;  // empty: in memory only
  std::string cors_origin;  // empty: no CORS headers
  std::size_t max_sessions = 1000;
  std::size_t workers = 4;          // concurrent /api/analyze jobs
  double analyze_timeout = 10.0;    // seconds per analysis
};

struct Reply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

inline int http_status(const std::string& code) {
  if (code == "unknown-session") return 404;
  if (code == "not-applicable" || code == "not-orientable" || code == "variable-violation" ||
      code == "empty-history" || code == "unknown-equation" || code == "unknown-rule" || code == "fuel-exhausted")
    return 409;
  return 400;
}

inline std::string random_session_id() {
  static std::mutex m;
  static std::random_device rd;
  std::lock_guard lock(m);
  std::ostringstream out;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t w = rd();
    out << std::hex;
    out.width(8);
    out.fill('0');
    out << w;
  }
  return out.str();
}

class Service {
 public:
  using Json = json::Json;

  explicit Service(ServiceConfig cfg = {}) : cfg_(std::move(cfg)) {
    if (!cfg_.persist_dir.empty()) load();
  }

  /// Routes one request; the HTTP server is a thin wrapper around this.
  Reply handle(const std::string& method, const std::string& path, const std::string& body) {
    try {
      auto parts = split(path);
      if (parts.size() >= 2 && parts[0] == "api") {
        if (parts[1] == "session") {
          if (parts.size() == 2 && method == "POST") return create(parse_body(body));
          if (parts.size() == 3 && method == "GET") return get(parts[2]);
          if (parts.size() == 4 && parts[3] == "command" && method == "POST") return command(parts[2], parse_body(body));
          if (parts.size() == 4 && parts[3] == "export" && method == "GET") return export_trs(parts[2]);
        }
        if (parts.size() == 2 && parts[1] == "analyze" && method == "POST") return analyze(parse_body(body));
      }
      return fail(404, json::error("not-found", "no route for " + method + " " + path));
    } catch (const Error& e) {
      return fail(http_status(e.code()), json::error(e));
    } catch (const nlohmann::json::exception& e) {
      return fail(400, json::error("bad-request", e.what()));
    }
  }

  std::size_t session_count() const {
    std::lock_guard lock(store_mutex_);
    return sessions_.size();
  }

  /// Writes every session to persist_dir as <id>.json.
  void save() const {
    if (cfg_.persist_dir.empty()) return;
    std::filesystem::create_directories(cfg_.persist_dir);
    std::lock_guard lock(store_mutex_);
    for (const auto& [id, s] : sessions_) {
      std::lock_guard slock(s->mutex);
      Json j = json::session_export(s->state, s->signature);
      j["created"] = s->created;
      std::ofstream(std::filesystem::path(cfg_.persist_dir) / (id + ".json")) << j.dump(2) << "\n";
    }
  }

  void load() {
    if (!std::filesystem::is_directory(cfg_.persist_dir)) return;
    for (const auto& entry : std::filesystem::directory_iterator(cfg_.persist_dir)) {
      if (entry.path().extension() != ".json") continue;
      std::ifstream in(entry.path());
      Json j = Json::parse(in, nullptr, false);
      if (j.is_discarded()) continue;
      auto imported = json::session_import(j);
      auto s = std::make_shared<Session>();
      s->state = std::move(imported.state);
      s->signature = std::move(imported.signature);
      s->created = j.value("created", 0L);
      std::lock_guard lock(store_mutex_);
      sessions_[entry.path().stem().string()] = s;
      clock_ = std::max(clock_, s->created + 1);
    }
  }

  /// Blocks serving HTTP until stop(); saves sessions on the way out.
  bool listen() {
    install_routes();
    bool ok = server_.listen(cfg_.bind, cfg_.port);
    save();
    return ok;
  }

  /// Binds an ephemeral port and returns it; call listen_after_bind() next.
  int bind_to_any_port() {
    install_routes();
    return server_.bind_to_any_port(cfg_.bind);
  }

  bool listen_after_bind() {
    bool ok = server_.listen_after_bind();
    save();
    return ok;
  }

  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  struct Session {
    std::mutex mutex;
    CompletionState state;
    std::vector<Symbol> signature;
    long created = 0;
  };

  ServiceConfig cfg_;
  mutable std::mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  long clock_ = 0;
  std::mutex pool_mutex_;
  std::condition_variable pool_cv_;
  std::size_t running_ = 0;
  httplib::Server server_;
  bool routes_ = false;

  static std::vector<std::string> split(const std::string& path) {
    std::vector<std::string> out;
    std::stringstream in(path);
    std::string part;
    while (std::getline(in, part, '/'))
      if (!part.empty()) out.push_back(part);
    return out;
  }

  static Json parse_body(const std::string& body) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error("bad-request", "request body must be a JSON object");
    return j;
  }

  static Reply ok(const Json& j, int status = 200) { return Reply{status, j.dump(), "application/json"}; }
  static Reply fail(int status, const Json& j) { return Reply{status, j.dump(), "application/json"}; }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::lock_guard lock(store_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error("unknown-session", "no session " + id, id);
    return it->second;
  }

  static ProblemFile problem_of(const Json& req) {
    if (!req.contains("problem") || !req.at("problem").is_string())
      throw Error("bad-request", "field 'problem' (trs-format text) is required");
    return parse_problem(req.at("problem").get<std::string>());
  }

  Reply create(const Json& req) {
    auto p = problem_of(req);
    auto eqs = p.equations;
    if (eqs.empty())
      for (const auto& r : p.rules) eqs.push_back(Equation{r.lhs, r.rhs});
    auto sig = p.signature();
    Json order = req.value("order", Json(nullptr));
    if (order.is_string()) order = Json{{"kind", order}};
    auto s = std::make_shared<Session>();
    s->state = new_session(eqs, json::order_from(order, sig));
    s->signature = sig;
    std::string id = random_session_id();
    {
      std::lock_guard lock(store_mutex_);
      s->created = clock_++;
      if (sessions_.size() >= cfg_.max_sessions) {
        auto oldest = std::min_element(sessions_.begin(), sessions_.end(),
                                       [](const auto& a, const auto& b) { return a.second->created < b.second->created; });
        sessions_.erase(oldest);
      }
      sessions_[id] = s;
    }
    return ok(Json{{"id", id}, {"state", json::session_view(s->state)}}, 201);
  }

  Reply get(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    return ok(json::session_view(s->state));
  }

  Reply command(const std::string& id, const Json& req) {
    auto s = find(id);
    std::string kind = req.value("kind", "");
    std::vector<int> args;
    if (req.contains("args")) args = req.at("args").get<std::vector<int>>();
    std::string direction = req.value("direction", "LR");
    bool full = req.value("full", false);
    std::lock_guard lock(s->mutex);
    s->state = apply_command(s->state, kind, args, direction, full);
    return ok(json::session_view(s->state));
  }

  Reply export_trs(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    std::vector<Rule> rules;
    for (const auto& r : s->state.rules()) rules.push_back(r.rule);
    std::vector<Equation> eqs;
    for (const auto& e : s->state.equations()) eqs.push_back(e.eq);
    return Reply{200, print_problem(make_problem(rules, eqs)), "text/plain"};
  }

  class Slot {
   public:
    explicit Slot(Service& s) : s_(s) {
      std::unique_lock lock(s_.pool_mutex_);
      s_.pool_cv_.wait(lock, [&] { return s_.running_ < std::max<std::size_t>(1, s_.cfg_.workers); });
      ++s_.running_;
    }
    ~Slot() {
      {
        std::lock_guard lock(s_.pool_mutex_);
        --s_.running_;
      }
      s_.pool_cv_.notify_one();
    }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    Service& s_;
  };

  Reply analyze(const Json& req) {
    std::string property = req.value("property", "");
    double timeout = req.value("timeout", cfg_.analyze_timeout);
    Slot slot(*this);
    Deadline deadline = Deadline::after_seconds(timeout);
    if (property == "validity") return validity(req);
    auto p = problem_of(req);
    Trs R = p.trs();
    if (property == "cps") return ok(json::critical_pairs(critical_pairs(R), R));
    if (property == "termination") {
      TerminationConfig cfg;
      cfg.method = req.value("method", "auto");
      cfg.poly_template = req.value("template", "");
      cfg.precedence = req.value("prec", "");
      cfg.deadline = deadline;
      try {
        return ok(json::termination(prove_termination(R, cfg)));
      } catch (const BudgetExceeded& e) {
        TerminationReport rep;
        rep.notes.push_back(e.what());
        return ok(json::termination(rep));
      }
    }
    if (property == "confluence") {
      ConfluenceConfig cfg;
      cfg.deadline = deadline;
      return ok(json::confluence(analyze_confluence(R, cfg)));
    }
    throw Error("bad-request", "unknown property '" + property + "' (termination, confluence, cps or validity)");
  }

  /// {session | problem, left, right}: normal forms under the session's
  /// rules or the problem's RULES.
  Reply validity(const Json& req) {
    Trs R;
    std::set<std::string> vars;
    if (req.contains("session")) {
      auto s = find(req.at("session").get<std::string>());
      std::lock_guard lock(s->mutex);
      if (s->state.status() != SessionStatus::Success)
        throw Error("not-applicable", "validity needs a completed session (status is " + to_string(s->state.status()) + ")");
      R = s->state.trs();
    } else {
      auto p = problem_of(req);
      R = p.trs();
      vars.insert(p.variables.begin(), p.variables.end());
    }
    if (!req.contains("left") || !req.contains("right")) throw Error("bad-request", "fields 'left' and 'right' are required");
    Term s = parse_term(req.at("left").get<std::string>(), vars);
    Term t = parse_term(req.at("right").get<std::string>(), vars);
    auto v = decide_validity(R, s, t);
    return ok(Json{{"valid", v.valid}, {"leftNormalForm", to_string(v.left_nf)}, {"rightNormalForm", to_string(v.right_nf)}});
  }

  void install_routes() {
    if (routes_) return;
    routes_ = true;
    auto wrap = [this](const char* method) {
      return [this, method](const httplib::Request& req, httplib::Response& res) {
        Reply r = handle(method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
        if (!cfg_.cors_origin.empty()) res.set_header("Access-Control-Allow-Origin", cfg_.cors_origin);
      };
    };
    server_.Get(R"(/api/.*)", wrap("GET"));
    server_.Post(R"(/api/.*)", wrap("POST"));
    server_.Options(R"(/api/.*)", [this](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      if (!cfg_.cors_origin.empty()) {
        res.set_header("Access-Control-Allow-Origin", cfg_.cors_origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
      }
    });
  }
};

}  // namespace trs
