// trs: command-line front end.
//
// Exit status: 0 definite answer, 1 inconclusive (MAYBE, stuck, out of fuel,
// failed completion), 2 usage or input error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "trs/service.hpp"

using namespace trs;
using json::Json;

namespace {

struct Common {
  std::string file;
  bool json = false;
  std::size_t fuel = 0;
  std::size_t depth = 0;
  double timeout = 0;

  Deadline deadline() const { return timeout > 0 ? Deadline::after_seconds(timeout) : Deadline{}; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("input-error", "cannot read " + path, path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::string step_text(const StepRecord& s) { return s.rule + " @ " + s.position.to_string(); }

int cmd_parse(const Common& c) {
  auto p = parse_problem(read_file(c.file));
  if (c.json)
    emit(json::problem(p));
  else
    std::cout << print_problem(p);
  return 0;
}

struct RewriteOpts {
  std::string term;
  std::string strategy = "li";
  std::string annotation;
  bool incremental = false;
  bool trace = false;
};

int cmd_rewrite(const Common& c, const RewriteOpts& o) {
  auto p = parse_problem(read_file(c.file));
  Trs R = p.trs();
  Term t = parse_term_for(o.term, p);
  std::size_t fuel = c.fuel ? c.fuel : 10000;
  std::string label;
  auto run = [&] {
    if (!o.annotation.empty()) {
      auto A = parse_annotation(read_file(o.annotation), R);
      label = o.incremental ? "incremental" : "annotated";
      return o.incremental ? normalize_incremental(t, R, A, fuel, c.deadline())
                           : annotated_normalize(t, R, A, fuel, c.deadline());
    }
    if (o.incremental) throw Error("usage", "--incremental needs --annotation");
    Strategy s = parse_strategy(o.strategy);
    label = to_string(s);
    return normalize(t, R, s, fuel, c.deadline());
  };
  NormalizeResult r = run();
  if (c.json) {
    Json j = json::normalize_result(t, label, r);
    if (!o.trace) j.erase("trace");
    emit(j);
  } else {
    if (o.trace) {
      std::cout << to_string(t) << "\n";
      for (std::size_t i = 0; i < r.steps.size(); ++i)
        std::cout << "  -> " << to_string(r.trace[i]) << "   [" << step_text(r.steps[i]) << "]\n";
    }
    std::cout << to_string(r.outcome) << ": " << to_string(r.term) << " (" << r.steps.size() << " steps)\n";
  }
  return r.normal_form() ? 0 : 1;
}

int cmd_cps(const Common& c) {
  auto p = parse_problem(read_file(c.file));
  Trs R = p.trs();
  auto cps = critical_pairs(R);
  if (c.json) {
    emit(json::critical_pairs(cps, R));
    return 0;
  }
  std::cout << cps.size() << " critical pair" << (cps.size() == 1 ? "" : "s") << "\n";
  for (const auto& cp : cps)
    std::cout << "  " << R.label(cp.source.outer_index) << "/" << R.label(cp.source.inner_index) << " @ "
              << cp.source.position.to_string() << ": " << to_string(cp.left) << " <- " << to_string(cp.peak_top)
              << " -> " << to_string(cp.right) << "\n";
  return 0;
}

struct TerminationOpts {
  std::string method = "auto";
  std::string tmpl;
  std::string prec;
  std::string weights;
  long max_coeff = 5;
  std::size_t dim = 2;
  long bound = 2;
};

TerminationConfig termination_config(const Common& c, const TerminationOpts& o) {
  TerminationConfig cfg;
  cfg.method = o.method;
  cfg.poly_template = o.tmpl;
  cfg.precedence = o.prec;
  cfg.weights = o.weights;
  cfg.max_coeff = o.max_coeff;
  cfg.dim = o.dim;
  cfg.matrix_bound = o.bound;
  if (c.depth) cfg.loop_depth = c.depth;
  cfg.deadline = c.deadline();
  return cfg;
}

void print_termination(const TerminationReport& r) {
  std::cout << to_string(r.verdict);
  if (!r.method.empty()) std::cout << " (" << r.method << ")";
  std::cout << "\n";
  std::string cert = describe(r.certificate);
  if (!cert.empty()) std::cout << cert << (cert.back() == '\n' ? "" : "\n");
  for (const auto& e : r.evidence) std::cout << "  " << e.rule << ": " << e.evidence << "\n";
  if (r.loop) {
    std::cout << "loop from " << to_string(r.loop->start) << ":";
    for (const auto& s : r.loop->trace) std::cout << " " << step_text(s) << ";";
    std::cout << " start reappears at " << r.loop->context_position.to_string() << " under "
              << to_string(r.loop->sigma) << "\n";
  }
  if (r.verdict == Verdict::Maybe)
    for (const auto& n : r.notes) std::cout << "  " << n << "\n";
}

int cmd_termination(const Common& c, const TerminationOpts& o) {
  auto p = parse_problem(read_file(c.file));
  TerminationReport r;
  try {
    r = prove_termination(p.trs(), termination_config(c, o));
  } catch (const BudgetExceeded& e) {
    r.notes.push_back(e.what());
  }
  if (c.json)
    emit(json::termination(r));
  else
    print_termination(r);
  return r.verdict == Verdict::Maybe ? 1 : 0;
}

int cmd_confluence(const Common& c, const TerminationOpts& o) {
  auto p = parse_problem(read_file(c.file));
  ConfluenceConfig cfg;
  cfg.termination = termination_config(c, o);
  if (c.fuel) cfg.fuel = c.fuel;
  if (c.depth) cfg.witness_depth = c.depth;
  cfg.deadline = c.deadline();
  auto r = analyze_confluence(p.trs(), cfg);
  if (c.json) {
    emit(json::confluence(r));
  } else {
    std::cout << to_string(r.verdict);
    if (!r.reason.empty()) std::cout << " (" << r.reason << ")";
    std::cout << "\n";
    for (const auto& j : r.critical_pairs) {
      std::cout << "  " << to_string(j.cp.left) << " = " << to_string(j.cp.right);
      if (j.common)
        std::cout << "  joins at " << to_string(*j.common) << "\n";
      else
        std::cout << "  not joined\n";
    }
    if (r.witness) {
      const auto& w = *r.witness;
      std::cout << "peak " << to_string(w.top) << "\n  ->* " << to_string(w.left) << "\n  ->* " << to_string(w.right)
                << "\n  distinct normal forms\n";
    }
    if (r.verdict == Verdict::Maybe)
      for (const auto& n : r.notes) std::cout << "  " << n << "\n";
  }
  return r.verdict == Verdict::Maybe ? 1 : 0;
}

struct CompleteOpts {
  std::string order = "kbo";
  std::string prec;
  std::string weights;
  bool automatic = false;
};

Json order_json(const CompleteOpts& o) {
  Json params = Json::object();
  if (!o.prec.empty()) {
    std::vector<std::string> ranking;
    std::stringstream in(o.prec);
    std::string f;
    while (std::getline(in, f, '>')) {
      f.erase(0, f.find_first_not_of(" \t"));
      f.erase(f.find_last_not_of(" \t") + 1);
      if (f.empty()) throw Error("usage", "--prec expects a chain 'f > g > h'");
      ranking.push_back(f);
    }
    params["precedence"] = ranking;
  }
  if (!o.weights.empty()) {
    if (o.order != "kbo") throw Error("usage", "--weight applies to --order kbo only");
    params["weights"] = parse_weights(o.weights);
  }
  return Json{{"kind", o.order}, {"params", params}};
}

std::vector<Equation> session_input(const ProblemFile& p) {
  auto eqs = p.equations;
  if (eqs.empty())
    for (const auto& r : p.rules) eqs.push_back(Equation{r.lhs, r.rhs});
  return eqs;
}

void print_state(const CompletionState& s) {
  std::cout << "E:\n";
  for (const auto& e : s.equations())
    std::cout << "  " << e.id << ": " << to_string(e.eq.lhs) << " == " << to_string(e.eq.rhs) << "\n";
  std::cout << "R:\n";
  for (const auto& r : s.rules())
    std::cout << "  " << r.id << ": " << to_string(r.rule.lhs) << " -> " << to_string(r.rule.rhs) << "\n";
  std::cout << "status: " << to_string(s.status()) << "\n";
}

int repl(CompletionState st, const std::vector<Symbol>& sig, bool as_json) {
  std::string line;
  auto show = [&] {
    if (as_json)
      std::cout << json::session_view(st).dump() << "\n";
    else
      print_state(st);
  };
  show();
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    std::stringstream in(line);
    std::string kind;
    if (!(in >> kind)) continue;
    if (kind == "quit" || kind == "exit") break;
    if (kind == "show") {
      show();
      continue;
    }
    if (kind == "export") {
      std::cout << json::session_export(st, sig).dump(2) << "\n";
      continue;
    }
    if (kind == "help") {
      std::cout << "orient ID [LR|RL] | deduce ID ID | simplify ID [full] | delete ID | compose ID | collapse ID |"
                   " auto_step | undo | show | export | quit\n";
      continue;
    }
    std::vector<int> args;
    std::string direction = "LR";
    bool full = false;
    std::string tok;
    while (in >> tok) {
      if (tok == "LR" || tok == "RL")
        direction = tok;
      else if (tok == "full")
        full = true;
      else
        try {
          args.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          std::cout << "error [usage]: bad argument '" << tok << "'\n";
          args.clear();
          kind.clear();
          break;
        }
    }
    if (kind.empty()) continue;
    if (kind == "auto") kind = "auto_step";
    try {
      st = apply_command(st, kind, args, direction, full);
      show();
    } catch (const Error& e) {
      std::cout << "error [" << e.code() << "]: " << e.what() << "\n";
    }
  }
  std::cout << "\n";
  return st.status() == SessionStatus::Success ? 0 : 1;
}

int cmd_complete(const Common& c, const CompleteOpts& o) {
  auto p = parse_problem(read_file(c.file));
  auto sig = p.signature();
  auto order = json::order_from(order_json(o), sig);
  auto st = new_session(session_input(p), order);
  if (!o.automatic) return repl(st, sig, c.json);
  auto r = auto_complete(st, c.fuel ? c.fuel : 10000, c.deadline());
  if (c.json) {
    Json j{{"outcome", to_string(r.outcome)}, {"reason", r.reason}, {"order", json::order(order)}};
    j["state"] = json::session_view(r.state);
    emit(j);
  } else {
    std::cout << to_string(r.outcome);
    if (!r.reason.empty()) std::cout << ": " << r.reason;
    std::cout << "\n";
    std::vector<Rule> rules;
    for (const auto& x : r.state.rules()) rules.push_back(x.rule);
    std::vector<Equation> eqs;
    for (const auto& x : r.state.equations()) eqs.push_back(x.eq);
    std::cout << print_problem(make_problem(rules, eqs));
  }
  return r.outcome == CompletionResult::Outcome::Completed ? 0 : 1;
}

struct ValidityOpts {
  std::string left;
  std::string right;
};

int cmd_validity(const Common& c, const CompleteOpts& co, const ValidityOpts& o) {
  auto p = parse_problem(read_file(c.file));
  Trs R = p.trs();
  if (!p.equations.empty()) {
    auto r = auto_complete(new_session(p.equations, json::order_from(order_json(co), p.signature())),
                           c.fuel ? c.fuel : 10000, c.deadline());
    if (r.outcome != CompletionResult::Outcome::Completed) {
      if (c.json)
        emit(Json{{"valid", nullptr}, {"completion", to_string(r.outcome)}, {"reason", r.reason}});
      else
        std::cout << "MAYBE: completion " << to_string(r.outcome) << (r.reason.empty() ? "" : ": " + r.reason) << "\n";
      return 1;
    }
    R = r.state.trs();
  }
  Term s = parse_term_for(o.left, p);
  Term t = parse_term_for(o.right, p);
  auto v = decide_validity(R, s, t, c.fuel ? c.fuel : 100000);
  if (c.json) {
    emit(Json{{"valid", v.valid}, {"leftNormalForm", to_string(v.left_nf)}, {"rightNormalForm", to_string(v.right_nf)}});
  } else {
    std::cout << (v.valid ? "VALID" : "INVALID") << "\n  " << to_string(s) << " ->! " << to_string(v.left_nf) << "\n  "
              << to_string(t) << " ->! " << to_string(v.right_nf) << "\n";
  }
  return 0;
}

struct ComplexityOpts {
  std::string dh;
  std::size_t dc = 0;
  std::size_t rc = 0;
};

int cmd_complexity(const Common& c, const ComplexityOpts& o) {
  auto p = parse_problem(read_file(c.file));
  Trs R = p.trs();
  std::size_t cap = c.depth ? c.depth : kDefaultNodeCap;
  int chosen = !o.dh.empty() + (o.dc > 0) + (o.rc > 0);
  if (chosen != 1) throw Error("usage", "give exactly one of --dh, --dc, --rc");
  if (!o.dh.empty()) {
    Term t = parse_term_for(o.dh, p);
    auto d = dh(t, R, cap, c.deadline());
    if (c.json) {
      emit(json::dh_result(t, d));
    } else if (d.kind == DhResult::Kind::Value) {
      std::cout << "dh(" << to_string(t) << ") = " << d.value << "\n";
      for (std::size_t i = 0; i < d.steps.size(); ++i)
        std::cout << "  -> " << to_string(d.derivation[i + 1]) << "   [" << step_text(d.steps[i]) << "]\n";
    } else if (d.kind == DhResult::Kind::Infinite) {
      std::cout << "dh(" << to_string(t) << ") = infinite\n  cycle:";
      for (const auto& u : d.cycle) std::cout << " " << to_string(u);
      std::cout << "\n";
    } else {
      std::cout << "budget exceeded after " << d.explored << " terms\n";
    }
    return d.kind == DhResult::Kind::BudgetExceeded ? 1 : 0;
  }
  std::string kind = o.dc ? "dc" : "rc";
  std::size_t n = o.dc ? o.dc : o.rc;
  Json points = Json::array();
  if (!c.json) std::cout << csv_header();
  int status = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    try {
      auto pt = kind == "dc" ? dc_empirical(R, k, cap, c.deadline()) : rc_empirical(R, k, cap, c.deadline());
      if (c.json)
        points.push_back(json::curve_point(pt));
      else
        std::cout << csv_row(pt);
    } catch (const Error& e) {
      if (e.code() == "empty-family") continue;
      std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
      status = 1;
      break;
    }
  }
  if (c.json) emit(Json{{"kind", kind}, {"points", points}});
  return status;
}

Service* running_service = nullptr;

extern "C" void on_signal(int) {
  if (running_service) running_service->stop();
}

int cmd_serve(const ServiceConfig& cfg) {
  Service service(cfg);
  running_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << cfg.bind << ":" << cfg.port << "\n";
  bool ok = service.listen();
  running_service = nullptr;
  if (!ok) throw Error("input-error", "cannot listen on " + cfg.bind + ":" + std::to_string(cfg.port));
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool needs_file = true) {
  if (needs_file) sub->add_option("file", c.file, "problem file")->required()->check(CLI::ExistingFile);
  sub->add_flag("--json", c.json, "JSON output");
  sub->add_option("--fuel", c.fuel, "step budget")->check(CLI::PositiveNumber);
  sub->add_option("--depth", c.depth, "search depth")->check(CLI::PositiveNumber);
  sub->add_option("--timeout", c.timeout, "wall-clock limit in seconds")->check(CLI::PositiveNumber);
}

void add_termination_flags(CLI::App* sub, TerminationOpts& o) {
  sub->add_option("--method", o.method, "auto, poly, matrix, lpo, kbo or loop")
      ->check(CLI::IsMember({"auto", "poly", "matrix", "lpo", "kbo", "loop"}));
  sub->add_option("--template", o.tmpl, "coefficient template, e.g. 'b = 4*x1 + _'");
  sub->add_option("--prec", o.prec, "precedence facts, e.g. 'f > g, g > h'");
  sub->add_option("--weight", o.weights, "KBO weights, e.g. 'f = 0, g = 2'");
  sub->add_option("--max-coeff", o.max_coeff, "largest polynomial coefficient")->check(CLI::NonNegativeNumber);
  sub->add_option("--dim", o.dim, "matrix dimension")->check(CLI::Range(1, 3));
  sub->add_option("--bound", o.bound, "largest matrix entry")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"term rewriting analysis"};
  app.require_subcommand(1);
  Common common;
  RewriteOpts rw;
  TerminationOpts to;
  CompleteOpts co;
  ValidityOpts vo;
  ComplexityOpts cx;
  ServiceConfig sc;

  auto* parse = app.add_subcommand("parse", "parse and print a problem");
  add_common(parse, common);

  auto* rewrite = app.add_subcommand("rewrite", "normalize a term");
  add_common(rewrite, common);
  rewrite->add_option("--term", rw.term, "start term")->required();
  rewrite->add_option("--strategy", rw.strategy, "li, lo, max or full")
      ->check(CLI::IsMember({"li", "lo", "max", "full"}));
  rewrite->add_option("--annotation", rw.annotation, "strategy annotation file")->check(CLI::ExistingFile);
  rewrite->add_flag("--incremental", rw.incremental, "resume at the contraction site (with --annotation)");
  rewrite->add_flag("--trace", rw.trace, "print every step");

  auto* cps = app.add_subcommand("cps", "list critical pairs");
  add_common(cps, common);

  auto* confluence = app.add_subcommand("confluence", "decide confluence");
  add_common(confluence, common);
  add_termination_flags(confluence, to);

  auto* termination = app.add_subcommand("termination", "prove or disprove termination");
  add_common(termination, common);
  add_termination_flags(termination, to);

  auto* complete = app.add_subcommand("complete", "Knuth-Bendix completion (interactive unless --auto)");
  add_common(complete, common);
  complete->add_option("--order", co.order, "kbo or lpo")->check(CLI::IsMember({"kbo", "lpo"}));
  complete->add_option("--prec", co.prec, "precedence chain, e.g. 'T > C > A'");
  complete->add_option("--weight", co.weights, "KBO weights, e.g. 'T = 2'");
  complete->add_flag("--auto", co.automatic, "run automatically");

  auto* validity = app.add_subcommand("validity", "decide s = t by completion");
  add_common(validity, common);
  validity->add_option("--left", vo.left, "left term")->required();
  validity->add_option("--right", vo.right, "right term")->required();
  validity->add_option("--order", co.order, "kbo or lpo")->check(CLI::IsMember({"kbo", "lpo"}));
  validity->add_option("--prec", co.prec, "precedence chain");
  validity->add_option("--weight", co.weights, "KBO weights");

  auto* complexity = app.add_subcommand("complexity", "derivation heights and empirical complexity");
  add_common(complexity, common);
  complexity->add_option("--dh", cx.dh, "derivation height of a term");
  complexity->add_option("--dc", cx.dc, "derivational complexity for sizes 1..N")->check(CLI::PositiveNumber);
  complexity->add_option("--rc", cx.rc, "runtime complexity for sizes 1..N")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--port", sc.port, "port")->check(CLI::Range(1, 65535));
  serve->add_option("--bind", sc.bind, "address to bind");
  serve->add_option("--persist", sc.persist_dir, "directory for session snapshots");
  serve->add_option("--cors", sc.cors_origin, "allowed CORS origin");
  serve->add_option("--workers", sc.workers, "concurrent analyses")->check(CLI::PositiveNumber);
  serve->add_option("--timeout", sc.analyze_timeout, "seconds per analysis")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*parse) return cmd_parse(common);
    if (*rewrite) return cmd_rewrite(common, rw);
    if (*cps) return cmd_cps(common);
    if (*confluence) return cmd_confluence(common, to);
    if (*termination) return cmd_termination(common, to);
    if (*complete) return cmd_complete(common, co);
    if (*validity) return cmd_validity(common, co, vo);
    if (*complexity) return cmd_complexity(common, cx);
    if (*serve) return cmd_serve(sc);
  } catch (const BudgetExceeded& e) {
    if (common.json)
      emit(json::error(e));
    else
      std::cout << "MAYBE: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    if (common.json) emit(json::error(e));
    if (e.code() == "fuel-exhausted") {
      if (!common.json) std::cout << "MAYBE: " << e.what() << "\n";
      return 1;
    }
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
