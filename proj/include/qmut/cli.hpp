#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "canonical.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "explorer.hpp"
#include "gadgets.hpp"
#include "io.hpp"
#include "quiver.hpp"
#include "service.hpp"

namespace qmut {

namespace cli_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
  out << content;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::optional<Multiplicity> parse_limit(const std::string& text, const char* name) {
  if (text.empty() || text == "unlimited") return std::nullopt;
  Multiplicity v;
  if (!parse_decimal(text, v) || v < 1)
    throw Error(ErrorCode::InvalidLimits, std::string(name) + " must be a positive integer or 'unlimited'");
  return v;
}

struct LimitFlags {
  std::size_t max_states = 1'000'000;
  std::string max_depth = "unlimited";
  std::string max_multiplicity = "18446744073709551616";
  std::string time_ms = "unlimited";

  void attach(CLI::App* app) {
    app->add_option("--max-states", max_states, "state budget")->capture_default_str();
    app->add_option("--max-depth", max_depth, "depth bound or 'unlimited'")->capture_default_str();
    app->add_option("--max-multiplicity", max_multiplicity, "states above this multiplicity are not expanded")
        ->capture_default_str();
    app->add_option("--time-ms", time_ms, "time budget in milliseconds or 'unlimited'")->capture_default_str();
  }

  SearchLimits build() const {
    SearchLimits l;
    l.max_states = max_states;
    if (auto d = parse_limit(max_depth, "--max-depth")) l.max_depth = d->convert_to<std::size_t>();
    l.max_multiplicity = parse_limit(max_multiplicity, "--max-multiplicity");
    if (auto t = parse_limit(time_ms, "--time-ms")) l.time_budget_ms = t->convert_to<std::uint64_t>();
    l.validate();
    return l;
  }
};

}  // namespace cli_detail

/// Entry point of the `qmut` command-line tool. Returns 0 on success, 1 on
/// domain errors and 2 on usage errors. Decision subcommands print `yes` or
/// `no` as the last line of `out`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Quiver mutation laboratory", "qmut"};
  app.require_subcommand(1);

  // mutate
  std::string input, output, seq;
  auto* mutate_cmd = app.add_subcommand("mutate", "apply a mutation sequence to a quiver document");
  mutate_cmd->add_option("--input", input, "quiver document")->required();
  mutate_cmd->add_option("--seq", seq, "comma-separated vertices, applied left to right")->required();
  mutate_cmd->add_option("--output", output, "write the document here instead of stdout");

  // explore
  std::string predicate = "no-icebound", k_text, pred_u, pred_v, dedup_text = "labeled";
  LimitFlags explore_limits;
  auto* explore_cmd = app.add_subcommand("explore", "bounded search of the mutation class");
  explore_cmd->add_option("--input", input, "quiver document")->required();
  explore_cmd->add_option("--predicate", predicate, "pair-exactly | no-icebound | collect")
      ->check(CLI::IsMember({"pair-exactly", "no-icebound", "collect"}))
      ->capture_default_str();
  explore_cmd->add_option("--k", k_text, "target multiplicity for pair-exactly");
  explore_cmd->add_option("--u", pred_u, "first vertex for collect");
  explore_cmd->add_option("--v", pred_v, "second vertex for collect");
  explore_cmd->add_option("--dedup", dedup_text, "labeled | isomorphism")
      ->check(CLI::IsMember({"labeled", "isomorphism", "iso"}))
      ->capture_default_str();
  explore_limits.attach(explore_cmd);

  // orbit
  LimitFlags orbit_limits;
  auto* orbit_cmd = app.add_subcommand("orbit", "size of a two-mutable-vertex mutation class");
  orbit_cmd->add_option("--input", input, "quiver document")->required();
  orbit_limits.attach(orbit_cmd);

  // gadget
  std::string values_text, instance;
  std::uint64_t k_value = 0;
  bool decide = false, check_oracle = false;
  auto* gadget_cmd = app.add_subcommand("gadget", "reduction gadgets");
  gadget_cmd->require_subcommand(1);
  auto* ss_cmd = gadget_cmd->add_subcommand("subset-sum", "Subset-Sum gadget");
  auto* ss_values = ss_cmd->add_option("--values", values_text, "comma-separated positive integers");
  auto* ss_instance = ss_cmd->add_option("--instance", instance, "instance file: values line, optional target line");
  ss_values->excludes(ss_instance);
  auto* ss_k = ss_cmd->add_option("--k", k_value, "target multiplicity");
  ss_cmd->add_flag("--decide", decide, "decide whether some mutation-equivalent quiver has a k-arrow pair");
  ss_cmd->add_flag("--check-oracle", check_oracle, "compare with the dynamic-programming oracle");
  ss_cmd->add_option("--output", output, "write the gadget document here");
  auto* x3c_cmd = gadget_cmd->add_subcommand("x3c", "exact-cover-by-3-sets gadget");
  x3c_cmd->add_option("--instance", instance, "instance file: n, then one triple per line")->required();
  x3c_cmd->add_flag("--decide", decide, "decide whether icebound arrows can be eliminated");
  x3c_cmd->add_flag("--check-oracle", check_oracle, "compare with the exact-cover search");
  x3c_cmd->add_option("--output", output, "write the gadget document here");

  // dynamics
  std::string c_id = "C", d_id = "D", ratio_vertex, trace_path;
  std::size_t steps = 30;
  double tol = 1e-9;
  auto* dyn_cmd = app.add_subcommand("dynamics", "alternating mutations at two mutable vertices");
  dyn_cmd->add_option("--input", input, "quiver document")->required();
  dyn_cmd->add_option("--c", c_id, "first mutable vertex")->capture_default_str();
  dyn_cmd->add_option("--d", d_id, "second mutable vertex")->capture_default_str();
  dyn_cmd->add_option("--steps", steps, "number of (mu_D mu_C) steps")->check(CLI::PositiveNumber)->capture_default_str();
  dyn_cmd->add_option("--ratio", ratio_vertex, "frozen vertex A for delta(A,C)/delta(A,D)");
  dyn_cmd->add_option("--tol", tol, "ratio tolerance")->capture_default_str();
  dyn_cmd->add_option("--trace", trace_path, "write the per-step table here");

  // conjecture
  std::string weights_text;
  LimitFlags conj_limits;
  conj_limits.max_states = 100'000;
  auto* conj_cmd = app.add_subcommand("conjecture", "A--B multiplicities over the class of a path quiver");
  conj_cmd->add_option("--weights", weights_text, "comma-separated x0,...,xk")->required();
  conj_limits.attach(conj_cmd);

  // canon
  auto* canon_cmd = app.add_subcommand("canon", "canonical key of a quiver");
  canon_cmd->add_option("--input", input, "quiver document")->required();

  // serve
  int port = 0;
  std::string host = "127.0.0.1";
  auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
  serve_cmd->add_option("--port", port, "listening port (default $QMUT_PORT or 8080)");
  serve_cmd->add_option("--host", host, "listening address")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) {
      failing = sub;
      for (auto* nested : sub->get_subcommands()) failing = nested;
    }
    err << failing->help();
    return 2;
  }

  try {
    if (mutate_cmd->parsed()) {
      const Quiver q = parse_quiver(read_file(input));
      const auto doc = serialize_quiver(mutate_seq(q, split_commas(seq)));
      if (output.empty()) out << doc;
      else write_file(output, doc);
      return 0;
    }

    if (explore_cmd->parsed()) {
      const Quiver q = parse_quiver(read_file(input));
      Predicate pred = Predicate::no_icebound();
      if (predicate == "pair-exactly") {
        Multiplicity k;
        if (!parse_decimal(k_text, k) || k < 0) throw Error(ErrorCode::ParseError, "--k must be a nonnegative integer");
        pred = Predicate::pair_exactly(k);
      } else if (predicate == "collect") {
        if (pred_u.empty() != pred_v.empty()) throw Error(ErrorCode::ParseError, "collect needs both --u and --v");
        pred = pred_u.empty() ? Predicate::collect_all() : Predicate::collect(pred_u, pred_v);
      }
      const auto report = explore(q, pred, explore_limits.build(), dedup_from_string(dedup_text));
      out << report_to_json(report).dump(2) << "\n";
      if (pred.stops_on_witness()) {
        if (report.witness) out << "yes\n";
        else if (report.exhausted) out << "no\n";
        else out << "unknown\n";
      }
      return 0;
    }

    if (orbit_cmd->parsed()) {
      const auto counts = orbit_size(parse_quiver(read_file(input)), orbit_limits.build());
      out << "labeled " << counts.labeled << "\n" << "iso " << counts.iso << "\n";
      return 0;
    }

    if (ss_cmd->parsed()) {
      std::vector<std::uint64_t> values;
      std::optional<std::uint64_t> k;
      if (!instance.empty()) {
        auto parsed = parse_subset_sum_instance(read_file(instance));
        values = std::move(parsed.values);
        k = parsed.target;
      } else if (!values_text.empty()) {
        values = parse_value_list(values_text);
      } else {
        err << "error: gadget subset-sum needs --values or --instance\n";
        return 2;
      }
      if (ss_k->count() > 0) k = k_value;
      if (!decide) {
        const auto doc = serialize_quiver(build_subset_sum_gadget(values));
        if (output.empty()) out << doc;
        else write_file(output, doc);
        return 0;
      }
      if (!k) {
        err << "error: --decide needs a target (--k or the instance's second line)\n";
        return 2;
      }
      const SubsetSumReduction reduction(values);
      if (!output.empty()) write_file(output, serialize_quiver(reduction.gadget()));
      const bool answer = reduction.decide(*k);
      out << "orbit members: " << reduction.orbit_size() << "\n";
      if (auto w = reduction.witness(*k)) {
        out << "witness:";
        for (const auto& v : *w) out << ' ' << v;
        out << "\n";
      }
      int code = 0;
      if (check_oracle) {
        const bool oracle = subset_sum_oracle(values, *k);
        out << "oracle: " << (oracle ? "yes" : "no") << (oracle == answer ? " (agrees)" : " (DISAGREES)") << "\n";
        if (oracle != answer) code = 1;
      }
      out << (answer ? "yes" : "no") << "\n";
      return code;
    }

    if (x3c_cmd->parsed()) {
      const X3CInstance inst = parse_x3c_instance(read_file(instance));
      if (!decide) {
        const auto doc = serialize_quiver(build_x3c_gadget(inst));
        if (output.empty()) out << doc;
        else write_file(output, doc);
        return 0;
      }
      if (!output.empty()) write_file(output, serialize_quiver(build_x3c_gadget(inst)));
      const auto decision = decide_icebound_free_via_gadget(inst);
      out << "orbit members checked: " << decision.members_checked << "\n";
      if (decision.witness) {
        out << "witness:";
        for (const auto& v : *decision.witness) out << ' ' << v;
        out << "\n";
      }
      int code = 0;
      if (check_oracle) {
        const bool oracle = x3c_oracle(inst);
        out << "oracle: " << (oracle ? "yes" : "no") << (oracle == decision.icebound_free ? " (agrees)" : " (DISAGREES)")
            << "\n";
        if (oracle != decision.icebound_free) code = 1;
      }
      out << (decision.icebound_free ? "yes" : "no") << "\n";
      return code;
    }

    if (dyn_cmd->parsed()) {
      const Quiver q = parse_quiver(read_file(input));
      const auto trace = alt_orbit(q, c_id, d_id, steps);
      if (!trace_path.empty()) {
        std::ofstream table(trace_path);
        if (!table) throw Error(ErrorCode::ParseError, "cannot write '" + trace_path + "'");
        write_trace_table(table, trace);
      }
      out << "alpha " << trace.alpha << "\n";
      out << "steps " << trace.steps() << "\n";
      out << "total_arrows " << trace.total_arrows.back() << "\n";
      try {
        const auto g = classify_growth(trace);
        out << "growth " << growth_name(g.kind);
        if (g.kind == GrowthClass::Kind::Periodic) out << " " << g.period;
        out << "\n";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Inconclusive) throw;
        out << "growth inconclusive\n";
      }
      if (!ratio_vertex.empty()) {
        const auto r = ratio_limit_check(trace, ratio_vertex, tol);
        out << std::setprecision(15);
        out << "estimate " << r.estimate << "\n";
        out << "target " << r.target << "\n";
        out << (r.converged ? "converged" : "not converged") << "\n";
      }
      return 0;
    }

    if (conj_cmd->parsed()) {
      std::vector<Multiplicity> weights;
      for (const auto& w : split_commas(weights_text)) {
        Multiplicity v;
        if (!parse_decimal(w, v)) throw Error(ErrorCode::InvalidWeights, "'" + w + "' is not an integer");
        weights.push_back(v);
      }
      const auto r = conjecture_scan(weights, conj_limits.build());
      out << "product " << r.product << "\n";
      out << "observed";
      for (const auto& m : r.observed) out << ' ' << m;
      out << "\n";
      out << "visited " << r.visited << "\n";
      out << "exhausted " << (r.exhausted ? "true" : "false") << "\n";
      if (!r.truncated_by.empty()) {
        out << "truncated_by";
        for (const auto& t : r.truncated_by) out << ' ' << t;
        out << "\n";
      }
      out << (r.consistent ? "yes" : "no") << "\n";
      return 0;
    }

    if (canon_cmd->parsed()) {
      out << canonical_key(parse_quiver(read_file(input))).hex() << "\n";
      return 0;
    }

    if (serve_cmd->parsed()) {
      if (port == 0) {
        const char* env = std::getenv("QMUT_PORT");
        port = env ? std::atoi(env) : 8080;
      }
      HttpServer server(host, port);
      err << "listening on " << host << ":" << server.port() << "\n";
      return server.run() ? 0 : 1;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace qmut
