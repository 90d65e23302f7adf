#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <httplib.h>

#include "canonical.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "explorer.hpp"
#include "gadgets.hpp"
#include "io.hpp"
#include "quiver.hpp"

namespace qmut {

struct ServiceCaps {
  std::size_t max_states = 200'000;
  std::size_t max_steps = 500;
  std::size_t max_vertices = 30;
};

struct HttpReply {
  int status = 200;
  std::string body;
};

/// Per-step summary of an alternating orbit, shared by the service and CLI.
inline Json dynamics_summary(const DynamicsTrace& trace, double tol) {
  Json j;
  j["c"] = trace.c;
  j["d"] = trace.d;
  j["alpha"] = to_decimal(trace.alpha);
  j["steps"] = Json::array();
  for (std::size_t n = 0; n < trace.states.size(); ++n) {
    Json row;
    row["step"] = n;
    Json pairs = Json::object();
    for (std::size_t p = 0; p < trace.pairs.size(); ++p)
      pairs[trace.pairs[p].first + ":" + trace.pairs[p].second] = to_decimal(trace.delta[n][p]);
    row["pairs"] = std::move(pairs);
    row["total"] = to_decimal(trace.total_arrows[n]);
    j["steps"].push_back(std::move(row));
  }
  j["first_return"] = nullptr;
  for (std::size_t n = 1; n < trace.states.size(); ++n) {
    if (trace.states[n] == trace.states[0]) {
      j["first_return"] = n;
      break;
    }
  }
  try {
    const auto g = classify_growth(trace);
    j["classification"] = growth_name(g.kind);
    j["period"] = g.kind == GrowthClass::Kind::Periodic ? Json(g.period) : Json(nullptr);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Inconclusive) throw;
    j["classification"] = "inconclusive";
    j["period"] = nullptr;
  }
  j["ratio"] = Json::array();
  if (trace.alpha >= 2) {
    const Quiver& first = trace.states.front();
    for (std::size_t a = 0; a < first.size(); ++a) {
      if (!first.is_frozen(a)) continue;
      try {
        const auto r = ratio_limit_check(trace, first.id(a), tol);
        j["ratio"].push_back(Json{{"vertex", first.id(a)},
                                  {"numerator", to_decimal(numerator(r.exact))},
                                  {"denominator", to_decimal(denominator(r.exact))},
                                  {"estimate", r.estimate},
                                  {"target", r.target},
                                  {"converged", r.converged}});
      } catch (const Error&) {
        // vertex never meets C or D
      }
    }
  }
  return j;
}

/// Stateless request handler behind the HTTP endpoints. Every request is a
/// pure function of its path and body.
class Service {
 public:
  explicit Service(ServiceCaps caps = {}) : caps_(caps) {}

  HttpReply handle(std::string_view path, std::string_view body) const {
    try {
      const Json req = parse_json(body);
      if (!req.is_object()) throw Error(ErrorCode::ParseError, "request body must be a JSON object");
      return {200, route(path, req).dump(2)};
    } catch (const CapExceeded& e) {
      return error_reply(422, "LimitExceeded", e.what());
    } catch (const UnknownRoute&) {
      return error_reply(404, "NotFound", "no endpoint " + std::string(path));
    } catch (const Error& e) {
      return error_reply(400, std::string(code_name(e.code())), e.detail());
    } catch (const std::exception& e) {
      return error_reply(400, "BadRequest", e.what());
    }
  }

  static constexpr std::string_view kRoutes[] = {"/api/mutate",       "/api/mutate-seq",        "/api/canonical",
                                                 "/api/explore",      "/api/gadget/subset-sum", "/api/gadget/x3c",
                                                 "/api/dynamics"};

 private:
  struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
  };
  struct UnknownRoute {};

  static HttpReply error_reply(int status, const std::string& code, const std::string& message) {
    return {status, Json{{"error", Json{{"code", code}, {"message", message}}}}.dump(2)};
  }

  Quiver quiver_field(const Json& req) const {
    const Quiver q = quiver_from_json(detail::require_field(req, "quiver", "request"));
    if (q.size() > caps_.max_vertices)
      throw CapExceeded("quiver has " + std::to_string(q.size()) + " vertices; the service accepts at most " +
                        std::to_string(caps_.max_vertices));
    return q;
  }

  Json route(std::string_view path, const Json& req) const {
    if (path == "/api/mutate") {
      const Quiver q = quiver_field(req);
      const auto v = detail::require_string(detail::require_field(req, "vertex", "request"), "vertex");
      return Json{{"quiver", quiver_to_json(mutate(q, v))}};
    }
    if (path == "/api/mutate-seq") {
      const Quiver q = quiver_field(req);
      const Json& steps = detail::require_field(req, "steps", "request");
      if (!steps.is_array()) detail::parse_fail("steps", "expected an array");
      MutationSequence seq;
      for (std::size_t i = 0; i < steps.size(); ++i)
        seq.push_back(detail::require_string(steps[i], "steps[" + std::to_string(i) + "]"));
      return Json{{"quiver", quiver_to_json(mutate_seq(q, seq))}};
    }
    if (path == "/api/canonical") {
      return Json{{"key_hex", canonical_key(quiver_field(req)).hex()}};
    }
    if (path == "/api/explore") {
      const Quiver q = quiver_field(req);
      const Predicate pred = predicate_from_json(detail::require_field(req, "predicate", "request"));
      SearchLimits defaults;
      defaults.max_states = caps_.max_states;
      const SearchLimits limits = limits_from_json(req.contains("limits") ? req["limits"] : Json(nullptr), defaults);
      if (limits.max_states > caps_.max_states)
        throw CapExceeded("max_states " + std::to_string(limits.max_states) + " exceeds the service cap of " +
                          std::to_string(caps_.max_states));
      const Dedup dedup =
          req.contains("dedup") ? dedup_from_string(detail::require_string(req["dedup"], "dedup")) : Dedup::Labeled;
      return report_to_json(explore(q, pred, limits, dedup));
    }
    if (path == "/api/gadget/subset-sum") {
      const Json& values = detail::require_field(req, "values", "request");
      if (!values.is_array()) detail::parse_fail("values", "expected an array");
      std::vector<std::uint64_t> xs;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const Multiplicity v = detail::require_integer(values[i], "values[" + std::to_string(i) + "]");
        if (v < 0 || v > Multiplicity(UINT64_MAX)) detail::parse_fail("values[" + std::to_string(i) + "]", "out of range");
        xs.push_back(v.convert_to<std::uint64_t>());
      }
      if (xs.size() + 2 > caps_.max_vertices)
        throw CapExceeded("gadget would have " + std::to_string(xs.size() + 2) + " vertices");
      return Json{{"quiver", quiver_to_json(build_subset_sum_gadget(xs))}};
    }
    if (path == "/api/gadget/x3c") {
      X3CInstance inst;
      const Multiplicity n = detail::require_integer(detail::require_field(req, "n", "request"), "n");
      if (n < 0 || n > 1'000'000) detail::parse_fail("n", "out of range");
      inst.n = n.convert_to<std::size_t>();
      const Json& triples = detail::require_field(req, "triples", "request");
      if (!triples.is_array()) detail::parse_fail("triples", "expected an array");
      for (std::size_t t = 0; t < triples.size(); ++t) {
        const std::string at = "triples[" + std::to_string(t) + "]";
        if (!triples[t].is_array() || triples[t].size() != 3) detail::parse_fail(at, "expected three elements");
        Triple tr{};
        for (std::size_t i = 0; i < 3; ++i) {
          const Multiplicity e = detail::require_integer(triples[t][i], at);
          if (e < 0 || e > 1'000'000) detail::parse_fail(at, "element out of range");
          tr[i] = e.convert_to<std::size_t>();
        }
        inst.triples.push_back(tr);
      }
      if (inst.n + inst.triples.size() + 1 > caps_.max_vertices)
        throw CapExceeded("gadget would have " + std::to_string(inst.n + inst.triples.size() + 1) + " vertices");
      return Json{{"quiver", quiver_to_json(build_x3c_gadget(inst))}};
    }
    if (path == "/api/dynamics") {
      const Quiver q = quiver_field(req);
      const auto c = detail::require_string(detail::require_field(req, "c", "request"), "c");
      const auto d = detail::require_string(detail::require_field(req, "d", "request"), "d");
      const Multiplicity steps = detail::require_integer(detail::require_field(req, "steps", "request"), "steps");
      if (steps < 1) detail::parse_fail("steps", "must be positive");
      if (steps > caps_.max_steps)
        throw CapExceeded("steps " + to_decimal(steps) + " exceeds the service cap of " + std::to_string(caps_.max_steps));
      double tol = 1e-9;
      if (req.contains("tol")) {
        if (!req["tol"].is_number()) detail::parse_fail("tol", "expected a number");
        tol = req["tol"].get<double>();
      }
      return dynamics_summary(alt_orbit(q, c, d, steps.convert_to<std::size_t>()), tol);
    }
    throw UnknownRoute{};
  }

  ServiceCaps caps_;
};

/// HTTP front end for `Service`. Construction binds the port (PortInUse on
/// failure); `run()` blocks until `stop()`.
class HttpServer {
 public:
  HttpServer(const std::string& host, int port, ServiceCaps caps = {}) : service_(caps) {
    for (auto route : Service::kRoutes) {
      const std::string path(route);
      server_.Post(path, [this, path](const httplib::Request& req, httplib::Response& res) {
        const auto reply = service_.handle(path, req.body);
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
      });
    }
    // httplib's default adds SO_REUSEPORT, which lets a second server share the port.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
      if (port_ < 0) throw Error(ErrorCode::PortInUse, "could not bind " + host);
    } else {
      if (!server_.bind_to_port(host, port))
        throw Error(ErrorCode::PortInUse, "port " + std::to_string(port) + " on " + host + " is not available");
      port_ = port;
    }
  }

  int port() const noexcept { return port_; }
  bool run() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  Service service_;
  httplib::Server server_;
  int port_ = 0;
};

}  // namespace qmut
