#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qmut/cli.hpp"
#include "qmut/service.hpp"

using namespace qmut;

namespace {

Json request(std::initializer_list<std::pair<const std::string, Json>> fields) {
  Json j = Json::object();
  for (const auto& [k, v] : fields) j[k] = v;
  return j;
}

Json call(const Service& s, std::string_view path, const Json& body, int expected_status = 200) {
  const auto reply = s.handle(path, body.dump());
  EXPECT_EQ(reply.status, expected_status) << reply.body;
  return Json::parse(reply.body);
}

}  // namespace

TEST(Service, Mutate) {
  const Service s;
  const Json out = call(s, "/api/mutate", request({{"quiver", quiver_to_json(fixtures::five_vertex())}, {"vertex", "B"}}));
  EXPECT_EQ(quiver_from_json(out["quiver"]), fixtures::five_vertex_after_b());
}

TEST(Service, MutateFrozenIs400) {
  const Service s;
  const Json out = call(s, "/api/mutate", request({{"quiver", quiver_to_json(fixtures::two_mutable(1, 2, 1))}, {"vertex", "A"}}), 400);
  EXPECT_EQ(out["error"]["code"], "FrozenVertexMutation");
  EXPECT_TRUE(out["error"]["message"].is_string());
}

TEST(Service, MutateSeqAndStepIndex) {
  const Service s;
  const Json q = quiver_to_json(fixtures::five_vertex());
  const Json out = call(s, "/api/mutate-seq", request({{"quiver", q}, {"steps", Json::array({"C", "C"})}}));
  EXPECT_EQ(quiver_from_json(out["quiver"]), fixtures::five_vertex());
  const Json bad = call(s, "/api/mutate-seq", request({{"quiver", q}, {"steps", Json::array({"C", "Q"})}}), 400);
  EXPECT_EQ(bad["error"]["code"], "UnknownVertex");
}

TEST(Service, Canonical) {
  const Service s;
  const Json a = call(s, "/api/canonical", request({{"quiver", quiver_to_json(fixtures::markov())}}));
  EXPECT_EQ(a["key_hex"], canonical_key(fixtures::markov()).hex());
}

TEST(Service, ExploreMarkov) {
  const Service s;
  const Json out = call(s, "/api/explore",
                        request({{"quiver", quiver_to_json(fixtures::markov())},
                                 {"predicate", Json{{"kind", "no-icebound"}}},
                                 {"dedup", "isomorphism"}}));
  EXPECT_EQ(out["visited"], 1);
  EXPECT_EQ(out["exhausted"], true);
  EXPECT_EQ(out["witness"], Json::array());
}

TEST(Service, ExploreCapsAre422) {
  const Service s(ServiceCaps{1000, 50, 10});
  const Json q = quiver_to_json(fixtures::a3_path());
  const Json over = call(s, "/api/explore",
                         request({{"quiver", q}, {"predicate", Json{{"kind", "no-icebound"}}},
                                  {"limits", Json{{"max_states", 5000}}}}),
                         422);
  EXPECT_EQ(over["error"]["code"], "LimitExceeded");
  call(s, "/api/dynamics",
       request({{"quiver", quiver_to_json(fixtures::two_mutable(1, 3, 1))}, {"c", "C"}, {"d", "D"}, {"steps", 51}}), 422);
  call(s, "/api/gadget/subset-sum", request({{"values", Json::array({1, 2, 3, 4, 5, 6, 7, 8, 9})}}), 422);
}

TEST(Service, GadgetEndpoints) {
  const Service s;
  const Json ss = call(s, "/api/gadget/subset-sum", request({{"values", Json::array({3, "5"})}}));
  EXPECT_EQ(quiver_from_json(ss["quiver"]), build_subset_sum_gadget({3, 5}));
  const Json x = call(s, "/api/gadget/x3c",
                      request({{"n", 6}, {"triples", Json::array({Json::array({1, 2, 3}), Json::array({4, 5, 6})})}}));
  EXPECT_EQ(quiver_from_json(x["quiver"]), build_x3c_gadget({6, {{1, 2, 3}, {4, 5, 6}}}));
  const Json bad = call(s, "/api/gadget/x3c", request({{"n", 4}, {"triples", Json::array({Json::array({1, 2, 3})})}}), 400);
  EXPECT_EQ(bad["error"]["code"], "InvalidInstance");
}

TEST(Service, DynamicsAlphaOneShowsPeriodicReturn) {
  const Service s;
  const Json out = call(s, "/api/dynamics",
                        request({{"quiver", quiver_to_json(fixtures::two_mutable(1, 1, 1))}, {"c", "C"}, {"d", "D"}, {"steps", 12}}));
  EXPECT_EQ(out["first_return"], 5);
  EXPECT_EQ(out["classification"], "periodic");
  EXPECT_EQ(out["period"], 5);
  EXPECT_EQ(out["steps"].size(), 13U);
  EXPECT_EQ(out["steps"][0]["pairs"]["A:C"], "1");
}

TEST(Service, DynamicsRatio) {
  const Service s;
  const Json out = call(s, "/api/dynamics",
                        request({{"quiver", quiver_to_json(fixtures::two_mutable(1, 3, 1))}, {"c", "C"}, {"d", "D"}, {"steps", 60}}));
  EXPECT_EQ(out["classification"], "exponential");
  ASSERT_FALSE(out["ratio"].empty());
  EXPECT_EQ(out["ratio"][0]["vertex"], "A");
  EXPECT_EQ(out["ratio"][0]["converged"], true);
}

TEST(Service, BadRequests) {
  const Service s;
  EXPECT_EQ(s.handle("/api/mutate", "{not json").status, 400);
  EXPECT_EQ(s.handle("/api/mutate", "[]").status, 400);
  EXPECT_EQ(s.handle("/api/nothing", "{}").status, 404);
  const Json missing = call(s, "/api/mutate", request({{"vertex", "A"}}), 400);
  EXPECT_EQ(missing["error"]["code"], "ParseError");
}

TEST(Service, Stateless) {
  const Service s;
  const std::string a = request({{"quiver", quiver_to_json(fixtures::five_vertex())}, {"vertex", "B"}}).dump();
  const std::string b = request({{"quiver", quiver_to_json(fixtures::markov())}}).dump();
  const auto first = s.handle("/api/mutate", a).body;
  s.handle("/api/canonical", b);
  s.handle("/api/mutate", "{}");
  EXPECT_EQ(s.handle("/api/mutate", a).body, first);
  EXPECT_EQ(Service().handle("/api/mutate", a).body, first);
}

TEST(Service, CliAndServiceDocumentsAreByteIdentical) {
  const Service s;
  const Json out = call(s, "/api/mutate-seq",
                        request({{"quiver", quiver_to_json(fixtures::five_vertex())}, {"steps", Json::array({"B", "E"})}}));
  std::ostringstream cli_out, cli_err;
  ASSERT_EQ(run_cli({"mutate", "--input", QMUT_SAMPLES_DIR "/five_vertex.json", "--seq", "B,E"}, cli_out, cli_err), 0)
      << cli_err.str();
  EXPECT_EQ(cli_out.str(), out["quiver"].dump(2) + "\n");
}

TEST(HttpServer, RoundTripOverLoopback) {
  HttpServer server("127.0.0.1", 0);
  ASSERT_GT(server.port(), 0);
  std::thread worker([&] { server.run(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", server.port());
  const std::string body = request({{"quiver", quiver_to_json(fixtures::five_vertex())}, {"vertex", "B"}}).dump();
  auto res = client.Post("/api/mutate", body, "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(quiver_from_json(Json::parse(res->body)["quiver"]), fixtures::five_vertex_after_b());
  auto bad = client.Post("/api/mutate", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  server.stop();
  worker.join();
}

TEST(HttpServer, PortInUse) {
  HttpServer first("127.0.0.1", 0);
  try {
    HttpServer second("127.0.0.1", first.port());
    FAIL() << "second bind succeeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PortInUse);
  }
}
