#include "doctest.h"

#include "chairsynth/demo_motions.hpp"
#include "chairsynth/eval_server.hpp"
#include "chairsynth/evalsvc.hpp"
#include "chairsynth/rng.hpp"
#include "httplib.h"

#include <algorithm>
#include <filesystem>
#include <thread>

using namespace chairsynth;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("chairsynth_test_eval_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

EvalResponse resp(std::string p, std::string m, int ease, int freq, bool seen = false) {
  return {std::move(p), std::move(m), ease, freq, seen, ""};
}

std::string motion_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "m%03d", i);
  return buf;
}

// One participant whose per-motion scores are exactly the given means.
std::vector<EvalResponse> from_means(const std::vector<std::pair<int, int>>& means) {
  std::vector<EvalResponse> out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    out.push_back(resp("p", motion_name(static_cast<int>(i)), means[i].first, means[i].second));
  }
  return out;
}

}  // namespace

TEST_CASE("response validation and json") {
  CHECK_NOTHROW(validate_response(resp("p", "m", 1, 7)));
  CHECK_THROWS_AS(validate_response(resp("p", "m", 9, 3)), InvalidArgument);
  CHECK_THROWS_AS(validate_response(resp("p", "m", 3, 0)), InvalidArgument);
  CHECK_THROWS_AS(validate_response(resp("", "m", 3, 3)), InvalidArgument);
  CHECK_THROWS_AS(validate_response(resp("p", "", 3, 3)), InvalidArgument);
  const auto r = resp("p1", "walk", 3, 4, true);
  const auto back = response_from_json(response_to_json(r));
  CHECK(back.participant == "p1");
  CHECK(back.seen_before);
  auto j = response_to_json(r);
  j["seen_before"] = "no";
  CHECK_FALSE(response_from_json(j).seen_before);
  j["seen_before"] = "maybe";
  CHECK_THROWS_AS(response_from_json(j), ParseError);
  j.erase("ease");
  CHECK_THROWS_AS(response_from_json(j), ParseError);
}

TEST_CASE("later submissions overwrite") {
  const auto c = compact_responses({resp("a", "m1", 1, 1), resp("b", "m1", 2, 2), resp("a", "m1", 5, 6)});
  REQUIRE(c.size() == 2);
  CHECK(c[0].participant == "a");
  CHECK(c[0].ease == 5);
  CHECK(c[0].frequency == 6);
}

TEST_CASE("store persists and rejects bad input") {
  const auto dir = temp_dir("store");
  {
    ResponseStore s(dir / "log.jsonl", {"m1", "m2"});
    s.record(resp("a", "m1", 2, 3));
    s.record(resp("a", "m1", 4, 3));
    s.record(resp("b", "m2", 7, 7));
    CHECK_THROWS_AS(s.record(resp("a", "zzz", 2, 3)), NotFound);
    CHECK_THROWS_AS(s.record(resp("a", "m1", 9, 3)), InvalidArgument);
    CHECK(s.snapshot().size() == 2);
  }
  ResponseStore again(dir / "log.jsonl", {"m1", "m2"});
  const auto snap = again.snapshot();
  REQUIRE(snap.size() == 2);
  CHECK(snap[0].ease == 4);
  again.compact();
  CHECK(load_responses(dir / "log.jsonl").size() == 2);
  const auto text = read_text_file(dir / "log.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("concurrent writers") {
  const auto dir = temp_dir("concurrent");
  ResponseStore s(dir / "log.jsonl");
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t) {
    ts.emplace_back([&s, t] {
      for (int i = 0; i < 50; ++i) {
        s.record(resp("p" + std::to_string(t), motion_name(i), 1 + i % 7, 1 + t));
      }
    });
  }
  for (auto& t : ts) {
    t.join();
  }
  CHECK(s.snapshot().size() == 200);
  CHECK(load_responses(dir / "log.jsonl").size() == 200);
}

TEST_CASE("pearson correlation") {
  CHECK(*pearson({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*pearson({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(*pearson({1, 2, 3}, {2, 4, 5}) - 0.9820) <= 1e-3);
  CHECK_FALSE(pearson({1, 2, 3}, {4, 4, 4}).has_value());
  CHECK_FALSE(pearson({1}, {2}).has_value());
  CHECK_THROWS_AS(pearson({1, 2}, {1}), InvalidArgument);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(10), y(10), xs(10), ys(10);
    const double a = rng.uniform(0.1, 10), b = rng.uniform(-5, 5);
    for (int k = 0; k < 10; ++k) {
      x[k] = rng.uniform(1, 7);
      y[k] = rng.uniform(1, 7);
      xs[k] = a * x[k] + b;
      ys[k] = 0.5 * y[k] - 3;
    }
    CHECK(std::abs(*pearson(x, y) - *pearson(xs, ys)) <= 1e-12);
  }
}

TEST_CASE("analysis through the response path") {
  const auto a = analyze_responses(from_means({{1, 2}, {2, 4}, {3, 5}}));
  REQUIRE(a.groups.size() == 1);
  CHECK(a.groups[0].name == "all");
  CHECK(std::abs(*a.groups[0].pearson_r - 0.9820) <= 1e-3);
  CHECK(a.groups[0].mean_ease == doctest::Approx(2.0));
  CHECK(a.groups[0].sd_ease.has_value());
  CHECK(*a.groups[0].sd_ease == doctest::Approx(1.0));
  REQUIRE(a.motions.size() == 3);
  CHECK(a.motions[2].total == 8.0);
  CHECK(a.motions[2].rank == 1);
  CHECK(a.motions[0].rank == 3);
  const auto line = analyze_responses(from_means({{1, 2}, {2, 3}, {3, 4}, {5, 6}}));
  CHECK(*line.groups[0].pearson_r == doctest::Approx(1.0).epsilon(1e-15));
  const auto neg = analyze_responses(from_means({{1, 6}, {2, 5}, {4, 3}}));
  CHECK(*neg.groups[0].pearson_r == doctest::Approx(-1.0).epsilon(1e-15));
  const auto flat = analyze_responses(from_means({{1, 4}, {2, 4}}));
  CHECK_FALSE(flat.groups[0].pearson_r.has_value());
  CHECK(analysis_to_json(flat)["groups"][0]["pearson_r"].is_null());
}

TEST_CASE("groups and per-motion means") {
  std::vector<EvalResponse> log{resp("a", "x", 2, 4, true), resp("b", "x", 4, 6), resp("a", "y", 7, 7)};
  const auto a = analyze_responses(log, {{"x", "t2m"}, {"y", "hml"}});
  CHECK(a.participants == 2);
  CHECK(a.responses == 3);
  REQUIRE(a.motions.size() == 2);
  CHECK(a.motions[0].mean_ease == 3.0);
  CHECK(a.motions[0].mean_frequency == 5.0);
  CHECK(a.motions[0].seen_fraction == 0.5);
  REQUIRE(a.groups.size() == 3);
  CHECK(a.groups[0].name == "all");
  CHECK_FALSE(a.groups[1].sd_ease.has_value());
  const auto sum = analyze_responses(log, {}, ScoreOptions{ScoreMode::Sum, 1.0, 1.0});
  CHECK(sum.motions[0].total == 16.0);
  CHECK(parse_score_mode(score_mode_name(ScoreMode::Sum)) == ScoreMode::Sum);
  CHECK_THROWS(parse_score_mode("median"));
}

TEST_CASE("analysis ignores log order") {
  std::vector<EvalResponse> log;
  Rng rng(8);
  for (int p = 0; p < 6; ++p) {
    for (int m = 0; m < 20; ++m) {
      if (rng.below(3) != 0) {
        log.push_back(resp("p" + std::to_string(p), motion_name(m), 1 + static_cast<int>(rng.below(7)),
                           1 + static_cast<int>(rng.below(7)), rng.below(2) == 0));
      }
    }
  }
  const auto base = analysis_to_json(analyze_responses(log)).dump();
  for (int i = 0; i < 20; ++i) {
    for (std::size_t k = log.size(); k > 1; --k) {
      std::swap(log[k - 1], log[rng.below(k)]);
    }
    CHECK(analysis_to_json(analyze_responses(log)).dump() == base);
  }
}

TEST_CASE("bottom fraction filter") {
  std::vector<EvalResponse> log;
  for (int m = 0; m < 100; ++m) {
    log.push_back(resp("p", motion_name(m), 1 + m % 7, 1 + (m / 7) % 7));
  }
  const auto a = analyze_responses(log);
  const auto f = filter_bottom_fraction(a, 0.10);
  CHECK(f.removed.size() == 10);
  CHECK(f.kept.size() == 90);
  CHECK(std::is_sorted(f.kept.begin(), f.kept.end()));
  // Removed totals never exceed kept ones.
  std::map<std::string, double> total;
  for (const auto& s : a.motions) {
    total[s.motion] = s.total;
  }
  double worst_kept = 1e9;
  for (const auto& k : f.kept) {
    worst_kept = std::min(worst_kept, total[k]);
  }
  for (const auto& r : f.removed) {
    CHECK(total[r] <= worst_kept);
  }
  CHECK(filter_bottom_fraction(a, 0.0).removed.empty());
  CHECK_THROWS_AS(filter_bottom_fraction(a, 1.5), InvalidArgument);

  std::vector<EvalResponse> equal;
  for (int m = 99; m >= 0; --m) {
    equal.push_back(resp("p", motion_name(m), 4, 4));
  }
  const auto fe = filter_bottom_fraction(analyze_responses(equal), 0.10);
  REQUIRE(fe.removed.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(fe.removed[i] == motion_name(i));
  }
  std::vector<std::string> catalogue{"m000", "unrated"};
  CHECK_THROWS_AS(filter_bottom_fraction(analyze_responses(from_means({{1, 1}})), 0.1, &catalogue),
                  InvalidArgument);
}

TEST_CASE("removal count on a grid") {
  for (std::size_t m = 0; m <= 60; ++m) {
    for (int f = 0; f <= 20; ++f) {
      const double frac = f / 20.0;
      std::size_t expect = 0;
      while (expect < m && static_cast<double>(expect) < frac * static_cast<double>(m) - 1e-9) {
        ++expect;
      }
      CHECK(removal_count(frac, m) == expect);
    }
  }
  CHECK(removal_count(0.1, 100) == 10);
  CHECK(removal_count(0.1, 101) == 11);
}

TEST_CASE("manifest round trip") {
  FilterManifest m;
  m.fraction = 0.1;
  m.removed = {"b", "a"};
  m.kept = {"c"};
  const auto dir = temp_dir("manifest");
  save_manifest(m, dir / "f.json");
  const auto back = load_manifest(dir / "f.json");
  CHECK(back.removed == m.removed);
  CHECK(back.kept == m.kept);
  CHECK(back.fraction == 0.1);
  write_text_file(dir / "bad.json", R"j({"removed": 3})j");
  CHECK_THROWS_AS(load_manifest(dir / "bad.json"), ParseError);
}

TEST_CASE("canonical views") {
  const auto v = canonical_views(Vec3(1, 0, 0), 4.0);
  REQUIRE(v.size() == 4);
  CHECK(v[0].name == "oblique_top_45");
  CHECK(v[1].name == "top");
  CHECK(v[2].name == "side");
  CHECK(v[3].name == "front");
  for (const auto& x : v) {
    CHECK((x.position - x.target).norm() == doctest::Approx(4.0));
    CHECK(x.target == Vec3(1, 0, 0));
  }
  const Vec3 d = (v[0].position - v[0].target).normalized();
  CHECK(std::asin(d.y()) == doctest::Approx(kPi / 4));
}

TEST_CASE("service and http endpoints") {
  const auto dir = temp_dir("service");
  const auto sk = default_skeleton();
  write_demo_motions(dir / "motions", 4, 1, sk);
  EvalService svc(dir / "motions", dir / "responses.jsonl");
  const auto ids = svc.motion_ids();
  REQUIRE(ids.size() == 4);
  const auto views = svc.motion_views(ids[0]);
  CHECK(views["frames"].size() == load_motion(dir / "motions" / (ids[0] + ".json"), sk).size());
  CHECK(views["frames"][0].size() == 23);
  CHECK(views["views"].size() == 4);
  CHECK_THROWS_AS(svc.motion_views("nope"), NotFound);

  EvalServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);

  auto r = cli.Get("/api/motions");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body).size() == 4);
  r = cli.Get(("/api/motions/" + ids[1]).c_str());
  REQUIRE(r);
  CHECK(json::parse(r->body)["id"] == ids[1]);
  r = cli.Get("/api/motions/unknown");
  REQUIRE(r);
  CHECK(r->status == 404);
  r = cli.Get("/api/views");
  REQUIRE(r);
  CHECK(json::parse(r->body).size() == 4);

  for (std::size_t i = 0; i < ids.size(); ++i) {
    const json body = {{"participant", "p1"}, {"motion", ids[i]}, {"ease", 1 + static_cast<int>(i)},
                       {"frequency", 2}, {"seen_before", "yes"}, {"timestamp", "t"}};
    r = cli.Post("/api/responses", body.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
  }
  const json bad = {{"participant", "p1"}, {"motion", ids[0]}, {"ease", 9}, {"frequency", 2},
                    {"seen_before", "no"}};
  r = cli.Post("/api/responses", bad.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);
  r = cli.Post("/api/responses", "{not json", "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);
  const json unknown = {{"participant", "p1"}, {"motion", "ghost"}, {"ease", 2}, {"frequency", 2},
                        {"seen_before", "no"}};
  r = cli.Post("/api/responses", unknown.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 404);

  r = cli.Get("/api/responses?participant=p1");
  REQUIRE(r);
  CHECK(json::parse(r->body).size() == 4);
  r = cli.Get("/api/responses?participant=other");
  REQUIRE(r);
  CHECK(json::parse(r->body).empty());
  r = cli.Get("/api/analysis");
  REQUIRE(r);
  CHECK(json::parse(r->body)["motions"].size() == 4);
  r = cli.Get("/api/filter?fraction=0.25");
  REQUIRE(r);
  const auto manifest = json::parse(r->body);
  REQUIRE(manifest["removed"].size() == 1);
  CHECK(manifest["removed"][0] == ids[0]);
  r = cli.Get("/api/filter?fraction=abc");
  REQUIRE(r);
  CHECK(r->status == 400);
  server.stop();
  CHECK(load_responses(dir / "responses.jsonl").size() == 4);
}
