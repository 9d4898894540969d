#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "somdsa/errors.hpp"
#include "somdsa/model.hpp"
#include "somdsa/rng.hpp"
#include "somdsa/scenario.hpp"
#include "test_util.hpp"

using namespace somdsa;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("pair distance distribution endpoints and continuity") {
  CHECK(scenario::pair_distance_cdf(0.0) == 0.0);
  CHECK(scenario::pair_distance_cdf(-0.5) == 0.0);
  CHECK(scenario::pair_distance_cdf(std::sqrt(2.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(scenario::pair_distance_cdf(5.0) == 1.0);

  const double below = scenario::pair_distance_cdf(1.0 - 1e-9);
  const double above = scenario::pair_distance_cdf(1.0 + 1e-9);
  CHECK(std::abs(above - below) < 1e-6);

  double prev = 0.0;
  for (double r = 0.0; r <= 1.4143; r += 0.01) {
    const double f = scenario::pair_distance_cdf(r);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("pair distance distribution matches sampling") {
  Rng rng(123);
  const int trials = 200000;
  for (double r : {0.3, 0.7, 1.1}) {
    int hits = 0;
    Rng local(static_cast<std::uint64_t>(r * 1000));
    for (int i = 0; i < trials; ++i) {
      const double dx = local.unit() - local.unit();
      const double dy = local.unit() - local.unit();
      if (dx * dx + dy * dy <= r * r) ++hits;
    }
    const double freq = static_cast<double>(hits) / trials;
    CHECK(scenario::pair_distance_cdf(r) == doctest::Approx(freq).epsilon(0.02));
  }
  (void)rng;
}

TEST_CASE("radius calibration inverts the distribution") {
  CHECK(scenario::radius_for_density(0.0) == 0.0);
  CHECK(scenario::radius_for_density(-1.0) == 0.0);
  CHECK(scenario::radius_for_density(1.0) == doctest::Approx(std::sqrt(2.0)));
  for (double d = 0.1; d < 0.95; d += 0.1) {
    const double r = scenario::radius_for_density(d);
    CHECK(scenario::pair_distance_cdf(r) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("generated instances are valid and deterministic") {
  const auto a = scenario::generate_instance(5, 4, 0.5, 1, 2, 7);
  const auto b = scenario::generate_instance(5, 4, 0.5, 1, 2, 7);
  CHECK(model::instance_fingerprint(a) == model::instance_fingerprint(b));
  CHECK(model::validate(a).empty());
  REQUIRE(a.geometry.has_value());
  CHECK(a.geometry->positions.size() == 5);
  for (int n = 0; n < 5; ++n) {
    CHECK(a.R[n] >= 1);
    CHECK(a.R[n] <= 2);
  }

  const auto c = scenario::generate_instance(5, 4, 0.5, 1, 2, 8);
  CHECK(model::instance_fingerprint(a) != model::instance_fingerprint(c));
}

TEST_CASE("density extremes") {
  const auto quiet = scenario::generate_instance(6, 3, 0.0, 1, 1, 3);
  for (int v : quiet.I.v) CHECK(v == 0);

  const auto dense = scenario::generate_instance(6, 3, 1.0, 1, 1, 3);
  for (int n = 0; n < 6; ++n) {
    for (int k = 0; k < 6; ++k) {
      if (n == k) continue;
      CHECK(dense.I.at(n, k, 0) == 1);
    }
  }
}

TEST_CASE("generator validates its configuration") {
  CHECK_THROWS_AS(scenario::generate_instance(0, 3, 0.5, 1, 1, 0),
                  ConfigError);
  CHECK_THROWS_AS(scenario::generate_instance(3, 3, 1.5, 1, 1, 0),
                  ConfigError);
  CHECK_THROWS_AS(scenario::generate_instance(3, 3, 0.5, 2, 1, 0),
                  ConfigError);
  CHECK_THROWS_AS(scenario::generate_instance(3, 3, 0.5, 1, 4, 0),
                  ConfigError);
  CHECK_THROWS_AS(scenario::generate_instance(3, 3, 0.5, -1, 1, 0),
                  ConfigError);
}

TEST_CASE("opportunities follow the two-disc rule") {
  const std::array<double, 2> tx{0.2, 0.2};
  const std::array<double, 2> rx{0.8, 0.2};

  CHECK(scenario::identify_opportunities(tx, rx, {}, 3) ==
        std::vector<int>{0, 1, 2});

  scenario::PrimaryUser pu_tx;
  pu_tx.id = 1;
  pu_tx.position = {0.8, 0.3};
  pu_tx.role = scenario::PuRole::transmitter;
  pu_tx.active_channel = 1;
  pu_tx.r_tx = 0.2;
  pu_tx.r_rx = 0.2;
  CHECK(scenario::identify_opportunities(tx, rx, {pu_tx}, 3) ==
        std::vector<int>{0, 2});

  scenario::PrimaryUser pu_rx = pu_tx;
  pu_rx.role = scenario::PuRole::receiver;
  pu_rx.active_channel = 0;
  pu_rx.position = {0.25, 0.2};
  CHECK(scenario::identify_opportunities(tx, rx, {pu_rx}, 3) ==
        std::vector<int>{1, 2});

  // An idle PU blocks nothing.
  scenario::PrimaryUser idle = pu_tx;
  idle.active_channel.reset();
  CHECK(scenario::identify_opportunities(tx, rx, {idle}, 3) ==
        std::vector<int>{0, 1, 2});

  // A distant PU blocks nothing.
  scenario::PrimaryUser far = pu_tx;
  far.position = {10.0, 10.0};
  CHECK(scenario::identify_opportunities(tx, rx, {far}, 3) ==
        std::vector<int>{0, 1, 2});
}

TEST_CASE("removing a blocker never shrinks the opportunity set") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const int C = 1 + static_cast<int>(rng.below(5));
    const std::array<double, 2> tx{rng.unit(), rng.unit()};
    const std::array<double, 2> rx{rng.unit(), rng.unit()};
    std::vector<scenario::PrimaryUser> pus;
    const int count = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < count; ++i) {
      scenario::PrimaryUser pu;
      pu.id = i;
      pu.position = {rng.unit(), rng.unit()};
      pu.role = rng.below(2) == 0 ? scenario::PuRole::transmitter
                                  : scenario::PuRole::receiver;
      pu.active_channel = static_cast<int>(rng.below(C));
      pu.r_tx = 0.1 + rng.unit();
      pu.r_rx = 0.1 + rng.unit();
      pus.push_back(pu);
    }
    const auto full = scenario::identify_opportunities(tx, rx, pus, C);
    auto fewer = pus;
    fewer.pop_back();
    const auto reduced = scenario::identify_opportunities(tx, rx, fewer, C);
    for (int m : full) {
      CHECK(std::find(reduced.begin(), reduced.end(), m) != reduced.end());
    }
  }
}

TEST_CASE("sensing fusion is conservative") {
  CHECK(scenario::fuse_sensing({{0, 0, 0}, {0, 0, 0}}, 3) ==
        std::vector<std::uint8_t>{1, 1, 1});
  CHECK(scenario::fuse_sensing({{0, 0, 0}, {0, 0, 1}}, 3) ==
        std::vector<std::uint8_t>{1, 1, 0});
  CHECK(scenario::fuse_sensing({}, 3) == std::vector<std::uint8_t>{1, 1, 1});
  CHECK_THROWS_AS(scenario::fuse_sensing({{0, 0}}, 3), ShapeError);

  Rng rng(66);
  for (int trial = 0; trial < 30; ++trial) {
    const int C = 1 + static_cast<int>(rng.below(6));
    std::vector<std::vector<std::uint8_t>> maps(1 + rng.below(4));
    for (auto& m : maps) {
      m.resize(C);
      for (int i = 0; i < C; ++i) m[i] = rng.below(2) ? 1 : 0;
    }
    const auto fused = scenario::fuse_sensing(maps, C);
    for (const auto& m : maps) {
      for (int i = 0; i < C; ++i) {
        if (m[i]) CHECK(fused[i] == 0);
      }
    }
  }
}

TEST_CASE("event streams round trip with 1-based indices") {
  const std::string text =
      "{\"t\":0,\"kind\":\"demand_change\",\"sc\":2,\"new_r\":0}\n"
      "\n"
      "{\"t\":5,\"kind\":\"pu_arrival\",\"id\":1,\"channel\":2,"
      "\"position\":[0.4,0.6],\"radius\":0.3}\n"
      "{\"t\":9,\"kind\":\"pu_departure\",\"ref\":1}\n";
  const auto events = scenario::parse_events_jsonl(text);
  REQUIRE(events.size() == 3);

  const auto* dc = std::get_if<scenario::DemandChange>(&events[0].body);
  REQUIRE(dc != nullptr);
  CHECK(dc->sc == 1);
  CHECK(dc->new_r == 0);

  const auto* ar = std::get_if<scenario::PuArrival>(&events[1].body);
  REQUIRE(ar != nullptr);
  CHECK(events[1].t == 5);
  CHECK(ar->channel == 1);
  REQUIRE(ar->position.has_value());
  CHECK((*ar->position)[0] == 0.4);
  CHECK(*ar->radius == 0.3);

  const auto* dep = std::get_if<scenario::PuDeparture>(&events[2].body);
  REQUIRE(dep != nullptr);
  CHECK(dep->ref == 1);

  const auto again =
      scenario::parse_events_jsonl(scenario::events_to_jsonl_text(events));
  REQUIRE(again.size() == 3);
  CHECK(std::get<scenario::PuArrival>(again[1].body).channel == 1);
}

TEST_CASE("event stream rejections") {
  CHECK_THROWS_AS(scenario::parse_events_jsonl("{\"t\":1}\n"), ParseError);
  CHECK_THROWS_AS(
      scenario::parse_events_jsonl("{\"t\":1,\"kind\":\"teleport\"}\n"),
      ParseError);
  CHECK_THROWS_AS(scenario::parse_events_jsonl(
                      "{\"t\":1,\"kind\":\"pu_departure\",\"ref\":1,"
                      "\"extra\":2}\n"),
                  ParseError);
  CHECK_THROWS_AS(scenario::parse_events_jsonl(
                      "{\"t\":1,\"kind\":\"pu_arrival\",\"id\":1,"
                      "\"channel\":1,\"position\":[0,0]}\n"),
                  ParseError);
  CHECK_THROWS_AS(scenario::parse_events_jsonl(
                      "{\"t\":1,\"kind\":\"pu_arrival\",\"id\":1,"
                      "\"channel\":0}\n"),
                  ParseError);
  CHECK_THROWS_AS(scenario::parse_events_jsonl(
                      "{\"t\":-1,\"kind\":\"pu_departure\",\"ref\":1}\n"),
                  ParseError);
  CHECK_THROWS_AS(scenario::parse_events_jsonl("not json\n"), ParseError);

  const std::string decreasing =
      "{\"t\":5,\"kind\":\"pu_departure\",\"ref\":1}\n"
      "{\"t\":4,\"kind\":\"pu_departure\",\"ref\":2}\n";
  CHECK_THROWS_AS(scenario::parse_events_jsonl(decreasing), ValidationError);

  CHECK_THROWS_AS(scenario::load_events_file("/nonexistent/events.jsonl"),
                  ParseError);
}

TEST_SUITE_END();
