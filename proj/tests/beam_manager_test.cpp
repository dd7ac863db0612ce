#include <gtest/gtest.h>

#include <random>

#include "beamlab/beam_manager.hpp"
#include "beamlab/error.hpp"

using namespace beamlab;

namespace {

const safe_zone zone{{{0, 0}, {3, 0}}, 1.0};

detection at(double x, double y, double t = 0.0, double r = 0.25) {
  return {"p", {x, y}, r, t, sensor_kind::lidar};
}

manager_state initial() {
  manager_state s;
  s.los_beam = 11;
  s.nlos_beam = 6;
  return s;
}

}  // namespace

TEST(SafeZone, breach_examples) {
  EXPECT_TRUE(safe_zone_breach(zone, at(1.5, 0.8)));
  EXPECT_FALSE(safe_zone_breach(zone, at(1.5, 1.5)));
  EXPECT_FALSE(safe_zone_breach(zone, at(4.5, 0.0)));
  EXPECT_TRUE(safe_zone_breach(zone, at(1.5, 1.25)));  // boundary counts
  EXPECT_TRUE(safe_zone_breach(zone, at(-1.0, 0.5)));
}

TEST(ManagerStep, breach_switches_to_nlos) {
  auto [s, d] = step(initial(), zone, {at(1.5, 0.8, 1.0)}, 1.0);
  ASSERT_TRUE(d);
  EXPECT_EQ(*d, (beam_decision{1.0, 6, path_kind::nlos, decision_reason::breach}));
  EXPECT_EQ(s.active_link, path_kind::nlos);
  EXPECT_EQ(s.active_beam(), 6);
  EXPECT_EQ(s.clear_counter, 0);
}

TEST(ManagerStep, persistent_breach_does_not_flap) {
  auto s = step(initial(), zone, {at(1.5, 0.0)}, 0.0).first;
  for (int f = 1; f < 10; ++f) {
    auto [n, d] = step(s, zone, {at(1.5, 0.0, f * 0.05)}, f * 0.05);
    EXPECT_FALSE(d);
    EXPECT_EQ(n.clear_counter, 0);
    s = n;
  }
}

TEST(ManagerStep, hysteresis_clear) {
  auto s = step(initial(), zone, {at(1.5, 0.0)}, 0.0).first;
  for (int f = 1; f <= 4; ++f) {
    auto [n, d] = step(s, zone, {}, f * 0.05);
    EXPECT_FALSE(d);
    EXPECT_EQ(n.clear_counter, f);
    s = n;
  }
  auto [n, d] = step(s, zone, {}, 0.25);
  ASSERT_TRUE(d);
  EXPECT_EQ(*d, (beam_decision{0.25, 11, path_kind::los, decision_reason::clear}));
  EXPECT_EQ(n.active_link, path_kind::los);
  EXPECT_EQ(n.clear_counter, 0);
}

TEST(ManagerStep, breach_resets_counter) {
  auto s = step(initial(), zone, {at(1.5, 0.0)}, 0.0).first;
  s = step(s, zone, {}, 0.05).first;
  s = step(s, zone, {}, 0.10).first;
  EXPECT_EQ(s.clear_counter, 2);
  s = step(s, zone, {at(1.5, 0.5, 0.15)}, 0.15).first;
  EXPECT_EQ(s.clear_counter, 0);
  EXPECT_EQ(s.active_link, path_kind::nlos);
}

TEST(ManagerStep, quiet_los_stays) {
  auto [s, d] = step(initial(), zone, {at(1.5, 3.0)}, 0.0);
  EXPECT_FALSE(d);
  EXPECT_EQ(s, initial());
}

TEST(ManagerStep, future_detection_rejected) {
  EXPECT_THROW(step(initial(), zone, {at(1.5, 3.0, 1.0)}, 0.5), error);
}

TEST(ManagerProperty, deterministic_and_no_flapping) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> y(-2.5, 2.5);
  std::bernoulli_distribution present(0.6);
  for (int run = 0; run < 200; ++run) {
    manager_state s = initial();
    s.hysteresis_frames = run % 7;
    int clears_since_breach = -1;
    for (int f = 0; f < 200; ++f) {
      const double t = f * 0.05;
      std::vector<detection> dets;
      if (present(rng)) dets.push_back(at(1.5, y(rng), t));
      const auto a = step(s, zone, dets, t);
      const auto b = step(s, zone, dets, t);
      ASSERT_EQ(a.first, b.first);
      ASSERT_EQ(a.second, b.second);
      const bool breached = !dets.empty() && safe_zone_breach(zone, dets[0]);
      if (s.active_link == path_kind::nlos && !breached) ++clears_since_breach;
      if (breached) clears_since_breach = 0;
      if (a.second && a.second->reason == decision_reason::clear)
        EXPECT_GE(clears_since_breach, s.hysteresis_frames);
      EXPECT_LE(a.first.clear_counter, a.first.hysteresis_frames);
      s = a.first;
    }
  }
}

TEST(SelectStrongest, examples) {
  EXPECT_EQ(select_strongest({{0, 9, -80}, {1, 11, -53}, {2, 13, -80}, {3, 15, -90}}), 11);
  EXPECT_EQ(select_strongest({{4, 7, -70}}), 7);
  EXPECT_EQ(select_strongest({{5, 8, -60}, {2, 3, -60}, {1, 1, -61}}), 3);
  try {
    select_strongest({});
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::selection);
  }
}

TEST(SelectStrongest, matches_brute_force) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> level(-5, 0);  // coarse levels force ties
  for (int c = 0; c < 2000; ++c) {
    std::vector<ssb_measurement> ms;
    std::vector<int> idx(64);
    for (int i = 0; i < 64; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const int n = 1 + c % 12;
    for (int i = 0; i < n; ++i) ms.push_back({idx[i], idx[i] % 16, 1.0 * level(rng)});
    int best_idx = -1;
    double best = -1e300;
    int beam = -1;
    for (const auto& m : ms)
      if (m.rsrp_dbm > best || (m.rsrp_dbm == best && m.ssb_index < best_idx)) {
        best = m.rsrp_dbm;
        best_idx = m.ssb_index;
        beam = m.beam_id;
      }
    EXPECT_EQ(select_strongest(ms), beam);
  }
}

TEST(SweepSelect, repoints_active_link) {
  const auto s = initial();
  auto [same, none] = sweep_select(s, {{0, 11, -53}, {1, 9, -70}}, 1.0);
  EXPECT_FALSE(none);
  EXPECT_EQ(same, s);

  auto [moved, d] = sweep_select(s, {{0, 11, -70}, {1, 12, -53}}, 2.0);
  ASSERT_TRUE(d);
  EXPECT_EQ(*d, (beam_decision{2.0, 12, path_kind::los, decision_reason::sweep_select}));
  EXPECT_EQ(moved.los_beam, 12);
  EXPECT_EQ(moved.nlos_beam, 6);
}
