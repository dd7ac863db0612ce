#include <gtest/gtest.h>

#include <random>
#include <set>

#include "beamlab/error.hpp"
#include "beamlab/ssb.hpp"
#include "beamlab/transceiver.hpp"

using namespace beamlab;

namespace {

std::string four_enabled() { return "1111" + std::string(60, '0'); }

ssb_bitmap random_bitmap(std::mt19937_64& rng) {
  std::bitset<max_ssb> bits(rng());
  return ssb_bitmap(bits);
}

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no beamlab::error thrown";
  return errc::io;
}

const std::map<int, int> sweep_weights{{0, 9}, {1, 11}, {2, 13}, {3, 15}};

}  // namespace

TEST(SsbBitmap, parse_examples) {
  EXPECT_EQ(ssb_bitmap::parse(four_enabled()).enabled_indices(), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_TRUE(ssb_bitmap::parse(std::string(64, '0')).enabled_indices().empty());
  EXPECT_EQ(ssb_bitmap::parse("1" + std::string(62, '0') + "1").enabled_indices(),
            (std::vector<int>{0, 63}));
}

TEST(SsbBitmap, parse_errors) {
  EXPECT_EQ(code_of([] { ssb_bitmap::parse("1111"); }), errc::parse);
  EXPECT_EQ(code_of([] { ssb_bitmap::parse(std::string(65, '0')); }), errc::parse);
  EXPECT_EQ(code_of([] { ssb_bitmap::parse("2" + std::string(63, '0')); }), errc::parse);
}

TEST(SsbConfig, build_examples) {
  const auto bm = ssb_bitmap::parse(four_enabled());
  EXPECT_NO_THROW(build_ssb_config(bm, true, sweep_weights, 0));
  const auto fixed = build_ssb_config(bm, false, {}, 11);
  EXPECT_FALSE(fixed.analog_beamforming);
  EXPECT_EQ(fixed.fixed_beam, 11);

  auto missing = sweep_weights;
  missing.erase(2);
  EXPECT_EQ(code_of([&] { build_ssb_config(bm, true, missing, 0); }), errc::configuration);
  // 64 slots of 125 us is 8 ms; the period must be strictly longer.
  EXPECT_EQ(code_of([&] { build_ssb_config(bm, false, {}, 11, 8e-3, 125e-6); }),
            errc::configuration);
  EXPECT_EQ(code_of([&] { build_ssb_config(bm, false, {}, 11, 20e-3, 0.0); }), errc::configuration);
}

TEST(SsbSchedule, slot_times) {
  const auto cfg = build_ssb_config(ssb_bitmap::parse(four_enabled()), true, sweep_weights, 0,
                                    0.1, 1e-3);
  const auto burst = schedule_burst(cfg, 0.0);
  ASSERT_EQ(burst.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(burst[i].ssb_index, i);
    EXPECT_DOUBLE_EQ(burst[i].start_time, i * 1e-3);
    EXPECT_EQ(burst[i].beam_id, sweep_weights.at(i));
  }
}

TEST(SsbSchedule, fixed_and_empty) {
  const auto fixed = build_ssb_config(ssb_bitmap::parse(four_enabled()), false, sweep_weights, 11);
  for (const auto& tx : schedule_burst(fixed, 0.5)) EXPECT_EQ(tx.beam_id, 11);
  const auto empty = build_ssb_config(ssb_bitmap{}, true, {}, 0);
  EXPECT_TRUE(schedule_burst(empty, 0.0).empty());
}

TEST(SsbApply, register_writes) {
  auto cb = std::make_shared<const beam_codebook>(make_default_codebook());
  const auto bm = ssb_bitmap::parse(four_enabled());

  transceiver sweep({}, cb, 0);
  for (const auto& tx : schedule_burst(build_ssb_config(bm, true, sweep_weights, 0), 0.0))
    apply_ssb(sweep, tx);
  std::vector<std::uint32_t> values;
  for (const auto& t : sweep.spi_log()) {
    EXPECT_EQ(t.reg, reg_bf_tx_awv_ptr);
    values.push_back(t.value);
  }
  EXPECT_EQ(values, (std::vector<std::uint32_t>{9, 11, 13, 15}));
  EXPECT_EQ(sweep.mode(), trx_mode::tx);

  transceiver fixed({}, cb, 0);
  for (const auto& tx : schedule_burst(build_ssb_config(bm, false, {}, 11), 0.0))
    apply_ssb(fixed, tx);
  ASSERT_EQ(fixed.spi_log().size(), 4u);
  for (const auto& t : fixed.spi_log()) EXPECT_EQ(t.value, 11u);

  transceiver idle({}, cb, 0);
  for (const auto& tx : schedule_burst(build_ssb_config(ssb_bitmap{}, false, {}, 11), 0.0))
    apply_ssb(idle, tx);
  EXPECT_TRUE(idle.spi_log().empty());
}

TEST(SsbApply, invalid_beam_propagates) {
  auto cb = std::make_shared<const beam_codebook>(make_default_codebook());
  transceiver t({}, cb, 0);
  EXPECT_EQ(code_of([&] { apply_ssb(t, {0, 99, 0.0}); }), errc::codebook);
}

TEST(SsbProperty, count_period_roundtrip) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> start(0.0, 100.0);
  std::uniform_int_distribution<int> beam(0, 15);
  for (int c = 0; c < 2000; ++c) {
    const auto bm = random_bitmap(rng);
    EXPECT_EQ(ssb_bitmap::parse(bm.serialize()), bm);

    std::map<int, int> weights;
    for (int i : bm.enabled_indices()) weights[i] = beam(rng);
    const bool analog = c % 2 == 0;
    const int fixed_beam = beam(rng);
    const auto cfg = build_ssb_config(bm, analog, weights, fixed_beam);
    const double t = start(rng);
    const auto a = schedule_burst(cfg, t);
    const auto b = schedule_burst(cfg, t + cfg.burst_period);
    ASSERT_EQ(static_cast<int>(a.size()), bm.popcount());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].ssb_index, b[i].ssb_index);
      EXPECT_EQ(a[i].beam_id, b[i].beam_id);
      EXPECT_NEAR(b[i].start_time - a[i].start_time, cfg.burst_period, 1e-9);
      if (i > 0) EXPECT_LT(a[i - 1].start_time, a[i].start_time);
      EXPECT_TRUE(bm.enabled(a[i].ssb_index));
    }
    if (!analog && !a.empty()) {
      std::set<int> ids;
      for (const auto& tx : a) ids.insert(tx.beam_id);
      EXPECT_EQ(ids, std::set<int>{fixed_beam});
    }
  }
}
