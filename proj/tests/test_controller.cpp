#include "tropism/controller.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tropism;

namespace {

ControllerConfig config() {
  ControllerConfig c;
  c.a_max = 0.04;
  c.delta_a = 0.008;
  c.a0 = 0.008;
  c.kappa_max = 12.0;
  return c;
}

const ActuationConfig kAct{};

Observation seen(std::optional<double> distance, bool contact = false, double kappa = 0.0) {
  Observation o;
  o.readings = {{1, distance}, {2, std::nullopt}, {3, std::nullopt}};
  o.contact = contact;
  o.distal_kappa = kappa;
  return o;
}

KnowledgeEntry entry(long step, std::optional<double> reading) {
  KnowledgeEntry e;
  e.step = step;
  e.psi = 0.01 * static_cast<double>(step);
  e.best_reading = reading;
  e.best_sensor = reading ? 1 : 0;
  return e;
}

// Runs exploration, answering each command with `reading(step)`.
template <typename Reading>
Controller explored(const ControllerConfig& cfg, Reading reading) {
  Controller c(cfg, kAct);
  std::optional<Observation> obs;
  long step = 0;
  while (std::holds_alternative<phase::Exploring>(c.phase())) {
    const auto out = c.tick(obs);
    if (!out.command) break;
    obs = seen(reading(step++));
  }
  return c;
}

}  // namespace

TEST(ControllerConfig, Validation) {
  const ActuationLimits limits;
  EXPECT_NO_THROW(config().validate(limits));
  auto bad = config();
  bad.delta_a = 0.011;
  EXPECT_THROW(bad.validate(limits), ValidationError);
  bad = config();
  bad.a0 = 0.02;  // 0.02 + 4 * 0.008 > a_max
  EXPECT_THROW(bad.validate(limits), ValidationError);
  bad = config();
  bad.reach_rate = 0.0;
  EXPECT_THROW(bad.validate(limits), ValidationError);
  bad = config();
  bad.kappa_max = 0.0;
  EXPECT_THROW(bad.validate(limits), ValidationError);
  bad = config();
  bad.a_max = 0.06;
  EXPECT_THROW(bad.validate(limits), ValidationError);
}

TEST(Circumnutation, OneRotationClosesAndRaisesAmplitudeOnce) {
  const auto cfg = config();
  auto state = ExplorationState::start(cfg);
  for (int i = 0; i < 100; ++i) state = circumnutation_step(state, cfg, kAct).next;
  EXPECT_EQ(state.psi, 0.0);
  EXPECT_EQ(state.step_in_rotation, 0);
  EXPECT_EQ(state.rotation_index, 1);
  EXPECT_NEAR(state.amplitude, cfg.a0 + cfg.delta_a, 1e-15);
}

TEST(Circumnutation, UniformCounterClockwiseSpacing) {
  const auto cfg = config();
  auto state = ExplorationState::start(cfg);
  std::vector<double> psi;
  for (int i = 0; i < 100; ++i) {
    const auto step = circumnutation_step(state, cfg, kAct);
    psi.push_back(step.issued.psi);
    state = step.next;
  }
  for (std::size_t i = 1; i < psi.size(); ++i) {
    EXPECT_GT(psi[i], psi[i - 1]);
    EXPECT_NEAR(psi[i] - psi[i - 1], kTwoPi / 100.0, 1e-12);
  }
}

TEST(Circumnutation, TipCirclesCounterClockwise) {
  // Within 30 degrees of a tendon only that tendon pulls, so the tip azimuth
  // dwells there; it never turns back and closes one full turn per rotation.
  const auto cfg = config();
  const auto arm = ArmGeometry::default_arm();
  const auto rest = rest_lengths(arm);
  auto state = ExplorationState::start(cfg);
  double previous = 0.0, unwrapped = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const auto step = circumnutation_step(state, cfg, kAct);
    const Vec3 tip = forward_kinematics(arm, apply_command(arm, rest, *step.command)).tip_position;
    const double az = std::atan2(tip.y(), tip.x());
    if (i > 0) {
      const double delta = std::remainder(az - previous, kTwoPi);
      EXPECT_GE(delta, -1e-12) << "step " << i;
      unwrapped += delta;
    }
    previous = az;
    state = step.next;
  }
  EXPECT_NEAR(unwrapped, kTwoPi, 1e-9);
}

TEST(Circumnutation, ZeroAmplitudeRotationIsStill) {
  auto cfg = config();
  cfg.a0 = 0.0;
  auto state = ExplorationState::start(cfg);
  for (int i = 0; i < 100; ++i) {
    const auto step = circumnutation_step(state, cfg, kAct);
    ASSERT_TRUE(step.command);
    EXPECT_EQ(*step.command, TendonCommand::zero(3));
    state = step.next;
  }
  EXPECT_NEAR(state.amplitude, cfg.delta_a, 1e-15);
}

TEST(Circumnutation, SignalsCompletionAfterLastRotation) {
  const auto cfg = config();
  const auto cmds = exploration_commands(cfg, kAct);
  EXPECT_EQ(cmds.size(), 500u);
  auto state = ExplorationState::start(cfg);
  double peak = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto step = circumnutation_step(state, cfg, kAct);
    ASSERT_TRUE(step.command);
    EXPECT_EQ(*step.command, cmds[static_cast<std::size_t>(i)]);
    peak = std::max(peak, step.issued.amplitude);
    state = step.next;
  }
  EXPECT_LE(peak, cfg.a_max * (1.0 + 1e-12));
  EXPECT_FALSE(circumnutation_step(state, cfg, kAct).command);
}

TEST(Circumnutation, ResistanceOnlyWhenEnabled) {
  auto cfg = config();
  auto first = circumnutation_step(ExplorationState::start(cfg), cfg, kAct);
  EXPECT_EQ(first.command->pulls[0][1], 0.0);
  cfg.exploration_resistance_enabled = true;
  cfg.exploration_restoring = 0.002;
  first = circumnutation_step(ExplorationState::start(cfg), cfg, kAct);
  EXPECT_DOUBLE_EQ(first.command->pulls[0][1], 0.002);
}

TEST(KnowledgeBase, RecordAppends) {
  KnowledgeBase kb;
  EXPECT_TRUE(kb.empty());
  kb.record(entry(0, 0.4));
  EXPECT_EQ(kb.size(), 1u);
  const auto first = kb.entries().front();
  kb.record(entry(1, std::nullopt));
  kb.record(entry(5, 0.2));
  EXPECT_EQ(kb.size(), 3u);
  EXPECT_EQ(kb.entries().front(), first);
  EXPECT_THROW(kb.record(entry(5, 0.1)), InvalidInput);
  EXPECT_THROW(kb.record(entry(2, 0.1)), InvalidInput);
  EXPECT_EQ(kb.size(), 3u);
}

TEST(SelectBest, Examples) {
  KnowledgeBase kb;
  kb.record(entry(3, 0.50));
  kb.record(entry(7, 0.50));
  kb.record(entry(12, 0.61));
  EXPECT_EQ(select_best(kb)->step, 3);

  KnowledgeBase one;
  one.record(entry(4, 0.9));
  EXPECT_EQ(select_best(one)->step, 4);

  KnowledgeBase blind;
  for (long s = 0; s < 5; ++s) blind.record(entry(s, std::nullopt));
  EXPECT_FALSE(select_best(blind));

  EXPECT_THROW(select_best(KnowledgeBase{}), InvalidInput);
}

TEST(SelectBest, MatchesLinearScan) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    KnowledgeBase kb;
    std::vector<std::optional<double>> raw;
    const int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      std::optional<double> d;
      if (rng() % 4 != 0) d = 0.05 * static_cast<double>(rng() % 20);
      kb.record(entry(2 * i, d));
      raw.push_back(d);
    }
    const auto want = oracle::argmin(raw);
    const auto got = select_best(kb);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_EQ(got->step, 2 * static_cast<long>(*want));
    }
  }
}

TEST(ReachingStep, AdvancesAmplitudeAtFixedAzimuth) {
  const auto cfg = config();
  ReachingState s;
  s.psi = 1.1;
  s.amplitude = 0.020;
  auto step = reaching_step(s, cfg, kAct, 0.0);
  EXPECT_EQ(step.amplitude, 0.020);
  EXPECT_EQ(step.next.psi, 1.1);
  EXPECT_NEAR(step.next.amplitude, 0.021, 1e-15);
  EXPECT_EQ(step.next.steps, 1);
  EXPECT_EQ(step.next.saturated_steps, 0);
  EXPECT_EQ(step.command, compose_command(1.1, 0.020, cfg.mode, 0.0, cfg.kappa_max, kAct));
}

TEST(ReachingStep, UsesCurrentCurvatureForResistance) {
  const auto cfg = config();
  ReachingState s;
  s.amplitude = 0.02;
  const auto relaxed = reaching_step(s, cfg, kAct, 0.0).command;
  const auto resisted = reaching_step(s, cfg, kAct, 6.0).command;
  EXPECT_EQ(relaxed.pulls[0][1], 0.0);
  EXPECT_DOUBLE_EQ(resisted.pulls[0][1], 0.01);
  EXPECT_DOUBLE_EQ(resisted.pulls[0][0], 0.02);
}

TEST(ReachingStep, HoldsAtMaximumAndCountsSaturation) {
  const auto cfg = config();
  ReachingState s;
  s.amplitude = cfg.a_max - 0.0005;
  s = reaching_step(s, cfg, kAct, 0.0).next;
  EXPECT_EQ(s.amplitude, cfg.a_max);
  EXPECT_EQ(s.saturated_steps, 0);
  for (int i = 0; i < 3; ++i) {
    const auto step = reaching_step(s, cfg, kAct, 0.0);
    EXPECT_EQ(step.amplitude, cfg.a_max);
    s = step.next;
  }
  EXPECT_EQ(s.saturated_steps, 3);
}

TEST(Controller, ExplorationIgnoresObservations) {
  const auto cfg = config();
  const auto expected = exploration_commands(cfg, kAct);
  std::mt19937_64 rng(43);
  for (int variant = 0; variant < 3; ++variant) {
    Controller c(cfg, kAct);
    std::optional<Observation> obs;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto out = c.tick(obs);
      ASSERT_TRUE(out.command);
      EXPECT_EQ(*out.command, expected[i]);
      std::optional<double> d;
      if (variant == 1) d = oracle::uniform(rng, 0.1, 1.9);
      if (variant == 2 && i % 7 == 0) d = 0.3;
      obs = seen(d, false, oracle::uniform(rng, 0.0, 12.0));
    }
  }
}

TEST(Controller, RecordsOneEntryPerExplorationCommand) {
  const auto cfg = config();
  auto c = explored(cfg, [](long) { return std::optional<double>(0.7); });
  ASSERT_TRUE(std::holds_alternative<phase::Reaching>(c.phase()));
  EXPECT_EQ(c.knowledge().size(), 500u);
  for (std::size_t i = 0; i < c.knowledge().size(); ++i) EXPECT_EQ(c.knowledge().entries()[i].step, static_cast<long>(i));
}

TEST(Controller, ReachesFromTheClosestExplorationEntry) {
  const auto cfg = config();
  Controller c(cfg, kAct);
  std::optional<Observation> obs;
  TickOutput out;
  for (long step = 0;; ++step) {
    out = c.tick(obs);
    if (!std::holds_alternative<phase::Exploring>(c.phase())) break;
    std::optional<double> d;
    if (step == 3 || step == 7) d = 0.50;
    if (step == 12) d = 0.61;
    obs = seen(d);
  }
  const auto* reaching = std::get_if<phase::Reaching>(&c.phase());
  ASSERT_NE(reaching, nullptr);
  EXPECT_EQ(reaching->state.selected.step, 3);
  ASSERT_TRUE(out.command);
  EXPECT_DOUBLE_EQ(out.psi, kTwoPi * 3 / 100.0);
  EXPECT_DOUBLE_EQ(out.amplitude, cfg.a0);
  ASSERT_EQ(out.events.size(), 1u);
  EXPECT_EQ(out.events[0].from, "exploring");
  EXPECT_EQ(out.events[0].to, "reaching");
  EXPECT_EQ(out.events[0].step, 500);

  const auto kb_size = c.knowledge().size();
  const auto done = c.tick(seen(0.2, true));
  EXPECT_TRUE(std::holds_alternative<phase::Contact>(c.phase()));
  EXPECT_TRUE(c.finished());
  EXPECT_FALSE(done.command);
  EXPECT_EQ(c.knowledge().size(), kb_size);
}

TEST(Controller, ProximityWithinToleranceCountsAsContact) {
  const auto cfg = config();
  auto c = explored(cfg, [](long s) { return s == 40 ? std::optional<double>(0.3) : std::nullopt; });
  c.tick(seen(0.3));
  ASSERT_TRUE(std::holds_alternative<phase::Reaching>(c.phase()));
  c.tick(seen(0.004));
  EXPECT_TRUE(std::holds_alternative<phase::Contact>(c.phase()));
}

TEST(Controller, FailsWithoutAnyDetection) {
  auto c = explored(config(), [](long) { return std::optional<double>(); });
  const auto* failed = std::get_if<phase::Failed>(&c.phase());
  ASSERT_NE(failed, nullptr);
  EXPECT_EQ(failed->reason, "no detection during exploration");
  EXPECT_EQ(c.steps_issued(), 500);
}

TEST(Controller, FailsAfterSaturatingWithoutContact) {
  const auto cfg = config();
  auto c = explored(cfg, [](long s) { return s == 10 ? std::optional<double>(0.8) : std::nullopt; });
  long reaching_commands = 1;  // the first one is issued when exploration ends
  std::optional<Observation> obs = seen(0.8);
  while (!c.finished()) {
    const auto out = c.tick(obs);
    if (out.command) ++reaching_commands;
    obs = seen(0.8);
    ASSERT_LT(reaching_commands, 1000);
  }
  const auto* failed = std::get_if<phase::Failed>(&c.phase());
  ASSERT_NE(failed, nullptr);
  EXPECT_EQ(failed->reason, "amplitude saturated without contact");
  // ramp from a0 to a_max at reach_rate, then max_reach_steps at the limit
  const long ramp = std::lround((cfg.a_max - cfg.a0) / cfg.reach_rate);
  EXPECT_EQ(reaching_commands, ramp + cfg.max_reach_steps);
}

TEST(Controller, PhasesOnlyMoveForward) {
  std::mt19937_64 rng(47);
  const auto cfg = config();
  for (int trial = 0; trial < 20; ++trial) {
    Controller c(cfg, kAct);
    std::optional<Observation> obs;
    int last = 0;
    while (!c.finished()) {
      const auto out = c.tick(obs);
      const int now = static_cast<int>(c.phase().index());
      EXPECT_GE(now, last);
      if (last == 1) {
        EXPECT_NE(now, 0);
      }
      last = now;
      std::optional<double> d;
      if (rng() % 5 == 0) d = oracle::uniform(rng, 0.0, 1.0);
      obs = seen(d, last == 1 && rng() % 30 == 0);
      ASSERT_LT(c.steps_issued(), 2000);
    }
  }
}
