#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace heatcast;
using heatcast::test::date;

namespace {

Dataset day_grid(const char* first, int days) {
  Dataset ds;
  ds.ts = 15;
  const Timestamp t0{date(first)};
  for (int i = 0; i < days * 96; ++i)
    ds.samples.push_back({t0 + std::chrono::minutes{15 * i}, 5.0, 0.0, 100.0});
  return ds;
}

int minute_at(const StepProfile& p, std::size_t transition) { return p.breakpoints[transition].minute; }

}  // namespace

TEST(Schedules, ProfileValue) {
  const StepProfile flat{{{0, 1.0}}};
  EXPECT_DOUBLE_EQ(profile_value(flat, 700), 1.0);
  const StepProfile step{{{0, 0.0}, {480, 1.0}}};
  EXPECT_DOUBLE_EQ(profile_value(step, 479), 0.0);
  EXPECT_DOUBLE_EQ(profile_value(step, 480), 1.0);
  EXPECT_DOUBLE_EQ(profile_value(step, 1439), 1.0);
}

TEST(Schedules, ProfileValidation) {
  EXPECT_THROW(validate(StepProfile{}, "p"), Error);
  EXPECT_THROW(validate(StepProfile{{{10, 1.0}}}, "p"), Error);
  EXPECT_THROW(validate(StepProfile{{{0, 1.0}, {600, 1.0}, {600, 0.0}}}, "p"), Error);
  EXPECT_THROW(validate(StepProfile{{{0, 1.0}, {1440, 0.0}}}, "p"), Error);
  EXPECT_THROW(validate(StepProfile{{{0, 1.0}, {487, 0.0}}}, "p", 15), Error);
  EXPECT_NO_THROW(validate(default_schedule(), 15));
}

TEST(Schedules, DayFlag) {
  const Calendar open;
  EXPECT_DOUBLE_EQ(day_flag(date("2013-01-16"), open), 10.0);  // Wednesday
  EXPECT_DOUBLE_EQ(day_flag(date("2013-01-19"), open), 5.0);   // Saturday
  EXPECT_DOUBLE_EQ(day_flag(date("2013-01-20"), open), 5.0);   // Sunday

  Calendar cal;
  cal.first = date("2013-01-14");
  cal.last = date("2013-02-09");
  cal.overrides[date("2013-01-16")] = DayType::Off;
  EXPECT_THROW(day_flag(date("2013-01-13"), cal), Error);
  EXPECT_THROW(day_flag(date("2013-02-10"), cal), Error);
  EXPECT_DOUBLE_EQ(day_flag(date("2013-01-16"), cal), 5.0);
}

TEST(Schedules, DefaultTransitionTimes) {
  const auto s = default_schedule();
  const std::vector<int> occ{480, 720, 810, 1065};
  const std::vector<int> opw{360, 720, 840, 1200};
  const std::vector<int> opo{360, 1200};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(minute_at(s.occupancy_working, i + 1), occ[i]);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(minute_at(s.oplevel_working, i + 1), opw[i]);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(minute_at(s.oplevel_off, i + 1), opo[i]);
}

TEST(Schedules, ZeroShiftIsIdentity) {
  const auto s = default_schedule();
  EXPECT_EQ(apply_shifts(s, FactorAssignment{}), s);
  const std::vector<int> neutral(10, 1);
  EXPECT_EQ(apply_shifts(s, FactorAssignment::from_levels(neutral, 15)), s);
}

TEST(Schedules, Experiment398) {
  // Table levels 1233112112, stored zero-based.
  const std::vector<int> levels{0, 1, 2, 2, 0, 0, 1, 0, 0, 1};
  const auto s = apply_shifts(default_schedule(), FactorAssignment::from_levels(levels, 15));
  EXPECT_EQ(minute_at(s.occupancy_working, 1), 7 * 60 + 45);
  EXPECT_EQ(minute_at(s.occupancy_working, 2), 12 * 60);
  EXPECT_EQ(minute_at(s.occupancy_working, 3), 13 * 60 + 45);
  EXPECT_EQ(minute_at(s.occupancy_working, 4), 18 * 60);
  EXPECT_EQ(minute_at(s.oplevel_working, 1), 5 * 60 + 45);
  EXPECT_EQ(minute_at(s.oplevel_working, 2), 11 * 60 + 45);
  EXPECT_EQ(minute_at(s.oplevel_working, 3), 14 * 60);
  EXPECT_EQ(minute_at(s.oplevel_working, 4), 19 * 60 + 45);
  EXPECT_EQ(minute_at(s.oplevel_off, 1), 5 * 60 + 45);
  EXPECT_EQ(minute_at(s.oplevel_off, 2), 20 * 60);
}

TEST(Schedules, ShiftsAndNegationCancel) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> lv(0, 2);
  const auto base = default_schedule();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> levels(10);
    for (auto& l : levels) l = lv(rng);
    const auto a = FactorAssignment::from_levels(levels, 15);
    EXPECT_EQ(apply_shifts(apply_shifts(base, a), a.negated()), base);
  }
}

TEST(Schedules, CollisionNamesFactor) {
  auto s = default_schedule();
  FactorAssignment a;
  a.shifts[1] = 90;  // t2 from 12:00 onto t3 at 13:30
  try {
    apply_shifts(s, a);
    FAIL() << "expected a collision";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("f2"), std::string::npos) << e.what();
  }
  // Moving two neighbours together is legal.
  s.occupancy_working.breakpoints = {{0, 0}, {480, 1}, {720, 0.4}, {735, 1}, {1065, 0}};
  FactorAssignment both;
  both.shifts[1] = 15;
  both.shifts[2] = 15;
  EXPECT_NO_THROW(apply_shifts(s, both));
}

TEST(Schedules, FromLevelsRejectsBadInput) {
  EXPECT_THROW(FactorAssignment::from_levels(std::vector<int>(9, 1), 15), Error);
  std::vector<int> bad(10, 1);
  bad[3] = 3;
  EXPECT_THROW(FactorAssignment::from_levels(bad, 15), Error);
}

TEST(Schedules, SampleOffDay) {
  const auto series = sample_schedules(default_schedule(), day_grid("2013-01-19", 1));
  ASSERT_EQ(series.occupancy.size(), 96u);
  for (double v : series.occupancy) EXPECT_DOUBLE_EQ(v, 0.0);
  for (double v : series.dayflag) EXPECT_DOUBLE_EQ(v, 5.0);
}

TEST(Schedules, SampleWorkingDayStepsAtFactorTimes) {
  const auto series = sample_schedules(default_schedule(), day_grid(test::kMonday, 1));
  std::vector<int> steps;
  for (std::size_t i = 1; i < series.occupancy.size(); ++i)
    if (series.occupancy[i] != series.occupancy[i - 1]) steps.push_back(static_cast<int>(i) * 15);
  EXPECT_EQ(steps, (std::vector<int>{480, 720, 810, 1065}));
}

TEST(Schedules, DayFlagSeries) {
  const auto series = sample_schedules(default_schedule(), day_grid("2013-01-18", 2));  // Fri, Sat
  ASSERT_EQ(series.dayflag.size(), 192u);
  for (std::size_t i = 0; i < 96; ++i) EXPECT_DOUBLE_EQ(series.dayflag[i], 10.0);
  for (std::size_t i = 96; i < 192; ++i) EXPECT_DOUBLE_EQ(series.dayflag[i], 5.0);
}

TEST(Schedules, JsonRoundTrip) {
  auto s = apply_shifts(default_schedule(), FactorAssignment::from_levels(
                                                std::vector<int>{0, 1, 2, 2, 0, 0, 1, 0, 0, 1}, 15));
  s.calendar.first = date("2013-01-14");
  s.calendar.last = date("2013-02-09");
  s.calendar.overrides[date("2013-01-21")] = DayType::Off;
  EXPECT_EQ(schedule_from_json(nlohmann::json::parse(to_json(s).dump())), s);
}

TEST(Schedules, JsonDefaultsAndErrors) {
  EXPECT_EQ(schedule_from_json(nlohmann::json::object()), default_schedule());
  EXPECT_THROW(schedule_from_json(nlohmann::json::parse(R"({"occupancy_off": [[0, 0], [600, 1]]})")),
               Error);
  EXPECT_THROW(
      schedule_from_json(nlohmann::json::parse(R"({"calendar": {"overrides": {"2013-01-21": "holiday"}}})")),
      Error);
  EXPECT_THROW(load_schedule("/nonexistent/schedule.json"), Error);
}
