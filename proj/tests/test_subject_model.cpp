#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pi2aan/subject_model.hpp"

using namespace pi2aan;

namespace {

constexpr int kQ = 200;
constexpr int kN = 10;

std::vector<double> bump_only(const BaselineGait& b, const std::vector<double>& target) {
    std::vector<double> out(target.size());
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = target[q] - b.angle[q];
    return out;
}

SubjectParams quiet_params() {
    SubjectParams p;
    p.motor_noise = 0.0;
    return p;
}

}  // namespace

TEST(Baseline, PresetIsPeriodic) {
    EXPECT_EQ(default_ankle_angle(0.0), default_ankle_angle(1.0));
}

TEST(Baseline, SwingPeakInRangeAndSegmentEight) {
    const auto b = BaselineGait::preset("default", kQ);
    double peak = -1e9;
    for (std::size_t q = 0; q < b.angle.size(); ++q) {
        if (b.phase[q] >= std::numbers::pi) peak = std::max(peak, b.angle[q]);
    }
    EXPECT_GE(peak, 5.0);
    EXPECT_LE(peak, 20.0);
    EXPECT_EQ(segment_of(swing_peak_phase(b), kN), 8);
}

TEST(Baseline, UnknownPresetIsRejected) { EXPECT_THROW(BaselineGait::preset("nope", kQ), ConfigError); }

TEST(Baseline, FileIsResampledPeriodically) {
    std::istringstream in("# phase angle\n0.0, 0\n0.25 10\n0.5 0\n0.75 -10\n");
    const auto b = BaselineGait::from_stream(in, 8);
    ASSERT_EQ(b.samples(), 8);
    // x = 1/16: a quarter of the way from 0 to 10
    EXPECT_NEAR(b.angle[0], 2.5, 1e-12);
    // x = 15/16: the wrap segment from -10 back to 0
    EXPECT_NEAR(b.angle[7], -2.5, 1e-12);
}

TEST(Baseline, NonPeriodicFileIsRejected) {
    std::istringstream ramp("0.0 0\n0.2 1\n0.4 2\n0.6 3\n0.8 4\n");
    EXPECT_THROW(BaselineGait::from_stream(ramp, 20), FormatError);
}

TEST(Baseline, MalformedFilesAreRejected) {
    std::istringstream unsorted("0.0 0\n0.5 1\n0.25 2\n0.75 0\n");
    std::istringstream out_of_range("0.0 0\n0.5 1\n0.7 2\n1.0 0\n");
    std::istringstream short_file("0.0 0\n0.5 1\n");
    std::istringstream garbage("0.0 zero\n");
    EXPECT_THROW(BaselineGait::from_stream(unsorted, 20), FormatError);
    EXPECT_THROW(BaselineGait::from_stream(out_of_range, 20), FormatError);
    EXPECT_THROW(BaselineGait::from_stream(short_file, 20), FormatError);
    EXPECT_THROW(BaselineGait::from_stream(garbage, 20), FormatError);
    EXPECT_THROW(BaselineGait::from_file("/nonexistent/baseline.txt", 20), FormatError);
}

TEST(Target, Examples) {
    const auto b = BaselineGait::preset("default", kQ);
    const double center = b.phase[150];
    TargetTask task;
    task.center = center;
    task.amplitude = 0.0;
    EXPECT_EQ(make_target(b, task), b.angle);

    task.amplitude = 5.0;
    const auto t = make_target(b, task);
    EXPECT_NEAR(t[150] - b.angle[150], 5.0, 1e-12);

    // sample the bump at exactly center +/- 3s by choosing s from the grid spacing
    task.width = (b.phase[165] - center) / 3.0;
    const auto wide = make_target(b, task);
    EXPECT_NEAR(wide[165] - b.angle[165], 5.0 * std::exp(-4.5), 1e-12);
    EXPECT_NEAR(wide[135] - b.angle[135], 0.0555, 1e-4);
}

TEST(Target, DefaultFadesInStance) {
    const auto b = BaselineGait::preset("default", kQ);
    const auto bump = bump_only(b, make_target(b, TargetTask{}));
    for (std::size_t q = 0; q < bump.size(); ++q) {
        if (b.phase[q] < 0.55 * kTwoPi) {
            EXPECT_LT(bump[q], 0.05);
        }
    }
}

TEST(Target, CenterMustBeInSwing) {
    const auto b = BaselineGait::preset("default", kQ);
    TargetTask task;
    task.center = 1.0;
    EXPECT_THROW(make_target(b, task), DomainError);
}

TEST(Stride, NoAssistanceGivesTheBump) {
    const auto b = BaselineGait::preset("default", kQ);
    const auto target = make_target(b, TargetTask{});
    const auto bump = bump_only(b, target);
    std::mt19937_64 rng(1);
    const auto state = SubjectState::zero(kQ);
    const auto zero_g = [](double) { return 0.0; };
    const auto high_g = [](double) { return 10.0; };
    const auto a = simulate_stride(target, b, zero_g, quiet_params(), state, AssistMode::Aan, {}, kN, rng);
    const auto t = simulate_stride(target, b, high_g, quiet_params(), state, AssistMode::Transparent, {}, kN, rng);
    for (std::size_t q = 0; q < bump.size(); ++q) {
        EXPECT_EQ(a.theta_m[q], b.angle[q]);
        EXPECT_EQ(a.raw_error[q], target[q] - b.angle[q]);
        EXPECT_EQ(t.theta_m[q], b.angle[q]);
        EXPECT_EQ(t.torque[q], 0.0);
    }
}

TEST(Stride, FullyAdaptedSubjectTracksExactly) {
    const auto b = BaselineGait::preset("default", kQ);
    const auto target = make_target(b, TargetTask{});
    const SubjectState adapted{bump_only(b, target)};
    std::mt19937_64 rng(2);
    const auto out = simulate_stride(target, b, [](double) { return 7.0; }, quiet_params(), adapted, AssistMode::Aan,
                                     {}, kN, rng);
    for (std::size_t q = 0; q < out.raw_error.size(); ++q) {
        EXPECT_NEAR(out.raw_error[q], 0.0, 1e-12);
        EXPECT_EQ(out.torque[q], 0.0);
    }
    const auto next = subject_update(adapted, out.raw_error, quiet_params());
    for (std::size_t q = 0; q < out.raw_error.size(); ++q) {
        EXPECT_NEAR(next.adjustment[q], 0.99 * adapted.adjustment[q], 1e-12);
    }
}

TEST(Stride, UniformImpedanceNeverHurts) {
    const auto b = BaselineGait::preset("default", kQ);
    const auto target = make_target(b, TargetTask{});
    std::mt19937_64 rng(3);
    const auto state = SubjectState::zero(kQ);
    const auto off = simulate_stride(target, b, [](double) { return 0.0; }, quiet_params(), state, AssistMode::Aan, {},
                                     kN, rng);
    const auto on = simulate_stride(target, b, [](double) { return 2.0; }, quiet_params(), state, AssistMode::Aan, {},
                                    kN, rng);
    for (int j = 0; j < kN; ++j) EXPECT_LE(on.seg_rms[static_cast<std::size_t>(j)], off.seg_rms[static_cast<std::size_t>(j)]);
}

TEST(Stride, AssistanceIsMonotoneWithoutOvershoot) {
    // With c_tau * tau_max <= deadband the correction can never cross the target,
    // so a pointwise larger g always leaves a smaller error.
    const auto b = BaselineGait::preset("default", kQ);
    const auto target = make_target(b, TargetTask{});
    SubjectParams p = quiet_params();
    p.torque_compliance = 0.2;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto state = SubjectState::zero(kQ);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> lo(kQ);
        std::vector<double> hi(kQ);
        for (int q = 0; q < kQ; ++q) {
            lo[static_cast<std::size_t>(q)] = 10.0 * unit(rng);
            hi[static_cast<std::size_t>(q)] = lo[static_cast<std::size_t>(q)] + 5.0 * unit(rng);
        }
        auto lookup = [&b](const std::vector<double>& g) {
            return [&b, &g](double phase) {
                const auto it = std::lower_bound(b.phase.begin(), b.phase.end(), phase);
                return g[static_cast<std::size_t>(it - b.phase.begin())];
            };
        };
        const auto a = simulate_stride(target, b, lookup(lo), p, state, AssistMode::Aan, {}, kN, rng);
        const auto c = simulate_stride(target, b, lookup(hi), p, state, AssistMode::Aan, {}, kN, rng);
        for (int j = 0; j < kN; ++j) {
            EXPECT_LE(c.seg_rms[static_cast<std::size_t>(j)], a.seg_rms[static_cast<std::size_t>(j)] + 1e-12);
        }
    }
}

TEST(Stride, GridMismatchThrows) {
    const auto b = BaselineGait::preset("default", kQ);
    std::mt19937_64 rng(5);
    const std::vector<double> target(10, 0.0);
    EXPECT_THROW(simulate_stride(target, b, [](double) { return 0.0; }, quiet_params(), SubjectState::zero(kQ),
                                 AssistMode::Aan, {}, kN, rng),
                 ShapeError);
}

TEST(Update, Examples) {
    SubjectParams frozen;
    frozen.learning_gain = 0.0;
    frozen.forgetting = 1.0;
    const SubjectState s{{0.5, -1.0, 2.0}};
    EXPECT_EQ(subject_update(s, {3.0, 3.0, 3.0}, frozen).adjustment, s.adjustment);

    SubjectParams step;
    step.learning_gain = 0.2;
    step.forgetting = 1.0;
    EXPECT_DOUBLE_EQ(subject_update(SubjectState::zero(1), {5.0}, step).adjustment[0], 1.0);
}

TEST(Update, ConvergesToGeometricFixedPoint) {
    const SubjectParams p;
    SubjectState s = SubjectState::zero(3);
    const std::vector<double> e{2.0, -1.0, 0.5};
    for (int k = 0; k < 5000; ++k) s = subject_update(s, e, p);
    for (std::size_t q = 0; q < e.size(); ++q) EXPECT_NEAR(s.adjustment[q], 0.1 * e[q] / 0.01, 1e-9);
}

TEST(Update, SlackingBound) {
    const SubjectParams p;
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal(0.0, 2.0);
    SubjectState s = SubjectState::zero(kQ);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> e(kQ);
        for (auto& v : e) v = normal(rng);
        const auto next = subject_update(s, e, p);
        for (int q = 0; q < kQ; ++q) {
            const auto i = static_cast<std::size_t>(q);
            EXPECT_LE(std::abs(next.adjustment[i]), 0.99 * std::abs(s.adjustment[i]) + 0.1 * std::abs(e[i]) + 1e-12);
        }
        s = next;
    }
}

TEST(Plant, LearningCanBeSwitchedOff) {
    const auto b = BaselineGait::preset("default", kQ);
    SubjectPlant plant(b, make_target(b, TargetTask{}), SubjectParams{}, ForceFieldConfig{}, kN, 9);
    plant.set_learning(false);
    plant.run_transparent();
    for (double a : plant.state().adjustment) EXPECT_EQ(a, 0.0);
    plant.set_learning(true);
    plant.run_transparent();
    double peak = 0.0;
    for (double a : plant.state().adjustment) peak = std::max(peak, a);
    EXPECT_GT(peak, 0.3);
}

TEST(Params, Validation) {
    SubjectParams p;
    p.forgetting = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = SubjectParams{};
    p.motor_noise = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}
