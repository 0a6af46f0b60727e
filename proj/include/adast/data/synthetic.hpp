#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "adast/data/record.hpp"
#include "adast/rng.hpp"

namespace adast::data {

struct SyntheticConfig {
    std::size_t n_subjects = 16;
    std::size_t n_days = 120;
    double shift_strength = 0.5;  // 0: all subjects share generating parameters; 1: full spread
    double anomaly_rate = 0.02;   // probability that a day's score drops by 20-40 points
    double missing_rate = 0.02;   // per-cell probability of an empty cell or a -1 sentinel
};

inline constexpr std::size_t kMinSyntheticDays = 20;

/// Seeded multi-subject daily dataset with a declared generative story.
///
/// Per subject i, with shift strength s:
///   baseline score    b_i = 70 + s * (U_i - 70), U_i stratified over Uniform(55, 85)
///   weekly component  A_i * sin(2*pi*weekday/7 + phi_i)
///   activity latent   a_t, AR(1); drives steps, distance, active time
///   stress latent     r_t, AR(1); drives stress average and heart rate
///   score             y_t = b_i + weekly + w_act_i * a_{t-1} - w_stress_i * r_{t-1} + e_t
///                     e_t AR(1) Gaussian noise (coefficient 0.7, sd 2); anomalies subtract 20-40 points
/// Sleep-stage features of day t are noisy linear functions of y_t, so a window
/// of past days reveals the recent score level. Subject-specific parameters
/// (b, A, phi, weights, feature means) are shrunk towards shared values by s.
/// Missing cells are injected as NaN or the raw device sentinel -1.
inline std::vector<SubjectDataset> generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
    if (cfg.n_days < kMinSyntheticDays)
        throw ParameterError("generate_synthetic: n_days must be at least " + std::to_string(kMinSyntheticDays) +
                             ", got " + std::to_string(cfg.n_days));
    if (cfg.n_subjects == 0) throw ParameterError("generate_synthetic: n_subjects must be positive");
    for (double rate : {cfg.anomaly_rate, cfg.missing_rate})
        if (!(rate >= 0.0 && rate < 1.0)) throw ParameterError("generate_synthetic: rates must lie in [0, 1)");
    if (!(cfg.shift_strength >= 0.0 && cfg.shift_strength <= 1.0))
        throw ParameterError("generate_synthetic: shift_strength must lie in [0, 1]");

    const auto& names = default_feature_names();
    const double s = cfg.shift_strength;
    Rng master(seed);

    // Stratified baseline draws: one uniform per equal-width stratum, strata shuffled.
    std::vector<std::size_t> strata(cfg.n_subjects);
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    master.shuffle(strata);

    const Date start{std::chrono::year{2024} / std::chrono::January / 1};
    std::vector<SubjectDataset> out;
    for (std::size_t i = 0; i < cfg.n_subjects; ++i) {
        Rng rng = master.fork(i);
        const double u = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(cfg.n_subjects);
        const double baseline = 70.0 + s * (55.0 + 30.0 * u - 70.0);
        const double weekly_amp = 4.0 * (1.0 + s * rng.uniform(-0.5, 0.5));
        const double weekly_phase = s * rng.uniform(-std::numbers::pi, std::numbers::pi);
        const double w_act = 5.0 * (1.0 + s * rng.uniform(-0.5, 0.5));
        const double w_stress = 6.0 * (1.0 + s * rng.uniform(-0.5, 0.5));
        const double steps_mean = 8000.0 * (1.0 + s * rng.uniform(-0.4, 0.4));
        const double stress_mean = 35.0 * (1.0 + s * rng.uniform(-0.3, 0.3));
        const double resting_hr = 60.0 + s * rng.uniform(-8.0, 8.0);
        const double resp = 15.0 + s * rng.uniform(-2.0, 2.0);

        SubjectDataset ds;
        ds.subject_id = static_cast<int>(i + 1);
        ds.feature_names = names;
        double act = 0.0, stress = 0.0, noise = 0.0;
        for (std::size_t t = 0; t < cfg.n_days; ++t) {
            const Date date = start + std::chrono::days{static_cast<int>(t)};
            const double working = working_day_flag(date);
            const double prev_act = act, prev_stress = stress;
            act = 0.5 * act + 0.85 * rng.normal() + 0.3 * (working - 5.0 / 7.0);
            stress = 0.6 * stress + 0.8 * rng.normal() + 0.5 * (working - 5.0 / 7.0);
            noise = 0.7 * noise + rng.normal(0.0, 2.0);
            const double dow = static_cast<double>(std::chrono::weekday{date}.c_encoding());
            double score = baseline + weekly_amp * std::sin(2.0 * std::numbers::pi * dow / 7.0 + weekly_phase) +
                           w_act * prev_act - w_stress * prev_stress + noise;
            if (rng.bernoulli(cfg.anomaly_rate)) score -= rng.uniform(20.0, 40.0);
            score = std::round(std::clamp(score, 0.0, 100.0));
            const double dev = score - 70.0;

            auto pos = [](double v) { return std::max(0.0, v); };
            auto r1 = [](double v) { return std::round(v * 10.0) / 10.0; };
            const double steps = std::round(pos(steps_mean * (1.0 + 0.3 * act) + rng.normal(0.0, 400.0)));
            const double rhr = r1(resting_hr + 1.5 * stress + rng.normal(0.0, 1.0));
            const double awake_resp = r1(resp + rng.normal(0.0, 0.4));
            std::vector<double> f = {
                std::round(1800.0 + 0.045 * steps + rng.normal(0.0, 60.0)),
                steps,
                std::round(steps * 0.75) / 1000.0,
                std::round(pos(1200.0 * (1.0 + 0.5 * act) + rng.normal(0.0, 200.0))),
                std::round(pos(5400.0 * (1.0 + 0.3 * act) + rng.normal(0.0, 500.0))),
                std::round(pos(20.0 * (1.0 + 0.5 * act) + rng.normal(0.0, 5.0))),
                rhr,
                r1(rhr - 5.0 + rng.normal(0.0, 1.0)),
                r1(110.0 + 8.0 * act + rng.normal(0.0, 4.0)),
                awake_resp,
                r1(awake_resp + 4.0 + rng.normal(0.0, 0.5)),
                r1(awake_resp - 4.0 + rng.normal(0.0, 0.5)),
                std::round(pos(stress_mean * (1.0 + 0.25 * stress) + rng.normal(0.0, 2.0))),
                std::round(pos(4800.0 + 60.0 * dev + rng.normal(0.0, 300.0))),
                std::round(pos(13500.0 + 35.0 * dev + rng.normal(0.0, 600.0))),
                std::round(pos(5400.0 + 45.0 * dev + rng.normal(0.0, 400.0))),
                std::round(pos(1800.0 - 30.0 * dev + rng.normal(0.0, 200.0))),
                std::round(pos(3.0 - 0.05 * dev + rng.normal(0.0, 0.8))),
                std::round(pos(20.0 - 0.3 * dev + 2.0 * stress + rng.normal(0.0, 2.0))),
                std::round(pos(40.0 - 0.6 * dev + rng.normal(0.0, 5.0))),
                r1(resp - 2.5 + rng.normal(0.0, 0.3)),
                r1(resp + 2.5 + rng.normal(0.0, 0.3)),
                r1(resp - 0.5 + rng.normal(0.0, 0.3)),
                working,
            };
            for (std::size_t k = 0; k + 1 < f.size(); ++k)
                if (rng.bernoulli(cfg.missing_rate)) f[k] = rng.bernoulli(0.5) ? kMissing : -1.0;
            if (rng.bernoulli(cfg.missing_rate / 4.0)) score = rng.bernoulli(0.5) ? kMissing : -1.0;
            ds.records.push_back(DailyRecord{date, std::move(f), score});
        }
        out.push_back(std::move(ds));
    }
    return out;
}

/// Maps raw device sentinels (-1) to the internal missing marker, as parse_csv does.
inline std::vector<SubjectDataset> mark_sentinels_missing(std::vector<SubjectDataset> datasets) {
    for (auto& ds : datasets)
        for (auto& r : ds.records) {
            for (double& v : r.features)
                if (v == -1.0) v = kMissing;
            if (r.sleep_score == -1.0) r.sleep_score = kMissing;
        }
    return datasets;
}

}  // namespace adast::data
