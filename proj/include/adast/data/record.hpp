#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "adast/errors.hpp"

namespace adast::data {

using Date = std::chrono::sys_days;

/// Internal marker for a missing cell (empty or the device sentinel -1).
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Default daily feature columns, in file order.
inline const std::vector<std::string>& default_feature_names() {
    static const std::vector<std::string> names = {
        "total_kilocalories",
        "total_steps",
        "total_distance",
        "highly_active_seconds",
        "active_seconds",
        "moderate_intensity_minutes",
        "resting_heart_rate",
        "min_avg_heart_rate",
        "max_avg_heart_rate",
        "avg_waking_respiration",
        "highest_respiration",
        "lowest_respiration",
        "stress_average",
        "deep_sleep_seconds",
        "light_sleep_seconds",
        "rem_sleep_seconds",
        "awake_sleep_seconds",
        "awake_count",
        "avg_sleep_stress",
        "restless_moment_count",
        "sleep_lowest_respiration",
        "sleep_highest_respiration",
        "sleep_avg_respiration",
        "is_working_day",
    };
    return names;
}

inline constexpr std::string_view kWorkingDayFeature = "is_working_day";

struct DailyRecord {
    Date date;
    std::vector<double> features;
    double sleep_score = kMissing;
};

struct SubjectDataset {
    int subject_id = 0;
    std::vector<std::string> feature_names;
    std::vector<DailyRecord> records;

    std::size_t feature_count() const { return feature_names.size(); }
};

/// Parses YYYY-MM-DD; returns false on any malformed or impossible date.
inline bool parse_date(std::string_view text, Date& out) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    int y = 0;
    unsigned m = 0, d = 0;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (text[i] < '0' || text[i] > '9') return false;
    y = std::stoi(std::string(text.substr(0, 4)));
    m = static_cast<unsigned>(std::stoi(std::string(text.substr(5, 2))));
    d = static_cast<unsigned>(std::stoi(std::string(text.substr(8, 2))));
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return false;
    out = Date{ymd};
    return true;
}

inline std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

/// Monday to Friday -> 1.0, weekend -> 0.0.
inline double working_day_flag(Date date) {
    const unsigned wd = std::chrono::weekday{date}.c_encoding();  // 0 = Sunday
    return (wd >= 1 && wd <= 5) ? 1.0 : 0.0;
}

inline std::size_t count_missing(const SubjectDataset& ds) {
    std::size_t n = 0;
    for (const auto& r : ds.records) {
        n += is_missing(r.sleep_score);
        for (double v : r.features) n += is_missing(v);
    }
    return n;
}

/// Number of places where consecutive records are more than one day apart.
inline std::size_t count_gaps(const SubjectDataset& ds) {
    std::size_t gaps = 0;
    for (std::size_t i = 1; i < ds.records.size(); ++i)
        if ((ds.records[i].date - ds.records[i - 1].date).count() > 1) ++gaps;
    return gaps;
}

}  // namespace adast::data
