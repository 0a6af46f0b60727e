#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "adast/data/record.hpp"

namespace adast::data {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

/// Empty cells and the sentinel -1 map to kMissing.
inline bool parse_cell(const std::string& raw, double& out) {
    const std::string cell = trim(raw);
    if (cell.empty()) {
        out = kMissing;
        return true;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        if (cell == "nan" || cell == "NaN" || cell == "NA") {
            out = kMissing;
            return true;
        }
        return false;
    }
    out = (v == -1.0) ? kMissing : v;
    return true;
}

/// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
    if (is_missing(v)) return {};
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace detail

/// Reads `subject_id,date,<features...>,sleep_score`. Feature columns are taken
/// from the header; one dataset per subject, sorted by subject id and date.
inline std::vector<SubjectDataset> parse_csv_stream(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV input (missing header row)", 1);
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    std::vector<std::string> header = detail::split_csv_line(line);
    for (auto& h : header) h = detail::trim(h);
    if (header.size() < 4 || header[0] != "subject_id" || header[1] != "date" || header.back() != "sleep_score")
        throw ParseError("header must be subject_id,date,<features...>,sleep_score", 1);
    const std::vector<std::string> features(header.begin() + 2, header.end() - 1);
    const auto working_it = std::find(features.begin(), features.end(), kWorkingDayFeature);
    const std::ptrdiff_t working_col = working_it == features.end() ? -1 : working_it - features.begin();

    std::map<int, SubjectDataset> by_subject;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                                 std::to_string(cells.size()),
                             line_no);
        int subject = 0;
        const std::string sid = detail::trim(cells[0]);
        const auto [p, ec] = std::from_chars(sid.data(), sid.data() + sid.size(), subject);
        if (ec != std::errc() || p != sid.data() + sid.size() || sid.empty())
            throw ParseError("invalid subject_id '" + cells[0] + "'", line_no);
        DailyRecord rec;
        if (!parse_date(detail::trim(cells[1]), rec.date))
            throw ParseError("invalid date '" + cells[1] + "' (expected YYYY-MM-DD)", line_no);
        rec.features.resize(features.size());
        for (std::size_t f = 0; f < features.size(); ++f)
            if (!detail::parse_cell(cells[2 + f], rec.features[f]))
                throw ParseError("invalid number '" + cells[2 + f] + "' in column " + features[f], line_no);
        if (working_col >= 0 && is_missing(rec.features[static_cast<std::size_t>(working_col)]))
            rec.features[static_cast<std::size_t>(working_col)] = working_day_flag(rec.date);
        if (!detail::parse_cell(cells.back(), rec.sleep_score))
            throw ParseError("invalid sleep_score '" + cells.back() + "'", line_no);
        if (!is_missing(rec.sleep_score) && (rec.sleep_score < 0.0 || rec.sleep_score > 100.0))
            throw ParseError("sleep_score " + cells.back() + " outside [0, 100]", line_no);

        auto [it, inserted] = by_subject.try_emplace(subject);
        if (inserted) {
            it->second.subject_id = subject;
            it->second.feature_names = features;
        }
        it->second.records.push_back(std::move(rec));
    }

    std::vector<SubjectDataset> out;
    for (auto& [id, ds] : by_subject) {
        std::stable_sort(ds.records.begin(), ds.records.end(),
                         [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < ds.records.size(); ++i)
            if (ds.records[i].date == ds.records[i - 1].date)
                throw ConflictError("duplicate record for subject " + std::to_string(id) + " on " +
                                    format_date(ds.records[i].date));
        out.push_back(std::move(ds));
    }
    return out;
}

inline std::vector<SubjectDataset> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_csv_stream(in);
}

/// All datasets must share one feature registry.
inline void write_csv_stream(std::ostream& out, const std::vector<SubjectDataset>& datasets) {
    if (datasets.empty()) throw ParameterError("write_csv: no datasets");
    const auto& names = datasets.front().feature_names;
    out << "subject_id,date";
    for (const auto& n : names) out << ',' << n;
    out << ",sleep_score\n";
    for (const auto& ds : datasets) {
        if (ds.feature_names != names) throw DimensionError("write_csv: datasets disagree on feature columns");
        for (const auto& r : ds.records) {
            out << ds.subject_id << ',' << format_date(r.date);
            for (double v : r.features) out << ',' << detail::format_number(v);
            out << ',' << detail::format_number(r.sleep_score) << '\n';
        }
    }
}

inline void write_csv(const std::string& path, const std::vector<SubjectDataset>& datasets) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    write_csv_stream(out, datasets);
    if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace adast::data
