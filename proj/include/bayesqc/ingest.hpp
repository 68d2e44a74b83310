#pragma once

// File-based data adapter: delimited inspection exports in, cleaned records
// and per-type (total, inspected, repaired) summaries out.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "bayesqc/error.hpp"

namespace bayesqc::ingest {

enum class InspectionStatus : int { NotInspected = 0, Passed = 1, Failed = 2 };

struct WeldRecord {
    std::string operator_id;
    std::string weld_kind;
    std::string schedule;
    std::string nps;
    std::string material;
    std::string project_type;
    std::string status_raw;
    std::optional<InspectionStatus> status;  // empty when status_raw is not 0, 1 or 2
    std::size_t line = 0;                    // 1-based source line, 0 if constructed in code

    friend bool operator==(const WeldRecord&, const WeldRecord&) = default;
};

inline constexpr std::array<std::string_view, 7> kRecordColumns{
    "operator_id", "weld_kind", "schedule", "nps", "material", "project_type", "inspection_status"};

struct Schema {
    char delimiter = ',';
};

struct RowIssue {
    std::size_t line = 0;
    std::string message;
};

struct ParseResult {
    std::vector<WeldRecord> records;
    std::vector<RowIssue> issues;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// One delimited line into fields. Double quotes group a field and "" escapes
// a quote inside it.
inline std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline bool getline_stripped(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline bool is_blank_row(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

// Column name -> index, throwing SchemaError for any required name missing.
template <std::size_t N>
std::array<std::size_t, N> locate_columns(const std::vector<std::string>& header,
                                          const std::array<std::string_view, N>& required) {
    std::array<std::size_t, N> idx{};
    for (std::size_t k = 0; k < N; ++k) {
        auto it = std::find(header.begin(), header.end(), required[k]);
        if (it == header.end()) throw SchemaError("missing required column '" + std::string(required[k]) + "'");
        idx[k] = static_cast<std::size_t>(it - header.begin());
    }
    return idx;
}

inline std::optional<std::uint64_t> parse_count(const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) return std::nullopt;
    try {
        return std::stoull(s);
    } catch (const std::out_of_range&) {
        return std::nullopt;
    }
}

}  // namespace detail

// "2.00" -> "2", "2.50" -> "2.5", "0.75" unchanged. Non-numeric labels pass
// through trimmed.
inline std::string normalize_nps(std::string_view raw) {
    std::string s = detail::trim(raw);
    const auto dot = s.find('.');
    if (dot == std::string::npos) return s;
    const bool numeric = std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) || c == '.'; }) &&
                         std::count(s.begin(), s.end(), '.') == 1;
    if (!numeric) return s;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s.empty()) s = "0";
    return s;
}

inline std::optional<InspectionStatus> parse_status(std::string_view raw) {
    const std::string s = detail::trim(raw);
    if (s == "0") return InspectionStatus::NotInspected;
    if (s == "1") return InspectionStatus::Passed;
    if (s == "2") return InspectionStatus::Failed;
    return std::nullopt;
}

// Reads a header row plus data rows. Rows with the wrong field count are
// skipped and reported; rows with a bad status are kept for clean() to reject.
inline ParseResult parse_records(std::istream& in, const Schema& schema = {}) {
    ParseResult result;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (detail::getline_stripped(in, line)) {
        ++lineno;
        if (detail::is_blank_row(line)) continue;
        header = detail::split_line(line, schema.delimiter);
        break;
    }
    if (header.empty()) throw SchemaError("input has no header row");
    if (header.front().starts_with("\xEF\xBB\xBF")) header.front().erase(0, 3);
    const auto col = detail::locate_columns(header, kRecordColumns);

    while (detail::getline_stripped(in, line)) {
        ++lineno;
        if (detail::is_blank_row(line)) continue;
        const auto f = detail::split_line(line, schema.delimiter);
        if (f.size() != header.size()) {
            result.issues.push_back({lineno, "expected " + std::to_string(header.size()) + " fields, found " +
                                                 std::to_string(f.size())});
            continue;
        }
        WeldRecord r;
        r.operator_id = f[col[0]];
        r.weld_kind = f[col[1]];
        r.schedule = f[col[2]];
        r.nps = normalize_nps(f[col[3]]);
        r.material = f[col[4]];
        r.project_type = f[col[5]];
        r.status_raw = f[col[6]];
        r.status = parse_status(r.status_raw);
        r.line = lineno;
        if (!r.status) result.issues.push_back({lineno, "invalid inspection_status '" + r.status_raw + "'"});
        result.records.push_back(std::move(r));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Cleaning

inline constexpr std::string_view kReasonBlank = "blank field";
inline constexpr std::string_view kReasonStatus = "invalid status";
inline constexpr std::string_view kReasonProjectType = "project type filtered";

struct CleanOptions {
    // Keep only rows of this project type (e.g. "0" for fabrication).
    std::optional<std::string> project_type;
};

struct Rejection {
    std::size_t line = 0;
    std::string reason;
};

struct CleanReport {
    std::map<std::string, std::size_t> counts;  // reason -> rows dropped
    std::vector<Rejection> rejected;

    bool empty() const noexcept { return rejected.empty(); }
    std::size_t total() const noexcept { return rejected.size(); }
};

struct CleanResult {
    std::vector<WeldRecord> records;
    CleanReport report;
};

inline bool is_missing(std::string_view v) {
    const std::string s = detail::trim(v);
    return s.empty() || s == "NA" || s == "N/A" || s == "NULL" || s == "null";
}

inline CleanResult clean(const std::vector<WeldRecord>& records, const CleanOptions& opts = {}) {
    CleanResult out;
    out.records.reserve(records.size());
    auto reject = [&](const WeldRecord& r, std::string_view why) {
        out.report.counts[std::string(why)] += 1;
        out.report.rejected.push_back({r.line, std::string(why)});
    };
    for (const auto& r : records) {
        if (is_missing(r.schedule) || is_missing(r.nps) || is_missing(r.material)) {
            reject(r, kReasonBlank);
        } else if (!r.status) {
            reject(r, kReasonStatus);
        } else if (opts.project_type && r.project_type != *opts.project_type) {
            reject(r, kReasonProjectType);
        } else {
            out.records.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grouping

enum class Field : unsigned {
    Nps = 1u << 0,
    Schedule = 1u << 1,
    Material = 1u << 2,
    WeldKind = 1u << 3,
    Operator = 1u << 4,
};

struct GroupBy {
    unsigned mask = 0;

    constexpr GroupBy() = default;
    constexpr GroupBy(std::initializer_list<Field> fields) {
        for (Field f : fields) mask |= static_cast<unsigned>(f);
    }
    constexpr bool has(Field f) const noexcept { return (mask & static_cast<unsigned>(f)) != 0; }

    // NPS, schedule, material, weld kind: one product type.
    static constexpr GroupBy pipe_format() {
        return {Field::Nps, Field::Schedule, Field::Material, Field::WeldKind};
    }
    static constexpr GroupBy pipe_format_by_operator() {
        return {Field::Nps, Field::Schedule, Field::Material, Field::WeldKind, Field::Operator};
    }
};

// Fields not selected by the GroupBy are left empty.
struct GroupKey {
    std::string nps;
    std::string schedule;
    std::string material;
    std::string weld_kind;
    std::string operator_id;

    friend bool operator==(const GroupKey&, const GroupKey&) = default;

    std::string label() const {
        std::string s = "(" + nps + ", " + schedule + ", " + material + ", " + weld_kind + ")";
        if (!operator_id.empty()) s += " op " + operator_id;
        return s;
    }
};

// Compares digit runs numerically so NPS "2" < "10".
inline int natural_compare(std::string_view x, std::string_view y) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() && j < y.size()) {
        const bool dx = std::isdigit(static_cast<unsigned char>(x[i]));
        const bool dy = std::isdigit(static_cast<unsigned char>(y[j]));
        if (dx && dy) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < x.size() && std::isdigit(static_cast<unsigned char>(x[ie]))) ++ie;
            while (je < y.size() && std::isdigit(static_cast<unsigned char>(y[je]))) ++je;
            std::string_view nx = x.substr(i, ie - i);
            std::string_view ny = y.substr(j, je - j);
            while (nx.size() > 1 && nx.front() == '0') nx.remove_prefix(1);
            while (ny.size() > 1 && ny.front() == '0') ny.remove_prefix(1);
            if (nx.size() != ny.size()) return nx.size() < ny.size() ? -1 : 1;
            if (const int c = nx.compare(ny); c != 0) return c < 0 ? -1 : 1;
            i = ie;
            j = je;
        } else {
            if (x[i] != y[j]) return static_cast<unsigned char>(x[i]) < static_cast<unsigned char>(y[j]) ? -1 : 1;
            ++i;
            ++j;
        }
    }
    if (i == x.size() && j == y.size()) return x.compare(y) < 0 ? -1 : (x == y ? 0 : 1);
    return i == x.size() ? -1 : 1;
}

inline bool operator<(const GroupKey& l, const GroupKey& r) {
    for (auto [a, b] : {std::pair{&l.nps, &r.nps}, std::pair{&l.schedule, &r.schedule},
                        std::pair{&l.material, &r.material}, std::pair{&l.weld_kind, &r.weld_kind},
                        std::pair{&l.operator_id, &r.operator_id}}) {
        if (const int c = natural_compare(*a, *b); c != 0) return c < 0;
    }
    return false;
}

inline GroupKey key_of(const WeldRecord& r, GroupBy by) {
    GroupKey k;
    if (by.has(Field::Nps)) k.nps = r.nps;
    if (by.has(Field::Schedule)) k.schedule = r.schedule;
    if (by.has(Field::Material)) k.material = r.material;
    if (by.has(Field::WeldKind)) k.weld_kind = r.weld_kind;
    if (by.has(Field::Operator)) k.operator_id = r.operator_id;
    return k;
}

struct GroupSummary {
    GroupKey key;
    std::uint64_t total_welds = 0;
    std::uint64_t inspected_welds = 0;  // n
    std::uint64_t repaired_welds = 0;   // X

    friend bool operator==(const GroupSummary&, const GroupSummary&) = default;
};

// Total = all rows, inspected = status 1 or 2, repaired = status 2.
// Records must be cleaned; a record without a valid status is a DomainError.
inline std::vector<GroupSummary> summarize(const std::vector<WeldRecord>& records,
                                           GroupBy by = GroupBy::pipe_format()) {
    std::map<GroupKey, GroupSummary> groups;
    for (const auto& r : records) {
        if (!r.status) throw DomainError("summarize: record on line " + std::to_string(r.line) + " has no valid status");
        auto key = key_of(r, by);
        auto& g = groups[key];
        g.key = std::move(key);
        g.total_welds += 1;
        if (*r.status != InspectionStatus::NotInspected) g.inspected_welds += 1;
        if (*r.status == InspectionStatus::Failed) g.repaired_welds += 1;
    }
    std::vector<GroupSummary> out;
    out.reserve(groups.size());
    for (auto& [k, g] : groups) out.push_back(std::move(g));
    return out;
}

// Empty optional fields match anything.
struct KeyFilter {
    std::optional<std::string> nps;
    std::optional<std::string> schedule;
    std::optional<std::string> material;
    std::optional<std::string> weld_kind;
    std::optional<std::string> operator_id;

    bool matches(const GroupKey& k) const {
        auto ok = [](const std::optional<std::string>& want, const std::string& have) { return !want || *want == have; };
        return ok(nps, k.nps) && ok(schedule, k.schedule) && ok(material, k.material) && ok(weld_kind, k.weld_kind) &&
               ok(operator_id, k.operator_id);
    }
};

// Keeps summaries whose key matches and whose inspected count is >= min_inspected.
inline std::vector<GroupSummary> filter_summaries(const std::vector<GroupSummary>& summaries, const KeyFilter& filter,
                                                  std::uint64_t min_inspected = 0) {
    std::vector<GroupSummary> out;
    for (const auto& s : summaries)
        if (filter.matches(s.key) && s.inspected_welds >= min_inspected) out.push_back(s);
    return out;
}

// Reads a summary table (the delimited output of summarize) back in. The
// grouping columns are optional; the three count columns are required.
inline std::vector<GroupSummary> parse_summaries(std::istream& in, const Schema& schema = {}) {
    std::string line;
    std::vector<std::string> header;
    std::size_t lineno = 0;
    while (detail::getline_stripped(in, line)) {
        ++lineno;
        if (detail::is_blank_row(line) || line.front() == '#') continue;
        header = detail::split_line(line, schema.delimiter);
        break;
    }
    if (header.empty()) throw SchemaError("summary input has no header row");
    constexpr std::array<std::string_view, 3> counts{"total_welds", "inspected_welds", "repaired_welds"};
    const auto cc = detail::locate_columns(header, counts);
    auto optional_col = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto c_nps = optional_col("nps");
    const auto c_sched = optional_col("schedule");
    const auto c_mat = optional_col("material");
    const auto c_kind = optional_col("weld_kind");
    const auto c_op = optional_col("operator_id");

    std::vector<GroupSummary> out;
    while (detail::getline_stripped(in, line)) {
        ++lineno;
        if (detail::is_blank_row(line) || line.front() == '#') continue;
        const auto f = detail::split_line(line, schema.delimiter);
        if (f.size() != header.size()) throw SchemaError("line " + std::to_string(lineno) + ": wrong field count");
        GroupSummary s;
        if (c_nps) s.key.nps = normalize_nps(f[*c_nps]);
        if (c_sched) s.key.schedule = f[*c_sched];
        if (c_mat) s.key.material = f[*c_mat];
        if (c_kind) s.key.weld_kind = f[*c_kind];
        if (c_op) s.key.operator_id = f[*c_op];
        const auto t = detail::parse_count(f[cc[0]]);
        const auto n = detail::parse_count(f[cc[1]]);
        const auto x = detail::parse_count(f[cc[2]]);
        if (!t || !n || !x) throw SchemaError("line " + std::to_string(lineno) + ": counts must be non-negative integers");
        if (!(*x <= *n && *n <= *t))
            throw SchemaError("line " + std::to_string(lineno) + ": need repaired <= inspected <= total");
        s.total_welds = *t;
        s.inspected_welds = *n;
        s.repaired_welds = *x;
        out.push_back(std::move(s));
    }
    return out;
}

// Generic delimited table for the small auxiliary inputs (designs, product
// specs, actual results). Rows with the wrong field count are SchemaErrors.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;  // source line of each row

    std::optional<std::size_t> column(std::string_view name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    }
    std::size_t require(std::string_view name) const {
        if (auto c = column(name)) return *c;
        throw SchemaError("missing required column '" + std::string(name) + "'");
    }
};

inline Table read_table(std::istream& in, const Schema& schema = {}) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (detail::getline_stripped(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (detail::is_blank_row(line) || line.front() == '#') continue;
        auto fields = detail::split_line(line, schema.delimiter);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw SchemaError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                              " fields, found " + std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
        t.lines.push_back(lineno);
    }
    if (t.header.empty()) throw SchemaError("input has no header row");
    return t;
}

inline std::uint64_t count_field(const Table& t, std::size_t row, std::size_t col) {
    const auto v = detail::parse_count(t.rows[row][col]);
    if (!v)
        throw SchemaError("line " + std::to_string(t.lines[row]) + ": '" + t.header[col] +
                          "' must be a non-negative integer");
    return *v;
}

inline double number_field(const Table& t, std::size_t row, std::size_t col) {
    const std::string& s = t.rows[row][col];
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v))
        throw SchemaError("line " + std::to_string(t.lines[row]) + ": '" + t.header[col] + "' must be a number");
    return v;
}

}  // namespace bayesqc::ingest
