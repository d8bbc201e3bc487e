#include "lobmm/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lobmm {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<int> parse_side(std::string side) {
    std::transform(side.begin(), side.end(), side.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    side = trim(side);
    if (side == "buy" || side == "+1" || side == "1") return +1;
    if (side == "sell" || side == "-1") return -1;
    return std::nullopt;
}

std::optional<double> parse_double(const std::string& s) {
    const std::string t = trim(s);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) return std::nullopt;
    return v;
}

bool days_in_month_ok(int y, int m, int d) {
    static const int dim[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    int n = dim[m - 1];
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) n = 29;
    return d <= n;
}

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::optional<Timestamp> parse_timestamp(const std::string& text) {
    // YYYY-MM-DD[T hh:mm:ss[.frac]][Z|+hh:mm|-hh:mm]
    const std::string s = trim(text);
    int y, mo, d, h = 0, mi = 0, se = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%n", &y, &mo, &d, &consumed) < 3) return std::nullopt;
    std::size_t pos = static_cast<std::size_t>(consumed);
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        ++pos;
        int c2 = 0;
        if (std::sscanf(s.c_str() + pos, "%d:%d:%d%n", &h, &mi, &se, &c2) < 3) return std::nullopt;
        pos += static_cast<std::size_t>(c2);
        if (pos < s.size() && s[pos] == '.') {  // drop fractional seconds
            ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
    }
    std::int64_t offset = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z') {
            ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
            const int sgn = s[pos] == '+' ? 1 : -1;
            int oh = 0, om = 0, c3 = 0;
            if (std::sscanf(s.c_str() + pos + 1, "%d:%d%n", &oh, &om, &c3) < 2) return std::nullopt;
            offset = sgn * (oh * 3600 + om * 60);
            pos += 1 + static_cast<std::size_t>(c3);
        }
    }
    if (pos != s.size()) return std::nullopt;
    if (!days_in_month_ok(y, mo, d)) return std::nullopt;
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 60) return std::nullopt;
    return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + se - offset;
}

std::string format_timestamp(Timestamp t) {
    std::int64_t days = day_of(t);
    std::int64_t rem = t - days * kSecondsPerDay;
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

namespace {

struct RawRow {
    std::string ts, side, price, volume;
};

std::optional<OrderRecord> validate_row(const RawRow& raw, std::string& reason) {
    auto ts = parse_timestamp(raw.ts);
    if (!ts) {
        reason = "bad timestamp";
        return std::nullopt;
    }
    auto side = parse_side(raw.side);
    if (!side) {
        reason = "bad side";
        return std::nullopt;
    }
    auto price = parse_double(raw.price);
    if (!price) {
        reason = "bad price";
        return std::nullopt;
    }
    auto volume = parse_double(raw.volume);
    if (!volume) {
        reason = "bad volume";
        return std::nullopt;
    }
    if (*price <= 0.0) {
        reason = "nonpositive price";
        return std::nullopt;
    }
    if (*volume <= 0.0) {
        reason = "nonpositive volume";
        return std::nullopt;
    }
    OrderRecord rec;
    rec.sign = *side;
    rec.price = *price;
    rec.volume = *volume;
    rec.timestamp = *ts;
    return rec;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

ParseResult parse_orders(std::istream& source, InputFormat format) {
    if (!source.good()) throw std::runtime_error("unreadable input stream");
    ParseResult result;
    std::string line;
    std::size_t lineno = 0;

    if (format == InputFormat::csv) {
        if (!std::getline(source, line)) throw std::runtime_error("missing csv header");
        ++lineno;
        auto header = split_csv(trim(line));
        if (header.size() != 4 || trim(header[0]) != "timestamp" || trim(header[1]) != "side" ||
            trim(header[2]) != "price" || trim(header[3]) != "volume")
            throw std::runtime_error("bad csv header, expected timestamp,side,price,volume");
    }

    std::int64_t next_id = 0;
    while (std::getline(source, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        RawRow raw;
        std::string reason;
        bool shaped = true;
        if (format == InputFormat::csv) {
            auto fields = split_csv(line);
            if (fields.size() != 4) {
                reason = "wrong field count";
                shaped = false;
            } else {
                raw = {fields[0], fields[1], fields[2], fields[3]};
            }
        } else {
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("ts") || !j.contains("side") ||
                !j.contains("price") || !j.contains("volume")) {
                reason = "malformed json object";
                shaped = false;
            } else {
                auto as_text = [](const nlohmann::json& v) {
                    return v.is_string() ? v.get<std::string>() : v.dump();
                };
                raw = {as_text(j["ts"]), as_text(j["side"]), as_text(j["price"]),
                       as_text(j["volume"])};
            }
        }
        std::optional<OrderRecord> rec;
        if (shaped) rec = validate_row(raw, reason);
        if (rec) {
            rec->id = next_id++;
            result.orders.push_back(*rec);
        } else {
            result.rejects.push_back({lineno, reason});
        }
    }
    if (source.bad()) throw std::runtime_error("input stream failed mid-read");
    return result;
}

std::vector<DayPartition> partition_by_day(std::vector<OrderRecord> orders) {
    std::stable_sort(orders.begin(), orders.end(), [](const OrderRecord& a, const OrderRecord& b) {
        return std::tie(a.timestamp, a.id) < std::tie(b.timestamp, b.id);
    });
    std::vector<DayPartition> out;
    for (auto& o : orders) {
        const std::int64_t d = day_of(o.timestamp);
        if (out.empty() || out.back().day != d) out.push_back({d, {}});
        out.back().orders.push_back(o);
    }
    return out;
}

void serialize_orders(const std::vector<OrderRecord>& orders, std::ostream& out) {
    out << "timestamp,side,price,volume\n";
    for (const auto& o : orders) {
        char buf[64];
        out << format_timestamp(o.timestamp) << ',' << (o.sign > 0 ? "buy" : "sell") << ',';
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", o.price, o.volume);
        out << buf;
    }
}

void write_reject_report(const std::vector<RejectedRow>& rejects, std::ostream& out) {
    out << "line,reason\n";
    for (const auto& r : rejects) out << r.line << ',' << r.reason << '\n';
}

}  // namespace lobmm
