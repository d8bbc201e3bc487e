#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lobmm/types.hpp"

namespace lobmm {

enum class InputFormat { csv, jsonl };

struct RejectedRow {
    std::size_t line = 0;  // 1-based, counting the header for csv
    std::string reason;
};

struct ParseResult {
    std::vector<OrderRecord> orders;  // ids assigned 0..n-1 in file order
    std::vector<RejectedRow> rejects;
};

// Parses order records from a UTF-8 stream. Malformed rows go to the reject
// list with line number and reason; an unreadable stream or a missing csv
// header throws std::runtime_error.
//
// csv schema:   timestamp,side,price,volume   (header required)
// jsonl schema: {"ts": ..., "side": ..., "price": ..., "volume": ...}
//
// side accepts "buy"/"sell" and "+1"/"-1"/"1". Timestamps are ISO-8601;
// a missing timezone is read as UTC.
ParseResult parse_orders(std::istream& source, InputFormat format);

// Groups orders by UTC calendar day. Partitions come out ordered by date and
// internally sorted by (timestamp, id); the multiset of orders is preserved.
std::vector<DayPartition> partition_by_day(std::vector<OrderRecord> orders);

// Inverse of parse_orders for valid records (csv, with header).
void serialize_orders(const std::vector<OrderRecord>& orders, std::ostream& out);

void write_reject_report(const std::vector<RejectedRow>& rejects, std::ostream& out);

// "2023-04-01T09:00:00Z" -> unix seconds. Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(const std::string& text);
std::string format_timestamp(Timestamp t);

}  // namespace lobmm
