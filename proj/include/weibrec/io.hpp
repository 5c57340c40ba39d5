#pragma once

#include "weibrec/errors.hpp"
#include "weibrec/records.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace weibrec {

/// Malformed input data. Carries a 1-based line/column when known (0 otherwise).
class DataError : public InvalidInput {
public:
    DataError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

enum class DataKind { raw_sequences, records };

struct Population {
    std::string label;
    std::vector<double> values;  ///< in observation order
};

/// Accepted CSV layouts:
///  * wide: a header row of population labels, one column per population;
///    a column ends at its first empty cell.
///  * long: header `population,value,order` (order optional for records,
///    required for raw sequences). Rows are sorted by order within each
///    population; populations keep first-appearance order.
/// Every value must be a finite number > 0.
std::vector<Population> parse_csv(std::string_view text, DataKind kind);

/// Accepted JSON layouts: an array of arrays (labels "1", "2", ...), an object
/// mapping label -> array, or {"populations": [{"label": ..., "values": [...]}]}.
std::vector<Population> parse_json(std::string_view text, DataKind kind);

/// Reads `path`, choosing the JSON parser for a `.json` suffix and CSV otherwise.
std::vector<Population> load_populations(const std::string& path, DataKind kind);

struct LabelledSeries {
    std::string label;
    RecordSeries series;
};

/// Raw sequences are reduced to their upper records; record input is
/// validated as strictly increasing.
std::vector<LabelledSeries> to_record_series(const std::vector<Population>& populations, DataKind kind);

/// FNV-1a 64 over labels and the IEEE-754 bit patterns of the values.
std::uint64_t data_digest(const std::vector<LabelledSeries>& data);

}  // namespace weibrec
