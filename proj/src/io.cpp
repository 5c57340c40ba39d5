#include "weibrec/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace weibrec {

namespace {

std::string locate(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) {
        return what;
    }
    std::ostringstream out;
    out << "line " << line;
    if (column != 0) {
        out << ", column " << column;
    }
    out << ": " << what;
    return out.str();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

double parse_value(std::string_view cell, const std::string& label, std::size_t line, std::size_t column) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw DataError(locate("'" + std::string(cell) + "' in column '" + label + "' is not a number", line, column),
                        line, column);
    }
    if (!std::isfinite(v) || v <= 0.0) {
        throw DataError(
            locate("value " + std::string(cell) + " in column '" + label + "' is not strictly positive", line, column),
            line, column);
    }
    return v;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<Population> parse_long(const std::vector<std::string_view>& lines, bool has_order, DataKind kind) {
    if (!has_order && kind == DataKind::raw_sequences) {
        throw DataError(locate("long-format raw sequences need an 'order' column", 1, 0), 1, 0);
    }
    struct Row {
        double order;
        double value;
    };
    std::vector<std::string> labels;
    std::map<std::string, std::vector<Row>> rows;
    const std::size_t width = has_order ? 3 : 2;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line = i + 1;
        if (trim(lines[i]).empty()) {
            continue;
        }
        const auto fields = split_fields(lines[i]);
        if (fields.size() != width) {
            throw DataError(locate("expected " + std::to_string(width) + " fields, found " +
                                       std::to_string(fields.size()),
                                   line, 0),
                            line, 0);
        }
        const std::string label(fields[0]);
        if (label.empty()) {
            throw DataError(locate("empty population label", line, 1), line, 1);
        }
        const double value = parse_value(fields[1], label, line, 2);
        double order = static_cast<double>(rows[label].size());
        if (has_order) {
            const auto* end = fields[2].data() + fields[2].size();
            const auto [ptr, ec] = std::from_chars(fields[2].data(), end, order);
            if (ec != std::errc() || ptr != end || !std::isfinite(order)) {
                throw DataError(locate("order '" + std::string(fields[2]) + "' is not a number", line, 3), line, 3);
            }
        }
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
            labels.push_back(label);
        }
        rows[label].push_back({order, value});
    }
    std::vector<Population> out;
    for (const auto& label : labels) {
        auto& r = rows[label];
        std::stable_sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.order < b.order; });
        for (std::size_t j = 1; j < r.size(); ++j) {
            if (r[j].order == r[j - 1].order) {
                throw DataError("population '" + label + "' repeats order value " + std::to_string(r[j].order));
            }
        }
        Population p{label, {}};
        for (const auto& row : r) {
            p.values.push_back(row.value);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Population> parse_wide(const std::vector<std::string_view>& lines, const std::vector<std::string_view>& header) {
    std::vector<Population> out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty()) {
            throw DataError(locate("empty population label", 1, c + 1), 1, c + 1);
        }
        out.push_back({std::string(header[c]), {}});
    }
    std::vector<bool> ended(header.size(), false);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line = i + 1;
        if (trim(lines[i]).empty()) {
            continue;
        }
        const auto fields = split_fields(lines[i]);
        if (fields.size() > header.size()) {
            throw DataError(locate("row has " + std::to_string(fields.size()) + " fields but the header has " +
                                       std::to_string(header.size()),
                                   line, 0),
                            line, 0);
        }
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c >= fields.size() || fields[c].empty()) {
                ended[c] = true;
                continue;
            }
            if (ended[c]) {
                throw DataError(locate("column '" + out[c].label + "' continues after an empty cell", line, c + 1),
                                line, c + 1);
            }
            out[c].values.push_back(parse_value(fields[c], out[c].label, line, c + 1));
        }
    }
    return out;
}

void require_nonempty(const std::vector<Population>& populations) {
    if (populations.empty()) {
        throw DataError("no populations in input");
    }
    for (const auto& p : populations) {
        if (p.values.empty()) {
            throw DataError("population '" + p.label + "' has no values");
        }
    }
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t line, std::size_t column)
    : InvalidInput(what), line_(line), column_(column) {}

std::vector<Population> parse_csv(std::string_view text, DataKind kind) {
    auto lines = split_lines(text);
    while (!lines.empty() && trim(lines.back()).empty()) {
        lines.pop_back();
    }
    if (lines.empty()) {
        throw DataError("input is empty");
    }
    const auto header = split_fields(lines[0]);
    std::vector<std::string> names;
    for (auto h : header) {
        names.push_back(lower(h));
    }
    std::vector<Population> out;
    if (names.size() >= 2 && names[0] == "population" && names[1] == "value" &&
        (names.size() == 2 || (names.size() == 3 && names[2] == "order"))) {
        out = parse_long(lines, names.size() == 3, kind);
    } else {
        out = parse_wide(lines, header);
    }
    require_nonempty(out);
    return out;
}

std::vector<Population> parse_json(std::string_view text, DataKind) {
    using nlohmann::ordered_json;
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& ex) {
        throw DataError(std::string("invalid JSON: ") + ex.what());
    }

    auto to_values = [](const ordered_json& arr, const std::string& label) {
        if (!arr.is_array()) {
            throw DataError("population '" + label + "' is not an array");
        }
        std::vector<double> values;
        for (std::size_t j = 0; j < arr.size(); ++j) {
            const auto& v = arr[j];
            if (!v.is_number()) {
                throw DataError("population '" + label + "' entry " + std::to_string(j) + " is not a number");
            }
            const double x = v.get<double>();
            if (!std::isfinite(x) || x <= 0.0) {
                std::ostringstream msg;
                msg << "population '" << label << "' entry " << j << " (" << x << ") is not strictly positive";
                throw DataError(msg.str());
            }
            values.push_back(x);
        }
        return values;
    };

    std::vector<Population> out;
    if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const std::string label = std::to_string(i + 1);
            out.push_back({label, to_values(doc[i], label)});
        }
    } else if (doc.is_object() && doc.contains("populations")) {
        const auto& pops = doc["populations"];
        if (!pops.is_array()) {
            throw DataError("'populations' must be an array");
        }
        for (std::size_t i = 0; i < pops.size(); ++i) {
            const auto& p = pops[i];
            if (!p.is_object() || !p.contains("values")) {
                throw DataError("populations[" + std::to_string(i) + "] needs a 'values' array");
            }
            const std::string label =
                p.contains("label") && p["label"].is_string() ? p["label"].get<std::string>() : std::to_string(i + 1);
            out.push_back({label, to_values(p["values"], label)});
        }
    } else if (doc.is_object()) {
        for (const auto& [label, arr] : doc.items()) {
            out.push_back({label, to_values(arr, label)});
        }
    } else {
        throw DataError("JSON input must be an array of arrays or an object");
    }
    require_nonempty(out);
    return out;
}

std::vector<Population> load_populations(const std::string& path, DataKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool json = path.size() >= 5 && lower(path.substr(path.size() - 5)) == ".json";
    return json ? parse_json(text, kind) : parse_csv(text, kind);
}

std::vector<LabelledSeries> to_record_series(const std::vector<Population>& populations, DataKind kind) {
    std::vector<LabelledSeries> out;
    for (const auto& p : populations) {
        try {
            if (kind == DataKind::raw_sequences) {
                out.push_back({p.label, extract_upper_records(p.values)});
            } else {
                out.push_back({p.label, RecordSeries(p.values)});
            }
        } catch (const InvalidInput& ex) {
            throw DataError("population '" + p.label + "': " + ex.what());
        }
    }
    return out;
}

std::uint64_t data_digest(const std::vector<LabelledSeries>& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (const auto& d : data) {
        for (unsigned char c : d.label) {
            feed(c);
        }
        feed(0);
        for (double v : d.series.values()) {
            const auto bits = std::bit_cast<std::uint64_t>(v);
            for (int k = 0; k < 8; ++k) {
                feed((bits >> (8 * k)) & 0xff);
            }
        }
        feed(0xff);
    }
    return h;
}

}  // namespace weibrec
