#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "mogen/centrality.hpp"
#include "mogen/error.hpp"

namespace mogen {

/// CSV number format: 9 significant digits, '.' decimal.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string format_fixed(double v, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

/// 64-bit FNV-1a, hex encoded. Identifies input contents in output metadata.
inline std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError(path + ": cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct ReportRow {
    std::string measure;
    std::string model;
    std::vector<NodeId> state;
    double score = 0.0;

    std::string state_label() const {
        std::string out;
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (i)
                out += '|';
            out += state[i];
        }
        return out;
    }
};

/// (model, measure, state) -> score rows in deterministic order.
class CentralityReport {
public:
    void add(const CentralityVector& vec, const std::string& model_label) {
        for (const auto& [state, score] : vec.scores)
            rows_.push_back({std::string(to_string(vec.measure)), model_label, state, score});
    }

    /// Sorted by measure, then model, then lexicographic state.
    std::vector<ReportRow> rows() const {
        auto out = rows_;
        std::sort(out.begin(), out.end(), [](const ReportRow& a, const ReportRow& b) {
            return std::tie(a.measure, a.model, a.state) < std::tie(b.measure, b.model, b.state);
        });
        return out;
    }

    bool empty() const { return rows_.empty(); }

    void write_csv(std::ostream& out) const {
        out << "measure,model,state,score\n";
        for (const auto& r : rows())
            out << csv_field(r.measure) << ',' << csv_field(r.model) << ',' << csv_field(r.state_label()) << ','
                << format_number(r.score) << '\n';
    }

    nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows())
            arr.push_back({{"measure", r.measure}, {"model", r.model}, {"state", r.state}, {"score", r.score}});
        return arr;
    }

private:
    std::vector<ReportRow> rows_;
};

} // namespace mogen
