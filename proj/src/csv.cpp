#include "svnet/csv.hpp"

#include <charconv>

#include "svnet/common.hpp"

namespace svn {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

void CsvReader::expect_header(const std::vector<std::string>& expected) {
    std::vector<std::string> fields;
    if (!next(fields)) throw DataError("empty input: missing header row");
    if (fields != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) want += ',';
            want += expected[i];
        }
        throw DataError("line " + std::to_string(line_) + ": bad header, expected '" + want + "'");
    }
}

bool CsvReader::next(std::vector<std::string>& fields) {
    while (std::getline(in_, buf_)) {
        ++line_;
        if (line_ == 1 && buf_.rfind("\xef\xbb\xbf", 0) == 0) buf_.erase(0, 3);
        if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
        if (buf_.empty()) continue;
        fields = split_csv_line(buf_);
        return true;
    }
    return false;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    out += '\n';
    return out;
}

}  // namespace svn
