#ifndef SVNET_CSV_HPP
#define SVNET_CSV_HPP

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace svn {

// Line-oriented reader for the plain comma-separated formats used throughout
// the pipeline (opaque ids, no quoting or embedded commas). Tracks line
// numbers so parse diagnostics can name the offending row.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads the header row and verifies it matches `expected` exactly.
    // Throws DataError on mismatch.
    void expect_header(const std::vector<std::string>& expected);

    // Next data row; false at EOF. Blank lines are skipped.
    bool next(std::vector<std::string>& fields);

    std::size_t line_number() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::string buf_;
};

std::vector<std::string> split_csv_line(std::string_view line);

// Shortest round-trip decimal representation (std::to_chars); keeps output
// files byte-stable and lets downstream reconciliation reparse exact values.
std::string format_double(double v);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace svn

#endif  // SVNET_CSV_HPP
