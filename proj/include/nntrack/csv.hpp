#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nntrack {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Comma-separated table with a mandatory header row.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws ErrorKind::Parse when missing.
    std::size_t column(std::string_view name) const;
    /// Numeric cell; errors name the 1-based data row and column.
    double number(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(std::string_view text, std::string source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& row(const std::vector<std::string>& cells);
    const std::string& str() const { return text_; }

private:
    std::size_t width_;
    std::string text_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace nntrack
