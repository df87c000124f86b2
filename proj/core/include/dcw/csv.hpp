#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dcw {

/// Parsed CSV: comma separated, '.' decimal, mandatory header row, UTF-8.
/// Leading '#' lines are treated as comments and skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name) const;  // data_error when absent
};

CsvTable read_csv(const std::string& path);

double parse_double(const std::string& cell, const std::string& context);
std::optional<double> parse_optional_double(const std::string& cell);
long long parse_int(const std::string& cell, const std::string& context);

/// Streaming CSV writer. Numbers are emitted with 17 significant digits so
/// identical runs produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void comment(const std::string& line);  // written as "# line"
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);
  void close();

  static std::string format_double(double v);

 private:
  struct State;
  State* state_;
};

}  // namespace dcw
