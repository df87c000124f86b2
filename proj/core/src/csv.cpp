#include "dcw/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcw/common.hpp"

namespace dcw {

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

int CsvTable::require_column(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw data_error("csv: missing required column '" + name + "'");
  return c;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("csv: cannot open " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size()) {
        throw data_error("csv: row width mismatch in " + path);
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw data_error("csv: missing header row in " + path);
  return table;
}

double parse_double(const std::string& cell, const std::string& context) {
  const auto v = parse_optional_double(cell);
  if (!v.has_value()) throw data_error("csv: bad numeric value '" + cell + "' in " + context);
  return *v;
}

std::optional<double> parse_optional_double(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
  if (pos != cell.size()) return std::nullopt;
  return v;
}

long long parse_int(const std::string& cell, const std::string& context) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(cell, &pos);
    if (pos != cell.size()) throw data_error("");
    return v;
  } catch (const std::exception&) {
    throw data_error("csv: bad integer value '" + cell + "' in " + context);
  }
}

struct CsvWriter::State {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : state_(new State) {
  state_->out.open(path, std::ios::binary);  // '\n' line ends on every platform
  if (!state_->out) {
    delete state_;
    throw data_error("csv: cannot write " + path);
  }
}

CsvWriter::~CsvWriter() {
  close();
  delete state_;
}

void CsvWriter::close() {
  if (state_->out.is_open()) state_->out.close();
}

void CsvWriter::comment(const std::string& line) { state_->out << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) {
  row_mixed(columns);
}

std::string CsvWriter::format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) line.push_back(',');
    line += format_double(values[i]);
  }
  state_->out << line << "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) line.push_back(',');
    line += cells[i];
  }
  state_->out << line << "\n";
}

}  // namespace dcw
