#include "supalign/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "supalign/errors.hpp"

namespace supalign::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Matrix parse_matrix(const std::string& text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;

    std::vector<double> row;
    while (true) {
      const auto comma = line.find(',');
      std::string_view field = trim(line.substr(0, comma));
      double value = 0.0;
      const char* first = field.data();
      const char* last = field.data() + field.size();
      if (!field.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, value);
      require(!field.empty() && ec == std::errc() && ptr == last, ErrorKind::kSchema,
              origin + ":" + std::to_string(line_no) + ": not a number: '" +
                  std::string(field) + "'");
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    require(rows.empty() || row.size() == rows.front().size(), ErrorKind::kSchema,
            origin + ":" + std::to_string(line_no) + ": expected " +
                std::to_string(rows.empty() ? 0 : rows.front().size()) + " fields, got " +
                std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::kSchema, origin + ": empty matrix file");

  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix(buffer.str(), path.string());
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  require(ec == std::errc(), ErrorKind::kInvalidData, "cannot format number");
  return std::string(buf, ptr);
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 20);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(',');
      out += format_number(m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << format_matrix(m);
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace supalign::csv
