#include "cstl/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cstl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.emplace_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Trailing blank lines are tolerated.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t col) {
  return path.string() + ": line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text, bool allow_na) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text == "NA") return allow_na ? std::optional<double>(std::nan("")) : std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& response_column, Domain domain) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": file is empty");
  const auto header = split_line(lines[0]);
  if (header.size() < 2) throw IoError(path.string() + ": need at least one design column and a response column");

  std::size_t resp = header.size() - 1;
  if (response_column) {
    const auto it = std::find(header.begin(), header.end(), *response_column);
    if (it == header.end()) throw IoError(path.string() + ": response column '" + *response_column + "' not found");
    resp = static_cast<std::size_t>(it - header.begin());
  }

  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  if (n == 0) throw IoError(path.string() + ": no data rows");
  Dataset ds;
  ds.domain = domain;
  ds.design.resize(n, static_cast<Eigen::Index>(header.size() - 1));
  ds.response.resize(n);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    if (cells.size() != header.size())
      throw IoError(path.string() + ": line " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                    " fields, expected " + std::to_string(header.size()));
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) throw IoError(where(path, r + 1, c + 1) + ": missing value");
      const auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) throw IoError(where(path, r + 1, c + 1) + ": non-numeric value '" + cells[c] + "'");
      if (c == resp) {
        ds.response[static_cast<Eigen::Index>(r - 1)] = *v;
      } else {
        ds.design(static_cast<Eigen::Index>(r - 1), col++) = *v;
      }
    }
  }
  return ds;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ostringstream os;
  for (Eigen::Index j = 0; j < ds.cols(); ++j) os << 'x' << (j + 1) << ',';
  os << "y\n";
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.cols(); ++j) os << format_double(ds.design(i, j)) << ',';
    os << format_double(ds.response[i]) << '\n';
  }
  write_text(path, os.str());
}

ResultsTable to_results_table(const ReplicationResults& res) {
  ResultsTable t;
  for (const auto& r : res.rows) {
    ResultRow row;
    row.method = to_string(r.method);
    row.replicate = r.replicate;
    row.sse = r.sse;
    row.mse = r.mse;
    row.lambda0 = r.lambda0;
    row.lambda1 = r.lambda1;
    row.iterations = r.iterations;
    row.converged = r.converged && !r.failed;
    t.rows.push_back(row);
  }
  t.summaries = res.summaries;
  return t;
}

void write_results(const ResultsTable& table, const std::filesystem::path& path) {
  std::ostringstream os;
  os << kResultsHeader << '\n';
  for (const auto& r : table.rows) {
    os << r.method << ',' << r.replicate << ',' << format_double(r.sse) << ',' << format_double(r.mse) << ','
       << format_double(r.lambda0) << ',' << format_double(r.lambda1) << ',' << r.iterations << ','
       << (r.converged ? "true" : "false") << '\n';
  }
  write_text(path, os.str());
}

void write_summary(const ResultsTable& table, const std::filesystem::path& path) {
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  for (const auto& s : table.summaries) {
    os << to_string(s.method) << ',' << s.n << ',' << s.failures << ',' << format_double(s.sse_mean) << ','
       << format_double(s.sse_stderr) << ',' << format_double(s.mse_mean) << ',' << format_double(s.mse_stderr)
       << '\n';
  }
  write_text(path, os.str());
}

ResultsTable read_results(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kResultsHeader) throw IoError(path.string() + ": missing results header");
  ResultsTable t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = split_line(lines[i]);
    if (c.size() != 8) throw IoError(path.string() + ": line " + std::to_string(i + 1) + " does not have 8 fields");
    auto num = [&](std::size_t k) {
      const auto v = parse_double(c[k], true);
      if (!v) throw IoError(where(path, i + 1, k + 1) + ": bad number '" + c[k] + "'");
      return *v;
    };
    ResultRow r;
    r.method = c[0];
    r.replicate = static_cast<int>(num(1));
    r.sse = num(2);
    r.mse = num(3);
    r.lambda0 = num(4);
    r.lambda1 = num(5);
    r.iterations = static_cast<int>(num(6));
    if (c[7] != "true" && c[7] != "false") throw IoError(where(path, i + 1, 8) + ": expected true/false");
    r.converged = c[7] == "true";
    t.rows.push_back(r);
  }
  return t;
}

Vector read_vector(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<double> vals;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split_line(lines[i]);
    const std::string& cell = cells.back();
    const auto v = parse_double(cell);
    if (!v) {
      if (i == 0) continue;  // header
      throw IoError(where(path, i + 1, cells.size()) + ": non-numeric value '" + cell + "'");
    }
    if (cells.size() > 2) throw IoError(path.string() + ": line " + std::to_string(i + 1) + " has too many fields");
    vals.push_back(*v);
  }
  if (vals.empty()) throw IoError(path.string() + ": no coefficients");
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace cstl
