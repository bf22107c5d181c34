#include "nsac/csv.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "nsac/error.hpp"

namespace nsac {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::string_view what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Format,
                std::string(what) + ": expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::string format_hash(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw Error(ErrorKind::Format, schema + ": no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_double(r[c], name));
  return out;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorKind::InvalidArgument, schema + ": row has " + std::to_string(row.size()) +
                                                " cells, expected " +
                                                std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

int schema_version(std::string_view schema) {
  static const std::pair<std::string_view, int> known[] = {
      {"energy", 1},          {"sweep_table", 1}, {"sweep_series", 1},
      {"galerkin_study", 1},  {"corrector_scalings", 1},
      {"kato", 1},            {"mms_temporal", 1}, {"mms_spatial", 1},
      {"rate_fit", 1},
  };
  for (const auto& [name, v] : known) {
    if (name == schema) return v;
  }
  return 0;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void join(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = line.find(',', start);
    out.emplace_back(line.substr(start, p == std::string_view::npos ? p : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

std::string to_text(const CsvTable& t, bool timestamp) {
  std::ostringstream os;
  os << "# nsac-csv " << t.schema << " v" << t.version << '\n';
  if (timestamp) os << "# created " << utc_now() << '\n';
  for (const auto& c : t.comments) os << "# " << c << '\n';
  join(os, t.columns);
  for (const auto& r : t.rows) join(os, r);
  return os.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& t, bool timestamp) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  f << to_text(t, timestamp);
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Format, "csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::istringstream h(line);
    std::string hash, tag, ver;
    h >> hash >> tag >> t.schema >> ver;
    if (hash != "#" || tag != "nsac-csv" || t.schema.empty() || ver.size() < 2 || ver[0] != 'v') {
      throw Error(ErrorKind::Format, "csv: missing '# nsac-csv <schema> v<N>' header line");
    }
    t.version = static_cast<int>(parse_double(ver.substr(1), "csv version"));
  }
  bool have_columns = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    auto cells = split(line);
    if (!have_columns) {
      t.columns = std::move(cells);
      have_columns = true;
    } else if (cells.size() != t.columns.size()) {
      throw Error(ErrorKind::Format, "csv: row " + std::to_string(t.rows.size() + 1) + " has " +
                                         std::to_string(cells.size()) + " cells, expected " +
                                         std::to_string(t.columns.size()));
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_columns) throw Error(ErrorKind::Format, "csv: no column header");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

void expect_schema(const CsvTable& t, std::string_view schema) {
  if (t.schema != schema) {
    throw Error(ErrorKind::Format,
                "csv: expected schema '" + std::string(schema) + "', got '" + t.schema + "'");
  }
  const int v = schema_version(schema);
  if (t.version != v) {
    throw Error(ErrorKind::Format, "csv: unsupported " + t.schema + " version v" +
                                       std::to_string(t.version) + " (reader knows v" +
                                       std::to_string(v) + ")");
  }
}

std::string csv_payload(std::string_view text) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    if (line.empty() || line[0] != '#') {
      out.append(line);
      out.push_back('\n');
    }
    start = end + 1;
  }
  return out;
}

}  // namespace nsac
