#include <flsh/dataset.hpp>
#include <flsh/error.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace flsh {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto *end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty())
    throw ParseError("expected a number, got '" + std::string(field) + "'", line);
  return value;
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

} // namespace

FunctionSource load_table(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open table '" + path.string() + "'");
  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line))
      continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw ParseError("table row needs exactly two columns", line_no);
    // A non-numeric first row is a header.
    if (xs.empty() && line_no == 1) {
      double probe = 0.0;
      const auto f = fields[0];
      if (std::from_chars(f.data(), f.data() + f.size(), probe).ec != std::errc{})
        continue;
    }
    xs.push_back(parse_number(fields[0], line_no));
    ys.push_back(parse_number(fields[1], line_no));
  }
  try {
    return FunctionSource::tabulated(std::move(xs), std::move(ys));
  } catch (const Error &e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::vector<DatasetRecord> parse_dataset(std::istream &in,
                                         const std::filesystem::path &base_dir) {
  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line))
      continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2)
      throw ParseError("expected 'id,kind,params...'", line_no);
    std::string id(fields[0]);
    if (id.empty())
      throw ParseError("empty id", line_no);
    const auto kind = fields[1];

    auto expect = [&](std::size_t n) {
      if (fields.size() != n)
        throw ParseError(std::string(kind) + " row needs " +
                             std::to_string(n) + " fields",
                         line_no);
    };

    std::optional<FunctionSource> source;
    try {
      if (kind == "sine") {
        expect(5);
        source = FunctionSource::sine(parse_number(fields[2], line_no),
                                      parse_number(fields[3], line_no),
                                      parse_number(fields[4], line_no));
      } else if (kind == "gaussian") {
        expect(4);
        source = FunctionSource::quantile(Distribution1D::gaussian(
            parse_number(fields[2], line_no), parse_number(fields[3], line_no)));
      } else if (kind == "table") {
        expect(3);
        std::filesystem::path table(fields[2]);
        if (table.is_relative())
          table = base_dir / table;
        source = load_table(table);
      } else {
        throw ParseError("unknown kind '" + std::string(kind) + "'", line_no);
      }
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw ParseError(e.what(), line_no);
    }

    if (!seen.insert(id).second)
      throw DuplicateIdError("line " + std::to_string(line_no) +
                             ": duplicate id '" + id + "'");
    records.push_back({std::move(id), std::move(*source)});
  }
  return records;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path &path,
                                        DatasetFormat format) {
  if (format != DatasetFormat::Text)
    throw ConfigError("unsupported dataset format");
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.parent_path());
}

} // namespace flsh
