#pragma once

#include <flsh/function_source.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace flsh {

struct DatasetRecord {
  std::string id;
  FunctionSource source;
};

enum class DatasetFormat {
  /// `id,kind,params...` per line, `#` comments. Kinds:
  ///   sine      id,sine,amplitude,frequency,phase
  ///   gaussian  id,gaussian,mu,sigma
  ///   table     id,table,path-to-two-column-CSV
  Text,
};

/// Records in file order. Relative table paths resolve against the dataset's
/// directory. Throws ParseError (with line) or DuplicateIdError.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path &path,
                                        DatasetFormat format = DatasetFormat::Text);

std::vector<DatasetRecord>
parse_dataset(std::istream &in, const std::filesystem::path &base_dir = {});

/// Two-column `x,y` CSV (optional header and `#` comments).
FunctionSource load_table(const std::filesystem::path &path);

} // namespace flsh
