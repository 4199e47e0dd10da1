#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace asep::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { ok = 0, verify_failed = 1, bad_arguments = 2, numerical_failure = 3 };

using Cell = std::variant<long, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunManifest {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
  int schema_version = kSchemaVersion;
  std::string timestamp;  ///< not hashed
  std::string data_hash;

  /// FNV-1a over every field except the timestamp, as 16 hex digits.
  std::string determinism_hash() const;
  nlohmann::ordered_json to_json() const;
};

enum class Format { csv, json };

/// FNV-1a 64-bit.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ull);

/// Inclusive range "a:b", comma list "a,b,c", or a single integer.
std::vector<long> parse_int_grid(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

/// Rows formatted with 17 significant digits; the manifest's data_hash is
/// filled in from the data section before it is written.
std::string emit_table(const Table& table, RunManifest manifest, Format format);

/// Entry point behind the `asep` binary; args exclude the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace asep::cli
