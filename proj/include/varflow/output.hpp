#pragma once

#include <string>
#include <vector>

namespace varflow {

/// SHA-1 of "blob <size>\0<content>", as printed by `git hash-object`.
std::string git_blob_hash(const std::string& content);

/// Reads a whole file; throws InvalidArgument if it cannot be opened.
std::string read_file(const std::string& path);

struct NamedHash {
  std::string name;
  std::string hash;
};

/// Comment block: tool line, config echo, then one line per input hash.
std::string output_header(const std::string& config_echo, const std::vector<NamedHash>& inputs,
                          const std::string& prefix = "# ");

/// Writes header + body, creating parent directories.
void write_output(const std::string& path, const std::string& header, const std::string& body);

}  // namespace varflow
