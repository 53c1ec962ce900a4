#include "varflow/output.hpp"

#include "varflow/types.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace varflow {

std::string git_blob_hash(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::string hex(2 * SHA_DIGEST_LENGTH, '0');
  for (int i = 0; i < SHA_DIGEST_LENGTH; ++i) std::snprintf(&hex[2 * i], 3, "%02x", digest[i]);
  return hex;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string output_header(const std::string& config_echo, const std::vector<NamedHash>& inputs,
                          const std::string& prefix) {
  std::ostringstream os;
  os << prefix << "varflow output\n";
  std::istringstream lines(config_echo);
  std::string line;
  while (std::getline(lines, line)) os << prefix << "config " << line << '\n';
  for (const auto& in : inputs) os << prefix << "input " << in.name << ' ' << in.hash << '\n';
  return os.str();
}

void write_output(const std::string& path, const std::string& header, const std::string& body) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << header << body;
}

}  // namespace varflow
