#include "json_util.hpp"

#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace psmkit {

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Stage::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw Error(Stage::Io, "read failed for " + path);
  return ss.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(Stage::Io, "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw Error(Stage::Io, "write failed for " + path);
}

nlohmann::json load_json_file(const std::string &path) {
  std::string text = read_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(Stage::Io, "invalid JSON in " + path);
  return j;
}

std::string dump_json(const nlohmann::json &j) { return j.dump(2) + "\n"; }

void write_json_file(const std::string &path, const nlohmann::json &j) {
  write_file(path, dump_json(j));
}

}  // namespace psmkit
