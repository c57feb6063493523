#pragma once

#include <string>

#include <json.hpp>

namespace psmkit {

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

nlohmann::json load_json_file(const std::string &path);
// Canonical on-disk form: 2-space indent, trailing newline. Object keys are
// emitted in sorted order by nlohmann::json, which keeps artifacts
// byte-reproducible across runs.
void write_json_file(const std::string &path, const nlohmann::json &j);
std::string dump_json(const nlohmann::json &j);

}  // namespace psmkit
