#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dpa {

// Numbers rendered with 12 significant digits; non-finite values become
// null. Reports must be byte-identical across reruns, so serialization never
// depends on locale or on the library's shortest-round-trip formatting.
std::string format_number(double x);

// Walks an ordered json document and emits it with deterministic number
// formatting and two-space indentation.
std::string to_deterministic_json(const nlohmann::ordered_json& doc);

// Minimal CSV assembly; cells containing commas or quotes are quoted.
class CsvDoc {
 public:
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dpa
